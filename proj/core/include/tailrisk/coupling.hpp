#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tailrisk/marginal.hpp"

namespace tailrisk {

// The threshold coupling X^gamma: a single mixing uniform U decides between a
// pre-tail regime (U <= gamma), where coordinates are conditionally
// independent with X_i = F_i^{-1}(gamma * V_i), and a tail regime (U > gamma),
// where all coordinates are comonotone with X_i = F_i^{-1}(U).  Every
// coordinate keeps its prescribed marginal.
struct GammaCoupling {
    double gamma;
    std::vector<MarginalDist> marginals;

    GammaCoupling(double gamma_, std::vector<MarginalDist> marginals_);
    int dim() const { return static_cast<int>(marginals.size()); }
};

// The coupling's copula: min_i u_i when every coordinate exceeds gamma,
// otherwise gamma * prod_i min(u_i, gamma)/gamma.  Inputs are validated to
// gamma in (0,1) and u_i in [0,1].
double copula_value(double gamma, const std::vector<double>& u);

// Draws `count` rows of X^gamma, row-major [count x dim].  Deterministic in
// (seed, row index): results never depend on scheduling or worker counts.
// When u_out is non-null it receives the per-row mixing uniform U, so
// statistics conditional on the pre-tail event {U <= gamma} can be formed
// without re-deriving it.
std::vector<double> sample(const GammaCoupling& coupling, std::int64_t count,
                           std::uint64_t seed, std::vector<double>* u_out = nullptr);

// Comonotone rows (F_1^{-1}(U), ..., F_n^{-1}(U)) with one uniform per row.
std::vector<double> comonotone_sample(const std::vector<MarginalDist>& marginals,
                                      std::int64_t count, std::uint64_t seed,
                                      std::vector<double>* u_out = nullptr);

// Law of coordinate i conditional on the pre-tail event {U <= gamma}:
// cdf a -> min(F_i(a), gamma)/gamma.  For Bernoulli(p) with gamma > 1-p this
// collapses to Bernoulli((gamma-1+p)/gamma), for gamma <= 1-p to Dirac 0.
MarginalDist conditional_marginal(const GammaCoupling& coupling, int i);

// Grid check of the lower orthant order between two thresholds: true iff
// copula_value(gamma_hi, u) <= copula_value(gamma_lo, u) + 1e-12 at every
// point of the uniform grid over (0,1)^n.  Requires gamma_lo <= gamma_hi and
// grid_points_per_axis >= 2.
bool lower_orthant_dominates(double gamma_hi, double gamma_lo, int n,
                             int grid_points_per_axis);

// Streams `count` sampled rows to a CSV file with header "u,x1,...,xn".
void write_sample_csv(const GammaCoupling& coupling, std::int64_t count,
                      std::uint64_t seed, const std::string& path);

} // namespace tailrisk
