#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "tailrisk/coupling.hpp"
#include "tailrisk/marginal.hpp"

namespace tailrisk {

// A nondecreasing left-continuous aggregation of coordinate losses: either a
// nonnegatively weighted sum or an arbitrary user-supplied callable.  Custom
// callables are spot-checked for monotonicity at construction (1000 random
// coordinate bumps inside the given probe box) — a heuristic, not a proof.
class AggregationFn {
public:
    static AggregationFn weighted_sum(std::vector<double> weights);
    static AggregationFn custom(std::function<double(const std::vector<double>&)> f,
                                int arity, double probe_lo = 0.0, double probe_hi = 1.0);

    bool is_weighted_sum() const { return !weights_.empty(); }
    const std::vector<double>& weights() const;
    int arity() const { return arity_; }
    double operator()(const std::vector<double>& x) const;

private:
    AggregationFn() = default;
    std::vector<double> weights_;
    std::function<double(const std::vector<double>&)> fn_;
    int arity_ = 0;
};

// The comonotone value q(alpha) = f(F_1^{-1}(alpha), ..., F_n^{-1}(alpha)).
double q_alpha(const AggregationFn& f, const std::vector<MarginalDist>& marginals,
               double alpha);

// Worst-case VaR of f(X^gamma):
//   alpha >= gamma: q_alpha exactly (the plateau identity; no sampling);
//   alpha <  gamma: VaR at level alpha/gamma of f(Z) where Z has independent
//     pre-tail conditional marginals — exact for weighted Bernoulli sums
//     (binomial or bounded Poisson-binomial convolution), Monte Carlo over
//     mc_budget conditional samples otherwise (mc_budget < 10^3 is an error).
double var_aggregate(const AggregationFn& f, const GammaCoupling& coupling,
                     double alpha, std::int64_t mc_budget = 1'000'000,
                     std::uint64_t seed = 0x51D5EEDULL);

// Smallest k with P(B(n,p) <= k) >= alpha, by cumulative summation of
// binomial masses in log space (stable for large n and extreme p).
long long binomial_var(long long n, double p, double alpha);

// Expectile additivity for identical marginals under X^gamma: whenever the
// hypothesis ex^alpha(mu) >= F^{-1}(gamma) holds (alpha in [1/2, 1)),
//   ex^alpha(sum_i lambda_i X_i) = ex^alpha(mu) * sum_i lambda_i.
// Violating the hypothesis raises a domain error ("hypothesis not
// satisfied") — outside it the identity carries no guarantee.
double expectile_aggregate(const std::vector<double>& weights, const MarginalDist& dist,
                           double gamma, double alpha);

// The ratio n / VaR^alpha_{pre-tail}(Binomial sum) for a homogeneous
// unit-exposure Bernoulli(p) portfolio: numerator is the worst-case VaR
// (= n for alpha >= gamma > 1-p), denominator the exact conditional binomial
// quantile.  Requires gamma <= alpha and gamma > 1-p.
std::vector<std::pair<long long, double>> var_ratio_curve(
    double p, double gamma, double alpha, const std::vector<long long>& n_values);

// The two closed-form bounds behind the ratio asymptotics:
//   limsup_bound  = VaR^alpha(mu) / ((1/alpha) int_0^alpha F^{-1}(u) du),
//   mean_threshold = VaR^alpha(mu) / mean(mu).
// Requires alpha >= gamma and positive pre-tail mean (1/gamma) int_0^gamma F^{-1} > 0.
struct RatioBounds {
    double limsup_bound;
    double mean_threshold;
};
RatioBounds ratio_bounds(const MarginalDist& dist, double alpha, double gamma);

// Exact law of sum_i weights[i] * Bernoulli(ps[i]) with independent
// coordinates, as a finite atom distribution.  Throws std::length_error when
// the convolution support would exceed max_atoms (callers then fall back to
// Monte Carlo).
MarginalDist weighted_bernoulli_sum_dist(const std::vector<double>& weights,
                                         const std::vector<double>& ps,
                                         std::size_t max_atoms = 5000);

} // namespace tailrisk
