#pragma once

#include <utility>
#include <vector>

#include "tailrisk/marginal.hpp"

namespace tailrisk {

enum class Measure { pearson, spearman, kendall };

// Sample dependence of paired observations.
//   pearson : population-normalized correlation, with the 0/0 := 0 convention
//             when either coordinate is degenerate;
//   spearman: Pearson correlation of mid-ranks (average ranks on ties);
//   kendall : (concordant - discordant) / (n choose 2), ties counted as
//             neither, computed in O(N log N) by merge-sort inversion
//             counting.
// Requires at least two pairs.
double estimate_dependence(Measure measure,
                           const std::vector<std::pair<double, double>>& pairs);

// Dependence of two coordinates of X^gamma in closed form:
//   spearman -> 1 - gamma^3,
//   kendall  -> 1 - gamma^2,
//   pearson  -> [ (1/gamma)(int_0^gamma F^{-1})^2 + int_gamma^1 (F^{-1})^2
//                 - mean^2 ] / variance,  assuming both coordinates share the
//              marginal `dist` (required for pearson, ignored otherwise).
// A degenerate (zero-variance) marginal yields 0 under the 0/0 convention.
double analytic_dependence_gamma(Measure measure, double gamma,
                                 const MarginalDist* dist = nullptr);

// Aggregation of pairwise dependence values into one multivariate measure.
enum class Aggregator { weighted_sum, weighted_min, weighted_max };

// `entries` are the off-diagonal values rho_ij (any fixed order); `weights`
// must lie in [0,1] and are broadcast when a single weight is given.  For
// weighted_sum the weights must additionally sum to at most 1.
double aggregate_pairwise(const std::vector<double>& entries, Aggregator aggregator,
                          const std::vector<double>& weights);
// Convenience overload: extracts the off-diagonal entries of a full matrix in
// row-major order (diagonal ignored) and delegates.
double aggregate_pairwise(const std::vector<std::vector<double>>& rho_matrix,
                          Aggregator aggregator, const std::vector<double>& weights);

// Reduction of several one-sided constraints rho_j <= delta_j to a single
// constraint on one combined measure: delta = min_j delta_j and
// evaluate(r) = max_j (delta/delta_j) r_j; evaluate(r) <= delta holds iff all
// original constraints hold.
struct Constraint {
    Measure measure;
    double delta;
};

struct ReducedConstraint {
    double delta;
    std::vector<Constraint> parts;
    double evaluate(const std::vector<double>& rho_values) const;
};

ReducedConstraint reduce_constraints(const std::vector<Constraint>& constraints);

// Two-sided variant: constraints rho_j in [delta_lo_j, delta_hi_j] with
// delta_lo < 0 < delta_hi reduce to delta = min_j min(delta_hi_j, -delta_lo_j)
// and evaluate(r) = delta * max_j max(r_j/delta_hi_j, r_j/delta_lo_j).
struct TwoSidedConstraint {
    Measure measure;
    double delta_lo;
    double delta_hi;
};

struct ReducedTwoSidedConstraint {
    double delta;
    std::vector<TwoSidedConstraint> parts;
    double evaluate(const std::vector<double>& rho_values) const;
};

ReducedTwoSidedConstraint reduce_constraints_two_sided(
    const std::vector<TwoSidedConstraint>& constraints);

} // namespace tailrisk
