#pragma once

#include "tailrisk/marginal.hpp"

namespace tailrisk {

// Left-continuous value at risk: F^{-1}(alpha) = inf{a : F(a) >= alpha}.
double var(const MarginalDist& dist, double alpha);

// Expected shortfall: the average of VaR levels above alpha,
// (1/(1-alpha)) * int_alpha^1 F^{-1}(u) du, evaluated exactly.
double es(const MarginalDist& dist, double alpha);

// Expectile: the unique root e of
//   alpha E(T-e)_+ = (1-alpha) E(T-e)_-,
// solved by bisection over [quantile(1e-9), quantile(1-1e-9)] with partial
// moments computed in closed form from quantile integrals; stops on residual
// <= 1e-12 or when the bracket collapses to adjacent doubles.
double expectile(const MarginalDist& dist, double alpha);

// The alpha-tail transform: the distribution with quantile
// u -> quantile(dist, alpha + (1-alpha)u), i.e. the conditional law beyond
// the alpha-quantile that every alpha-tail risk measure is a functional of.
MarginalDist tail_distribution(const MarginalDist& dist, double alpha);

// True iff the quantiles of the two distributions agree within 1e-10 at the
// grid points {alpha + k(1-alpha)/grid : k = 0, ..., grid-1}; two losses with
// equal alpha-tails receive the same value from every alpha-tail risk measure.
bool tails_equal(const MarginalDist& dist1, const MarginalDist& dist2, double alpha,
                 int grid);

} // namespace tailrisk
