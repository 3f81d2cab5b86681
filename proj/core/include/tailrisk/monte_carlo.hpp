#pragma once

#include <cstdint>
#include <vector>

#include "tailrisk/aggregation.hpp"
#include "tailrisk/coupling.hpp"
#include "tailrisk/dependence.hpp"

namespace tailrisk {

// Seeded Monte Carlo configuration.  Every draw is keyed by (seed, row, column),
// so estimates are bit-identical for any worker count; workers only decide
// how the row range is chunked across threads.
struct McConfig {
    std::int64_t samples = 1'000'000;  // >= 10^3
    std::uint64_t seed = 0x5EEDULL;
    int workers = 1;
};

// f applied to every sampled row of X^gamma (row-major evaluation without
// materializing the full sample matrix).  values[r] depends only on
// (seed, r), never on the worker split.
std::vector<double> mc_aggregate_samples(const GammaCoupling& coupling,
                                         const AggregationFn& f, const McConfig& cfg);

// Empirical left-continuous quantile of f over sampled rows, plus an
// order-statistic error proxy: the quantiles at levels alpha +- 2 sqrt(alpha
// (1-alpha)/N) bracket the estimate and stderr_proxy is a quarter of the
// bracket width (zero when the bracket collapses onto an atom).
struct McEstimate {
    double estimate;
    double stderr_proxy;
};
McEstimate mc_var(const GammaCoupling& coupling, const AggregationFn& f, double alpha,
                  const McConfig& cfg);

// Empirical dependence of the first two coordinates of X^gamma for each
// gamma in the grid.  The estimate is the mean of 20 contiguous-batch
// estimates and std_error their sample standard deviation / sqrt(20), so the
// uncertainty needs no asymptotic variance formula.
struct SweepPoint {
    double gamma;
    double estimate;
    double std_error;
};
std::vector<SweepPoint> mc_dependence_sweep(Measure measure,
                                            const std::vector<MarginalDist>& marginals,
                                            const std::vector<double>& gamma_grid,
                                            const McConfig& cfg);

} // namespace tailrisk
