#pragma once

#include <stdexcept>
#include <vector>

#include "tailrisk/dependence.hpp"
#include "tailrisk/marginal.hpp"

namespace tailrisk {

// Raised when no threshold gamma can satisfy the requested dependence budget
// (e.g. Pearson calibration against a degenerate marginal).
struct infeasible_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CalibrationResult {
    enum class Method { closed_form, bisection };
    double gamma;
    double delta_achieved;
    Method method;
    int iterations;
};

// Smallest threshold gamma whose coupling dependence equals delta:
//   spearman            -> (1-delta)^{1/3}
//   kendall             -> (1-delta)^{1/2}
//   pearson, Bernoulli  -> 1/(1 + delta p/(1-p))   (always lands in the valid
//                          region gamma > 1-p)
//   pearson, general    -> monotone bisection on the correlation curve,
//                          absolute tolerance 1e-12 on gamma.
// `dist` is required for pearson and ignored otherwise.  A zero-variance
// marginal makes pearson calibration infeasible for every delta.
CalibrationResult gamma_from_delta(Measure measure, double delta,
                                   const MarginalDist* dist = nullptr);

// Inverse direction: the coupling dependence at a given gamma.  For pearson
// with exponential marginals this is the rate-free closed form
// (1-gamma)(1 + ln(1-gamma)^2/gamma); otherwise it delegates to
// analytic_dependence_gamma.
double delta_from_gamma(Measure measure, double gamma,
                        const MarginalDist* dist = nullptr);

// True iff gamma := alpha is admissible for the pairwise-max Pearson
// constraint of a Bernoulli portfolio, i.e. alpha >= 1/(1 + delta p_min/(1-p_min)).
bool feasibility_bound(const std::vector<double>& portfolio_pds, double alpha,
                       double delta);

// The general Pearson bisection path, exposed so closed forms can be
// cross-checked against it.  Asserts that the correlation curve straddles
// delta over the initial bracket before iterating.
CalibrationResult gamma_from_delta_pearson_bisection(double delta,
                                                     const MarginalDist& dist);

} // namespace tailrisk
