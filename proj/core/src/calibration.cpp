#include "tailrisk/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tailrisk {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

} // namespace

CalibrationResult gamma_from_delta_pearson_bisection(double delta,
                                                     const MarginalDist& dist) {
    require(delta > 0.0 && delta < 1.0, "gamma_from_delta: delta must lie in (0,1)");
    if (dist.moments().variance <= 0.0)
        throw infeasible_error(
            "gamma_from_delta: pearson calibration is infeasible for a degenerate "
            "marginal (zero variance)");
    const auto cor = [&](double g) {
        return analytic_dependence_gamma(Measure::pearson, g, &dist);
    };
    double lo = 1e-12, hi = 1.0 - 1e-12;
    // The correlation curve is nonincreasing in gamma (tending to 1 at 0 and
    // to 0 at 1); the bracket must straddle delta before we iterate.
    if (!(cor(lo) >= delta && cor(hi) <= delta))
        throw infeasible_error(
            "gamma_from_delta: correlation curve does not straddle the requested delta");
    int iterations = 0;
    while (hi - lo > 1e-12) {
        if (++iterations > 200)
            throw std::runtime_error("gamma_from_delta: bisection iteration cap hit");
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // bracket collapsed to adjacent doubles
        if (cor(mid) <= delta)
            hi = mid;  // crossing is at or left of mid: keep the smallest solution
        else
            lo = mid;
    }
    const double gamma = 0.5 * (lo + hi);
    return CalibrationResult{gamma, cor(gamma), CalibrationResult::Method::bisection,
                             iterations};
}

CalibrationResult gamma_from_delta(Measure measure, double delta,
                                   const MarginalDist* dist) {
    require(delta > 0.0 && delta < 1.0, "gamma_from_delta: delta must lie in (0,1)");
    switch (measure) {
        case Measure::spearman: {
            const double gamma = std::cbrt(1.0 - delta);
            return CalibrationResult{gamma, delta_from_gamma(measure, gamma),
                                     CalibrationResult::Method::closed_form, 0};
        }
        case Measure::kendall: {
            const double gamma = std::sqrt(1.0 - delta);
            return CalibrationResult{gamma, delta_from_gamma(measure, gamma),
                                     CalibrationResult::Method::closed_form, 0};
        }
        case Measure::pearson: {
            require(dist != nullptr, "gamma_from_delta: pearson requires a marginal");
            if (dist->kind() == MarginalDist::Kind::bernoulli) {
                // gamma = 1/(1 + delta p/(1-p)); the solution always satisfies
                // gamma > 1-p, where the correlation formula is valid.
                const double p = dist->param_p();
                const double gamma = 1.0 / (1.0 + delta * p / (1.0 - p));
                return CalibrationResult{gamma, delta_from_gamma(measure, gamma, dist),
                                         CalibrationResult::Method::closed_form, 0};
            }
            if (dist->moments().variance <= 0.0)
                throw infeasible_error(
                    "gamma_from_delta: pearson calibration is infeasible for a "
                    "degenerate marginal (zero variance)");
            return gamma_from_delta_pearson_bisection(delta, *dist);
        }
    }
    throw std::logic_error("gamma_from_delta: unreachable measure");
}

double delta_from_gamma(Measure measure, double gamma, const MarginalDist* dist) {
    require(gamma > 0.0 && gamma < 1.0, "delta_from_gamma: gamma must lie in (0,1)");
    // analytic_dependence_gamma already special-cases exponential marginals to
    // the rate-free closed form and applies the 0/0 := 0 convention.
    return analytic_dependence_gamma(measure, gamma, dist);
}

bool feasibility_bound(const std::vector<double>& portfolio_pds, double alpha,
                       double delta) {
    require(!portfolio_pds.empty(), "feasibility_bound: need at least one pd");
    require(alpha > 0.0 && alpha < 1.0, "feasibility_bound: alpha must lie in (0,1)");
    require(delta > 0.0 && delta < 1.0, "feasibility_bound: delta must lie in (0,1)");
    double p_min = 1.0;
    for (double p : portfolio_pds) {
        require(p > 0.0 && p < 1.0, "feasibility_bound: pds must lie in (0,1)");
        p_min = std::min(p_min, p);
    }
    const double bound = 1.0 / (1.0 + delta * p_min / (1.0 - p_min));
    return alpha >= bound;
}

} // namespace tailrisk
