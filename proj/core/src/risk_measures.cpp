#include "tailrisk/risk_measures.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tailrisk {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

} // namespace

double var(const MarginalDist& dist, double alpha) {
    require(alpha > 0.0 && alpha < 1.0, "var: alpha must lie in (0,1)");
    return dist.quantile(alpha);
}

double es(const MarginalDist& dist, double alpha) {
    require(alpha > 0.0 && alpha < 1.0, "es: alpha must lie in (0,1)");
    return dist.integrate_quantile_power(alpha, 1.0, 1) / (1.0 - alpha);
}

double expectile(const MarginalDist& dist, double alpha) {
    require(alpha > 0.0 && alpha < 1.0, "expectile: alpha must lie in (0,1)");
    double lo = dist.quantile(1e-9);
    double hi = dist.quantile(1.0 - 1e-9);
    if (lo >= hi) return lo;  // (numerically) degenerate distribution
    // Exact partial moments from quantile integrals: with F = cdf(e),
    //   E(T-e)_+ = int_F^1 F^{-1}(u) du - e (1-F),
    //   E(T-e)_- = e F - int_0^F F^{-1}(u) du,
    // both exact for atoms as well (the plateau of the quantile at e carries
    // no mass in either integrand).
    const auto residual = [&](double e) {
        const double f = dist.cdf(e);
        const double upper = dist.integrate_quantile_power(f, 1.0, 1) - e * (1.0 - f);
        const double lower = e * f - dist.integrate_quantile_power(0.0, f, 1);
        return alpha * upper - (1.0 - alpha) * lower;
    };
    // residual is strictly decreasing in e, positive at the lower bracket end
    // and negative at the upper one.
    int it = 0;
    while (true) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) return mid;  // bracket collapsed to adjacent doubles
        const double r = residual(mid);
        // Besides the residual, require the bracket itself to be tight: the
        // residual is flat near the root (e.g. for alpha = 1/2 it equals
        // (mean - e)/2), so a small residual alone does not pin e.
        if (std::abs(r) <= 1e-12 && hi - lo <= 1e-13 * std::max(1.0, std::abs(mid)))
            return mid;
        if (++it > 200)
            throw std::runtime_error("expectile: bisection iteration cap hit");
        if (r > 0.0)
            lo = mid;
        else
            hi = mid;
    }
}

MarginalDist tail_distribution(const MarginalDist& dist, double alpha) {
    require(alpha > 0.0 && alpha < 1.0, "tail_distribution: alpha must lie in (0,1)");
    return MarginalDist::slice(dist, alpha, 1.0);
}

bool tails_equal(const MarginalDist& dist1, const MarginalDist& dist2, double alpha,
                 int grid) {
    require(alpha > 0.0 && alpha < 1.0, "tails_equal: alpha must lie in (0,1)");
    require(grid >= 2, "tails_equal: need at least 2 grid points");
    for (int k = 0; k < grid; ++k) {
        const double u = alpha + (1.0 - alpha) * static_cast<double>(k) / grid;
        if (std::abs(dist1.quantile(u) - dist2.quantile(u)) > 1e-10) return false;
    }
    return true;
}

} // namespace tailrisk
