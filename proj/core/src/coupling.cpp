#include "tailrisk/coupling.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "tailrisk/rng.hpp"

namespace tailrisk {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

} // namespace

GammaCoupling::GammaCoupling(double gamma_, std::vector<MarginalDist> marginals_)
    : gamma(gamma_), marginals(std::move(marginals_)) {
    require(gamma > 0.0 && gamma < 1.0, "GammaCoupling: gamma must lie in (0,1)");
    require(!marginals.empty(), "GammaCoupling: need at least one marginal");
}

double copula_value(double gamma, const std::vector<double>& u) {
    require(gamma > 0.0 && gamma < 1.0, "copula_value: gamma must lie in (0,1)");
    require(!u.empty(), "copula_value: need at least one coordinate");
    bool all_above = true;
    for (double ui : u) {
        require(ui >= 0.0 && ui <= 1.0, "copula_value: coordinates must lie in [0,1]");
        if (ui <= gamma) all_above = false;
    }
    if (all_above) {
        double m = u[0];
        for (double ui : u) m = std::min(m, ui);
        return m;
    }
    double prod = gamma;
    for (double ui : u) prod *= std::min(ui, gamma) / gamma;
    return prod;
}

std::vector<double> sample(const GammaCoupling& coupling, std::int64_t count,
                           std::uint64_t seed, std::vector<double>* u_out) {
    require(count >= 1, "sample: count must be >= 1");
    const int n = coupling.dim();
    const double g = coupling.gamma;
    std::vector<double> rows(static_cast<std::size_t>(count) * n);
    if (u_out) u_out->resize(static_cast<std::size_t>(count));
    for (std::int64_t r = 0; r < count; ++r) {
        const double u = rng::uniform01(seed, static_cast<std::uint64_t>(r), 0);
        if (u_out) (*u_out)[static_cast<std::size_t>(r)] = u;
        double* row = rows.data() + static_cast<std::size_t>(r) * n;
        if (u <= g) {
            for (int i = 0; i < n; ++i) {
                const double v = rng::uniform01(seed, static_cast<std::uint64_t>(r),
                                                static_cast<std::uint64_t>(i) + 1);
                row[i] = coupling.marginals[static_cast<std::size_t>(i)].quantile(g * v);
            }
        } else {
            for (int i = 0; i < n; ++i)
                row[i] = coupling.marginals[static_cast<std::size_t>(i)].quantile(u);
        }
    }
    return rows;
}

std::vector<double> comonotone_sample(const std::vector<MarginalDist>& marginals,
                                      std::int64_t count, std::uint64_t seed,
                                      std::vector<double>* u_out) {
    require(count >= 1, "comonotone_sample: count must be >= 1");
    require(!marginals.empty(), "comonotone_sample: need at least one marginal");
    const int n = static_cast<int>(marginals.size());
    std::vector<double> rows(static_cast<std::size_t>(count) * n);
    if (u_out) u_out->resize(static_cast<std::size_t>(count));
    for (std::int64_t r = 0; r < count; ++r) {
        const double u = rng::uniform01(seed, static_cast<std::uint64_t>(r), 0);
        if (u_out) (*u_out)[static_cast<std::size_t>(r)] = u;
        double* row = rows.data() + static_cast<std::size_t>(r) * n;
        for (int i = 0; i < n; ++i)
            row[i] = marginals[static_cast<std::size_t>(i)].quantile(u);
    }
    return rows;
}

MarginalDist conditional_marginal(const GammaCoupling& coupling, int i) {
    require(i >= 0 && i < coupling.dim(), "conditional_marginal: index out of range");
    return MarginalDist::slice(coupling.marginals[static_cast<std::size_t>(i)], 0.0,
                               coupling.gamma);
}

bool lower_orthant_dominates(double gamma_hi, double gamma_lo, int n,
                             int grid_points_per_axis) {
    require(gamma_lo > 0.0 && gamma_lo <= gamma_hi && gamma_hi < 1.0,
            "lower_orthant_dominates: need 0 < gamma_lo <= gamma_hi < 1");
    require(n >= 1, "lower_orthant_dominates: need n >= 1");
    require(grid_points_per_axis >= 2,
            "lower_orthant_dominates: need at least 2 grid points per axis");
    const int g = grid_points_per_axis;
    std::vector<double> u(static_cast<std::size_t>(n));
    std::vector<int> idx(static_cast<std::size_t>(n), 1);
    // Odometer walk over the interior grid {k/(g+1)}^n.
    while (true) {
        for (int i = 0; i < n; ++i)
            u[static_cast<std::size_t>(i)] =
                static_cast<double>(idx[static_cast<std::size_t>(i)]) / (g + 1);
        if (copula_value(gamma_hi, u) > copula_value(gamma_lo, u) + 1e-12) return false;
        int i = 0;
        while (i < n && ++idx[static_cast<std::size_t>(i)] > g) {
            idx[static_cast<std::size_t>(i)] = 1;
            ++i;
        }
        if (i == n) break;
    }
    return true;
}

void write_sample_csv(const GammaCoupling& coupling, std::int64_t count,
                      std::uint64_t seed, const std::string& path) {
    require(count >= 1, "write_sample_csv: count must be >= 1");
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("write_sample_csv: cannot open " + path);
    const int n = coupling.dim();
    const double g = coupling.gamma;
    std::fputs("u", f);
    for (int i = 1; i <= n; ++i) std::fprintf(f, ",x%d", i);
    std::fputc('\n', f);
    for (std::int64_t r = 0; r < count; ++r) {
        const double u = rng::uniform01(seed, static_cast<std::uint64_t>(r), 0);
        std::fprintf(f, "%.12g", u);
        for (int i = 0; i < n; ++i) {
            double x;
            if (u <= g) {
                const double v = rng::uniform01(seed, static_cast<std::uint64_t>(r),
                                                static_cast<std::uint64_t>(i) + 1);
                x = coupling.marginals[static_cast<std::size_t>(i)].quantile(g * v);
            } else {
                x = coupling.marginals[static_cast<std::size_t>(i)].quantile(u);
            }
            std::fprintf(f, ",%.12g", x);
        }
        std::fputc('\n', f);
    }
    if (std::fclose(f) != 0)
        throw std::runtime_error("write_sample_csv: write failure on " + path);
}

} // namespace tailrisk
