#include "tailrisk/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <thread>

#include "tailrisk/rng.hpp"

namespace tailrisk {

namespace {

void validate_config(const McConfig& cfg) {
    if (cfg.samples < 1000) throw std::invalid_argument("monte carlo: samples must be >= 1000");
    if (cfg.workers < 1) throw std::invalid_argument("monte carlo: workers must be >= 1");
}

// Evaluate rows [begin, end) of the coupling sample into out[begin..end).
// The draw for row r uses only (seed, r, col), so the chunking is invisible
// in the output.
void fill_rows(const GammaCoupling& coupling, const AggregationFn& f, std::uint64_t seed,
               std::int64_t begin, std::int64_t end, std::vector<double>& out) {
    const std::size_t n = coupling.dim();
    const double gamma = coupling.gamma;
    std::vector<double> x(n);
    for (std::int64_t r = begin; r < end; ++r) {
        const double u = rng::uniform01(seed, static_cast<std::uint64_t>(r), 0);
        if (u <= gamma) {
            for (std::size_t i = 0; i < n; ++i) {
                const double v = rng::uniform01(seed, static_cast<std::uint64_t>(r),
                                                static_cast<std::uint64_t>(i) + 1);
                x[i] = coupling.marginals[i].quantile(gamma * v);
            }
        } else {
            for (std::size_t i = 0; i < n; ++i) x[i] = coupling.marginals[i].quantile(u);
        }
        out[static_cast<std::size_t>(r)] = f(x);
    }
}

void run_chunked(const GammaCoupling& coupling, const AggregationFn& f, const McConfig& cfg,
                 std::vector<double>& out) {
    const std::int64_t total = cfg.samples;
    const int workers = static_cast<int>(
        std::min<std::int64_t>(cfg.workers, std::max<std::int64_t>(1, total)));
    if (workers == 1) {
        fill_rows(coupling, f, cfg.seed, 0, total, out);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    const std::int64_t chunk = (total + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const std::int64_t begin = static_cast<std::int64_t>(w) * chunk;
        const std::int64_t end = std::min(total, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, begin, end] { fill_rows(coupling, f, cfg.seed, begin, end, out); });
    }
    for (auto& t : pool) t.join();
}

// Left-continuous empirical quantile of a sorted sample: the value at
// 1-based rank ceil(level * N).
double sorted_quantile(const std::vector<double>& sorted, double level) {
    const std::size_t n = sorted.size();
    double rank = std::ceil(level * static_cast<double>(n));
    if (rank < 1.0) rank = 1.0;
    if (rank > static_cast<double>(n)) rank = static_cast<double>(n);
    return sorted[static_cast<std::size_t>(rank) - 1];
}

} // namespace

std::vector<double> mc_aggregate_samples(const GammaCoupling& coupling, const AggregationFn& f,
                                         const McConfig& cfg) {
    validate_config(cfg);
    std::vector<double> values(static_cast<std::size_t>(cfg.samples));
    run_chunked(coupling, f, cfg, values);
    return values;
}

McEstimate mc_var(const GammaCoupling& coupling, const AggregationFn& f, double alpha,
                  const McConfig& cfg) {
    validate_config(cfg);
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("mc_var: alpha must lie in (0, 1)");
    std::vector<double> values = mc_aggregate_samples(coupling, f, cfg);
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    const double half_width = 2.0 * std::sqrt(alpha * (1.0 - alpha) / n);
    const double lo_level = std::max(0.0, alpha - half_width);
    const double hi_level = std::min(1.0, alpha + half_width);
    const double q_lo = sorted_quantile(values, lo_level);
    const double q_hi = sorted_quantile(values, hi_level);
    return {sorted_quantile(values, alpha), (q_hi - q_lo) / 4.0};
}

std::vector<SweepPoint> mc_dependence_sweep(Measure measure,
                                            const std::vector<MarginalDist>& marginals,
                                            const std::vector<double>& gamma_grid,
                                            const McConfig& cfg) {
    validate_config(cfg);
    if (marginals.size() < 2)
        throw std::invalid_argument("mc_dependence_sweep: need at least two marginals");
    for (double g : gamma_grid)
        if (!(g > 0.0 && g < 1.0))
            throw std::invalid_argument("mc_dependence_sweep: gamma must lie in (0, 1)");

    constexpr int kBatches = 20;
    std::vector<SweepPoint> points;
    points.reserve(gamma_grid.size());
    std::vector<double> xs(static_cast<std::size_t>(cfg.samples));
    std::vector<double> ys(static_cast<std::size_t>(cfg.samples));
    for (double gamma : gamma_grid) {
        GammaCoupling coupling(gamma, marginals);
        // Fill the first two coordinates only; other columns of the row are
        // never drawn, which leaves the (seed, row, col) keying intact.
        const std::int64_t total = cfg.samples;
        const int workers = static_cast<int>(
            std::min<std::int64_t>(cfg.workers, std::max<std::int64_t>(1, total)));
        auto fill_pairs = [&](std::int64_t begin, std::int64_t end) {
            for (std::int64_t r = begin; r < end; ++r) {
                const double u = rng::uniform01(cfg.seed, static_cast<std::uint64_t>(r), 0);
                double u0, u1;
                if (u <= gamma) {
                    u0 = gamma * rng::uniform01(cfg.seed, static_cast<std::uint64_t>(r), 1);
                    u1 = gamma * rng::uniform01(cfg.seed, static_cast<std::uint64_t>(r), 2);
                } else {
                    u0 = u;
                    u1 = u;
                }
                xs[static_cast<std::size_t>(r)] = coupling.marginals[0].quantile(u0);
                ys[static_cast<std::size_t>(r)] = coupling.marginals[1].quantile(u1);
            }
        };
        if (workers == 1) {
            fill_pairs(0, total);
        } else {
            std::vector<std::thread> pool;
            const std::int64_t chunk = (total + workers - 1) / workers;
            for (int w = 0; w < workers; ++w) {
                const std::int64_t begin = static_cast<std::int64_t>(w) * chunk;
                const std::int64_t end = std::min(total, begin + chunk);
                if (begin >= end) break;
                pool.emplace_back([&fill_pairs, begin, end] { fill_pairs(begin, end); });
            }
            for (auto& t : pool) t.join();
        }

        // Batch means: estimate per contiguous batch, then aggregate.
        std::vector<double> batch_values;
        batch_values.reserve(kBatches);
        const std::int64_t batch = total / kBatches;
        std::vector<std::pair<double, double>> pairs;
        for (int b = 0; b < kBatches; ++b) {
            const std::int64_t begin = static_cast<std::int64_t>(b) * batch;
            const std::int64_t end = (b == kBatches - 1) ? total : begin + batch;
            pairs.clear();
            pairs.reserve(static_cast<std::size_t>(end - begin));
            for (std::int64_t r = begin; r < end; ++r)
                pairs.emplace_back(xs[static_cast<std::size_t>(r)],
                                   ys[static_cast<std::size_t>(r)]);
            batch_values.push_back(estimate_dependence(measure, pairs));
        }
        double mean = 0.0;
        for (double v : batch_values) mean += v;
        mean /= kBatches;
        double ss = 0.0;
        for (double v : batch_values) ss += (v - mean) * (v - mean);
        const double sd = std::sqrt(ss / (kBatches - 1));
        points.push_back({gamma, mean, sd / std::sqrt(static_cast<double>(kBatches))});
    }
    return points;
}

} // namespace tailrisk
