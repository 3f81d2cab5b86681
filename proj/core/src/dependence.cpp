#include "tailrisk/dependence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace tailrisk {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

double pearson_of(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) return 0.0;  // degenerate coordinate: 0/0 := 0
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// Mid-ranks (1-based, ties receive the average of their rank range).
std::vector<double> mid_ranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && v[order[j]] == v[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + 1 + j);  // average of i+1..j
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
        i = j;
    }
    return ranks;
}

// Number of strict inversions (i < j with v[i] > v[j]) by merge sort.
std::uint64_t count_inversions(std::vector<double>& v, std::vector<double>& buf,
                               std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::uint64_t count = count_inversions(v, buf, lo, mid) +
                          count_inversions(v, buf, mid, hi);
    std::size_t a = lo, b = mid, out = lo;
    while (a < mid && b < hi) {
        if (v[a] <= v[b]) {
            buf[out++] = v[a++];
        } else {
            count += mid - a;
            buf[out++] = v[b++];
        }
    }
    while (a < mid) buf[out++] = v[a++];
    while (b < hi) buf[out++] = v[b++];
    std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo),
              buf.begin() + static_cast<std::ptrdiff_t>(hi),
              v.begin() + static_cast<std::ptrdiff_t>(lo));
    return count;
}

std::uint64_t tied_pair_count(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::uint64_t total = 0;
    std::size_t i = 0;
    while (i < v.size()) {
        std::size_t j = i;
        while (j < v.size() && v[j] == v[i]) ++j;
        const std::uint64_t t = j - i;
        total += t * (t - 1) / 2;
        i = j;
    }
    return total;
}

double kendall_tau(const std::vector<std::pair<double, double>>& pairs) {
    // Knight's O(N log N) algorithm.  After sorting by (x asc, y asc), strict
    // y-inversions are exactly the discordant pairs D; concordant pairs are
    // what remains of n0 = N(N-1)/2 after removing x-ties n1, y-ties n2
    // (jointly tied pairs n3 were subtracted twice) and D.  Ties contribute
    // to neither C nor D, so tau = (C - D) / n0.
    const std::size_t n = pairs.size();
    std::vector<std::pair<double, double>> s(pairs);
    std::sort(s.begin(), s.end());
    const std::uint64_t n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    std::uint64_t n1 = 0, n3 = 0;
    {
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j < n && s[j].first == s[i].first) ++j;
            const std::uint64_t t = j - i;
            n1 += t * (t - 1) / 2;
            std::size_t k = i;
            while (k < j) {
                std::size_t l = k;
                while (l < j && s[l].second == s[k].second) ++l;
                const std::uint64_t u = l - k;
                n3 += u * (u - 1) / 2;
                k = l;
            }
            i = j;
        }
    }
    std::vector<double> ys(n), buf(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = s[i].second;
    const std::uint64_t n2 = tied_pair_count(ys);
    const std::uint64_t d = count_inversions(ys, buf, 0, n);
    const std::uint64_t c = n0 - n1 - n2 + n3 - d;
    return (static_cast<double>(c) - static_cast<double>(d)) / static_cast<double>(n0);
}

} // namespace

double estimate_dependence(Measure measure,
                           const std::vector<std::pair<double, double>>& pairs) {
    require(pairs.size() >= 2, "estimate_dependence: need at least two pairs");
    switch (measure) {
        case Measure::pearson: {
            std::vector<double> x(pairs.size()), y(pairs.size());
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                x[i] = pairs[i].first;
                y[i] = pairs[i].second;
            }
            return pearson_of(x, y);
        }
        case Measure::spearman: {
            std::vector<double> x(pairs.size()), y(pairs.size());
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                x[i] = pairs[i].first;
                y[i] = pairs[i].second;
            }
            return pearson_of(mid_ranks(x), mid_ranks(y));
        }
        case Measure::kendall:
            return std::clamp(kendall_tau(pairs), -1.0, 1.0);
    }
    throw std::logic_error("estimate_dependence: unreachable measure");
}

double analytic_dependence_gamma(Measure measure, double gamma,
                                 const MarginalDist* dist) {
    require(gamma > 0.0 && gamma < 1.0,
            "analytic_dependence_gamma: gamma must lie in (0,1)");
    switch (measure) {
        case Measure::spearman:
            return 1.0 - gamma * gamma * gamma;
        case Measure::kendall:
            return 1.0 - gamma * gamma;
        case Measure::pearson: {
            require(dist != nullptr,
                    "analytic_dependence_gamma: pearson requires a marginal");
            if (dist->kind() == MarginalDist::Kind::exponential) {
                // Rate-free closed form for exponential marginals.
                const double l = std::log1p(-gamma);
                return (1.0 - gamma) * (1.0 + l * l / gamma);
            }
            const auto [mean, variance] = dist->moments();
            if (variance <= 0.0) return 0.0;  // degenerate marginal: 0/0 := 0
            const double m1 = dist->integrate_quantile_power(0.0, gamma, 1);
            const double i2 = dist->integrate_quantile_power(gamma, 1.0, 2);
            return (m1 * m1 / gamma + i2 - mean * mean) / variance;
        }
    }
    throw std::logic_error("analytic_dependence_gamma: unreachable measure");
}

namespace {

std::vector<double> checked_weights(const std::vector<double>& weights,
                                    std::size_t count, bool sum_constrained) {
    require(!weights.empty(), "aggregate_pairwise: weights must be non-empty");
    std::vector<double> w = weights;
    if (w.size() == 1) w.assign(count, w.front());  // broadcast a scalar weight
    require(w.size() == count, "aggregate_pairwise: weights/entries size mismatch");
    double total = 0.0;
    for (double wi : w) {
        require(wi >= 0.0 && wi <= 1.0, "aggregate_pairwise: weights must lie in [0,1]");
        total += wi;
    }
    if (sum_constrained)
        require(total <= 1.0 + 1e-12, "aggregate_pairwise: weights must sum to at most 1");
    return w;
}

} // namespace

double aggregate_pairwise(const std::vector<double>& entries, Aggregator aggregator,
                          const std::vector<double>& weights) {
    require(!entries.empty(), "aggregate_pairwise: entries must be non-empty");
    const std::vector<double> w =
        checked_weights(weights, entries.size(), aggregator == Aggregator::weighted_sum);
    switch (aggregator) {
        case Aggregator::weighted_sum: {
            double s = 0.0;
            for (std::size_t j = 0; j < entries.size(); ++j) s += w[j] * entries[j];
            return s;
        }
        case Aggregator::weighted_min: {
            double m = w[0] * entries[0];
            for (std::size_t j = 1; j < entries.size(); ++j)
                m = std::min(m, w[j] * entries[j]);
            return m;
        }
        case Aggregator::weighted_max: {
            double m = w[0] * entries[0];
            for (std::size_t j = 1; j < entries.size(); ++j)
                m = std::max(m, w[j] * entries[j]);
            return m;
        }
    }
    throw std::logic_error("aggregate_pairwise: unreachable aggregator");
}

double aggregate_pairwise(const std::vector<std::vector<double>>& rho_matrix,
                          Aggregator aggregator, const std::vector<double>& weights) {
    const std::size_t n = rho_matrix.size();
    require(n >= 2, "aggregate_pairwise: matrix must be at least 2x2");
    std::vector<double> entries;
    entries.reserve(n * (n - 1));
    for (std::size_t i = 0; i < n; ++i) {
        require(rho_matrix[i].size() == n, "aggregate_pairwise: matrix must be square");
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) entries.push_back(rho_matrix[i][j]);
    }
    return aggregate_pairwise(entries, aggregator, weights);
}

double ReducedConstraint::evaluate(const std::vector<double>& rho_values) const {
    if (rho_values.size() != parts.size())
        throw std::invalid_argument("ReducedConstraint: one value per constraint required");
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < parts.size(); ++j)
        m = std::max(m, delta / parts[j].delta * rho_values[j]);
    return m;
}

ReducedConstraint reduce_constraints(const std::vector<Constraint>& constraints) {
    require(!constraints.empty(), "reduce_constraints: need at least one constraint");
    double delta = 1.0;
    for (const Constraint& c : constraints) {
        require(c.delta > 0.0 && c.delta < 1.0,
                "reduce_constraints: thresholds must lie in (0,1)");
        delta = std::min(delta, c.delta);
    }
    return ReducedConstraint{delta, constraints};
}

double ReducedTwoSidedConstraint::evaluate(const std::vector<double>& rho_values) const {
    if (rho_values.size() != parts.size())
        throw std::invalid_argument(
            "ReducedTwoSidedConstraint: one value per constraint required");
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < parts.size(); ++j) {
        const double hi = rho_values[j] / parts[j].delta_hi;
        const double lo = rho_values[j] / parts[j].delta_lo;
        m = std::max(m, std::max(hi, lo));
    }
    return delta * m;
}

ReducedTwoSidedConstraint reduce_constraints_two_sided(
    const std::vector<TwoSidedConstraint>& constraints) {
    require(!constraints.empty(),
            "reduce_constraints_two_sided: need at least one constraint");
    double delta = 1.0;
    for (const TwoSidedConstraint& c : constraints) {
        require(c.delta_hi > 0.0 && c.delta_hi < 1.0 && c.delta_lo < 0.0 &&
                    c.delta_lo > -1.0,
                "reduce_constraints_two_sided: need delta_lo in (-1,0), delta_hi in (0,1)");
        delta = std::min(delta, std::min(c.delta_hi, -c.delta_lo));
    }
    return ReducedTwoSidedConstraint{delta, constraints};
}

} // namespace tailrisk
