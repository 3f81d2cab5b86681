#include "tailrisk/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

#include "tailrisk/risk_measures.hpp"
#include "tailrisk/rng.hpp"

namespace tailrisk {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

double logaddexp(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == -std::numeric_limits<double>::infinity()) return a;
    return a + std::log1p(std::exp(b - a));
}

} // namespace

// ---------------------------------------------------------------------------
// AggregationFn
// ---------------------------------------------------------------------------

AggregationFn AggregationFn::weighted_sum(std::vector<double> weights) {
    require(!weights.empty(), "AggregationFn: need at least one weight");
    for (double w : weights)
        require(w >= 0.0 && std::isfinite(w),
                "AggregationFn: weights must be non-negative");
    AggregationFn f;
    f.arity_ = static_cast<int>(weights.size());
    f.weights_ = std::move(weights);
    return f;
}

AggregationFn AggregationFn::custom(std::function<double(const std::vector<double>&)> fn,
                                    int arity, double probe_lo, double probe_hi) {
    require(static_cast<bool>(fn), "AggregationFn: callable must be non-empty");
    require(arity >= 1, "AggregationFn: arity must be >= 1");
    require(probe_lo < probe_hi, "AggregationFn: probe box must be non-empty");
    // Monotonicity spot check: bump one random coordinate upward and demand
    // the value does not decrease.  Randomized but deterministic (fixed key).
    std::vector<double> x(static_cast<std::size_t>(arity));
    for (int probe = 0; probe < 1000; ++probe) {
        for (int i = 0; i < arity; ++i)
            x[static_cast<std::size_t>(i)] =
                probe_lo + (probe_hi - probe_lo) *
                               rng::uniform01(0xA66F1ULL, static_cast<std::uint64_t>(probe),
                                              static_cast<std::uint64_t>(i));
        const double base = fn(x);
        const int bumped = static_cast<int>(rng::hash3(0xA66F2ULL,
                                                       static_cast<std::uint64_t>(probe), 0) %
                                            static_cast<std::uint64_t>(arity));
        const double step =
            (probe_hi - x[static_cast<std::size_t>(bumped)]) *
            rng::uniform01(0xA66F3ULL, static_cast<std::uint64_t>(probe), 1);
        x[static_cast<std::size_t>(bumped)] += step;
        if (fn(x) < base)
            throw std::invalid_argument(
                "AggregationFn: callable failed the nondecreasing spot check");
    }
    AggregationFn f;
    f.fn_ = std::move(fn);
    f.arity_ = arity;
    return f;
}

const std::vector<double>& AggregationFn::weights() const {
    if (!is_weighted_sum())
        throw std::invalid_argument("AggregationFn: not a weighted sum");
    return weights_;
}

double AggregationFn::operator()(const std::vector<double>& x) const {
    if (x.size() != static_cast<std::size_t>(arity_))
        throw std::invalid_argument("AggregationFn: wrong number of coordinates");
    if (is_weighted_sum()) {
        double s = 0.0;
        for (std::size_t i = 0; i < weights_.size(); ++i) s += weights_[i] * x[i];
        return s;
    }
    return fn_(x);
}

// ---------------------------------------------------------------------------
// exact pieces
// ---------------------------------------------------------------------------

double q_alpha(const AggregationFn& f, const std::vector<MarginalDist>& marginals,
               double alpha) {
    require(alpha > 0.0 && alpha < 1.0, "q_alpha: alpha must lie in (0,1)");
    require(static_cast<int>(marginals.size()) == f.arity(),
            "q_alpha: marginal count must match the aggregation arity");
    std::vector<double> q(marginals.size());
    for (std::size_t i = 0; i < marginals.size(); ++i) q[i] = marginals[i].quantile(alpha);
    return f(q);
}

long long binomial_var(long long n, double p, double alpha) {
    require(n >= 1, "binomial_var: n must be >= 1");
    require(p > 0.0 && p < 1.0, "binomial_var: p must lie in (0,1)");
    require(alpha > 0.0 && alpha < 1.0, "binomial_var: alpha must lie in (0,1)");
    const double log_alpha = std::log(alpha);
    const double log_p = std::log(p);
    const double log_q = std::log1p(-p);
    // log pmf(k+1) = log pmf(k) + log((n-k) p) - log((k+1)(1-p))
    double log_pmf = static_cast<double>(n) * log_q;
    double log_cdf = log_pmf;
    for (long long k = 0; k < n; ++k) {
        if (log_cdf >= log_alpha) return k;
        log_pmf += std::log(static_cast<double>(n - k)) + log_p -
                   std::log(static_cast<double>(k + 1)) - log_q;
        log_cdf = logaddexp(log_cdf, log_pmf);
    }
    return n;
}

MarginalDist weighted_bernoulli_sum_dist(const std::vector<double>& weights,
                                         const std::vector<double>& ps,
                                         std::size_t max_atoms) {
    require(!weights.empty() && weights.size() == ps.size(),
            "weighted_bernoulli_sum_dist: weights/ps size mismatch");
    require(max_atoms >= 2, "weighted_bernoulli_sum_dist: max_atoms must be >= 2");
    for (double w : weights)
        require(w >= 0.0, "weighted_bernoulli_sum_dist: weights must be non-negative");
    // Group coordinates by exposure weight: within a class the sum of
    // Bernoullis is Poisson-binomial over the count, computed by the standard
    // O(m^2) recurrence; classes are then convolved over their weighted
    // supports.  Zero-probability coordinates (p <= 0) contribute nothing.
    std::map<double, std::vector<double>> classes;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        require(ps[i] < 1.0, "weighted_bernoulli_sum_dist: ps must be < 1");
        if (ps[i] > 0.0 && weights[i] > 0.0) classes[weights[i]].push_back(ps[i]);
    }
    std::map<double, double> atoms{{0.0, 1.0}};
    for (const auto& [w, class_ps] : classes) {
        // Count distribution of the class.
        std::vector<double> count{1.0};
        for (double p : class_ps) {
            count.push_back(0.0);
            for (std::size_t k = count.size() - 1; k > 0; --k)
                count[k] = count[k] * (1.0 - p) + count[k - 1] * p;
            count[0] *= 1.0 - p;
        }
        std::map<double, double> next;
        for (const auto& [value, prob] : atoms)
            for (std::size_t k = 0; k < count.size(); ++k) {
                if (count[k] <= 0.0) continue;
                next[value + w * static_cast<double>(k)] += prob * count[k];
            }
        if (next.size() > max_atoms)
            throw std::length_error(
                "weighted_bernoulli_sum_dist: convolution support exceeds max_atoms");
        atoms = std::move(next);
    }
    std::vector<double> values, probs;
    values.reserve(atoms.size());
    probs.reserve(atoms.size());
    for (const auto& [value, prob] : atoms) {
        values.push_back(value);
        probs.push_back(prob);
    }
    return MarginalDist::discrete(std::move(values), std::move(probs));
}

// ---------------------------------------------------------------------------
// worst-case VaR
// ---------------------------------------------------------------------------

namespace {

// Conditional default probability of Bernoulli(p) on the pre-tail event.
double pretail_p(double p, double gamma) { return (gamma - 1.0 + p) / gamma; }

// Monte Carlo VaR of f(Z) where Z has independent pre-tail conditional
// marginals Z_i = F_i^{-1}(gamma V_i); deterministic in (seed, row).
double mc_conditional_var(const AggregationFn& f, const GammaCoupling& coupling,
                          double level, std::int64_t budget, std::uint64_t seed) {
    const int n = coupling.dim();
    std::vector<double> values(static_cast<std::size_t>(budget));
    std::vector<double> z(static_cast<std::size_t>(n));
    for (std::int64_t r = 0; r < budget; ++r) {
        for (int i = 0; i < n; ++i) {
            const double v = rng::uniform01(seed, static_cast<std::uint64_t>(r),
                                            static_cast<std::uint64_t>(i) + 1);
            z[static_cast<std::size_t>(i)] =
                coupling.marginals[static_cast<std::size_t>(i)].quantile(coupling.gamma * v);
        }
        values[static_cast<std::size_t>(r)] = f(z);
    }
    std::sort(values.begin(), values.end());
    const std::int64_t rank = static_cast<std::int64_t>(
        std::ceil(level * static_cast<double>(budget)));
    return values[static_cast<std::size_t>(std::max<std::int64_t>(rank, 1) - 1)];
}

} // namespace

double var_aggregate(const AggregationFn& f, const GammaCoupling& coupling,
                     double alpha, std::int64_t mc_budget, std::uint64_t seed) {
    require(alpha > 0.0 && alpha < 1.0, "var_aggregate: alpha must lie in (0,1)");
    require(static_cast<int>(coupling.marginals.size()) == f.arity(),
            "var_aggregate: coupling dimension must match the aggregation arity");
    const double gamma = coupling.gamma;
    // On the tail plateau the worst-case VaR is the comonotone value, exactly.
    if (alpha >= gamma) return q_alpha(f, coupling.marginals, alpha);

    const double level = alpha / gamma;
    if (f.is_weighted_sum()) {
        bool all_bernoulli = true;
        for (const MarginalDist& m : coupling.marginals)
            if (m.kind() != MarginalDist::Kind::bernoulli) all_bernoulli = false;
        if (all_bernoulli) {
            const std::vector<double>& w = f.weights();
            const int n = coupling.dim();
            // Homogeneous portfolio: exact binomial quantile.
            bool homogeneous = true;
            for (int i = 1; i < n; ++i)
                if (w[static_cast<std::size_t>(i)] != w[0] ||
                    coupling.marginals[static_cast<std::size_t>(i)].param_p() !=
                        coupling.marginals[0].param_p())
                    homogeneous = false;
            if (homogeneous) {
                const double pg = pretail_p(coupling.marginals[0].param_p(), gamma);
                if (pg <= 0.0) return 0.0;  // pre-tail coordinates are surely 0
                return w[0] * static_cast<double>(binomial_var(n, pg, level));
            }
            // Heterogeneous: exact Poisson-binomial convolution while the
            // support stays manageable, Monte Carlo beyond.
            std::vector<double> pgs(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i)
                pgs[static_cast<std::size_t>(i)] = std::max(
                    0.0, pretail_p(coupling.marginals[static_cast<std::size_t>(i)].param_p(),
                                   gamma));
            try {
                const MarginalDist sum = weighted_bernoulli_sum_dist(w, pgs);
                return sum.quantile(level);
            } catch (const std::length_error&) {
                // fall through to Monte Carlo
            }
        }
    }
    require(mc_budget >= 1000, "var_aggregate: mc_budget must be >= 10^3");
    return mc_conditional_var(f, coupling, level, mc_budget, seed);
}

// ---------------------------------------------------------------------------
// expectiles / ratio asymptotics
// ---------------------------------------------------------------------------

double expectile_aggregate(const std::vector<double>& weights, const MarginalDist& dist,
                           double gamma, double alpha) {
    require(!weights.empty(), "expectile_aggregate: need at least one weight");
    require(gamma > 0.0 && gamma < 1.0, "expectile_aggregate: gamma must lie in (0,1)");
    require(alpha >= 0.5 && alpha < 1.0, "expectile_aggregate: alpha must lie in [1/2,1)");
    double total = 0.0;
    for (double w : weights) {
        require(w >= 0.0, "expectile_aggregate: weights must be non-negative");
        total += w;
    }
    const double e = expectile(dist, alpha);
    const double threshold = dist.quantile(gamma);
    // Additivity is only guaranteed on ex^alpha(mu) >= F^{-1}(gamma); the
    // comparison gets a hair of slack so exact-equality cases (e.g. the mean
    // at alpha = 1/2 against a quantile it equals) are not rejected for a
    // 1e-13 solver wobble.
    if (e < threshold - 1e-9 * std::max(1.0, std::abs(threshold)))
        throw std::domain_error(
            "expectile_aggregate: hypothesis not satisfied (ex^alpha(mu) < F^{-1}(gamma))");
    return e * total;
}

std::vector<std::pair<long long, double>> var_ratio_curve(
    double p, double gamma, double alpha, const std::vector<long long>& n_values) {
    require(p > 0.0 && p < 1.0, "var_ratio_curve: p must lie in (0,1)");
    require(gamma > 0.0 && gamma < 1.0, "var_ratio_curve: gamma must lie in (0,1)");
    require(alpha > 0.0 && alpha < 1.0, "var_ratio_curve: alpha must lie in (0,1)");
    require(gamma <= alpha, "var_ratio_curve: need gamma <= alpha");
    const double pg = pretail_p(p, gamma);
    require(pg > 0.0, "var_ratio_curve: need gamma > 1-p (positive pre-tail defaults)");
    std::vector<std::pair<long long, double>> curve;
    curve.reserve(n_values.size());
    for (long long n : n_values) {
        require(n >= 1, "var_ratio_curve: n values must be >= 1");
        // Numerator: worst-case VaR = q(alpha) = n, since alpha >= gamma > 1-p.
        const long long denom = binomial_var(n, pg, alpha);
        const double ratio = denom > 0
                                 ? static_cast<double>(n) / static_cast<double>(denom)
                                 : std::numeric_limits<double>::infinity();
        curve.emplace_back(n, ratio);
    }
    return curve;
}

RatioBounds ratio_bounds(const MarginalDist& dist, double alpha, double gamma) {
    require(alpha > 0.0 && alpha < 1.0, "ratio_bounds: alpha must lie in (0,1)");
    require(gamma > 0.0 && gamma < 1.0, "ratio_bounds: gamma must lie in (0,1)");
    require(alpha >= gamma, "ratio_bounds: need alpha >= gamma");
    const double pretail_mean = dist.integrate_quantile_power(0.0, gamma, 1) / gamma;
    require(pretail_mean > 0.0, "ratio_bounds: pre-tail mean must be positive");
    const double v = dist.quantile(alpha);
    const double head_mean = dist.integrate_quantile_power(0.0, alpha, 1) / alpha;
    const double mean = dist.moments().mean;
    return RatioBounds{v / head_mean, v / mean};
}

} // namespace tailrisk
