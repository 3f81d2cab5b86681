#include "tailrisk/marginal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace tailrisk {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

// Antiderivative of -ln(1-u):  (1-u)ln(1-u) + u, continuously extended to 1.
double exp_antideriv_1(double u) {
    if (u >= 1.0) return 1.0;
    const double l = std::log1p(-u);
    return (1.0 - u) * l + u;
}

// Antiderivative of (ln(1-u))^2:  -(1-u)((ln(1-u))^2 - 2 ln(1-u) + 2),
// continuously extended to 0 at u = 1.
double exp_antideriv_2(double u) {
    if (u >= 1.0) return 0.0;
    const double l = std::log1p(-u);
    return -(1.0 - u) * (l * l - 2.0 * l + 2.0);
}

} // namespace

// ---------------------------------------------------------------------------
// constructors
// ---------------------------------------------------------------------------

MarginalDist MarginalDist::bernoulli(double p) {
    require(p > 0.0 && p < 1.0, "bernoulli: p must lie in (0,1)");
    MarginalDist d;
    d.kind_ = Kind::bernoulli;
    d.a_ = p;
    return d;
}

MarginalDist MarginalDist::exponential(double rate) {
    require(rate > 0.0 && std::isfinite(rate), "exponential: rate must be positive");
    MarginalDist d;
    d.kind_ = Kind::exponential;
    d.a_ = rate;
    return d;
}

MarginalDist MarginalDist::uniform01() {
    MarginalDist d;
    d.kind_ = Kind::uniform01;
    return d;
}

MarginalDist MarginalDist::dirac(double point) {
    require(std::isfinite(point), "dirac: point must be finite");
    MarginalDist d;
    d.kind_ = Kind::dirac;
    d.a_ = point;
    return d;
}

MarginalDist MarginalDist::make_discrete_sorted(std::vector<double> values,
                                                std::vector<double> probs) {
    // values sorted ascending, probs positive; merges nothing, just finalizes.
    MarginalDist d;
    d.kind_ = Kind::discrete;
    d.values_ = std::move(values);
    d.probs_ = std::move(probs);
    const std::size_t n = d.values_.size();
    d.cum_.resize(n);
    d.pref1_.resize(n);
    d.pref2_.resize(n);
    double c = 0.0, s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        c += d.probs_[i];
        s1 += d.values_[i] * d.probs_[i];
        s2 += d.values_[i] * d.values_[i] * d.probs_[i];
        d.cum_[i] = c;
        d.pref1_[i] = s1;
        d.pref2_[i] = s2;
    }
    // Guard against rounding drift so quantile(u) is defined for every u<1.
    d.cum_[n - 1] = 1.0;
    return d;
}

MarginalDist MarginalDist::empirical(std::vector<double> values) {
    require(!values.empty(), "empirical: sample must be non-empty");
    for (double v : values)
        require(std::isfinite(v), "empirical: sample values must be finite");
    std::sort(values.begin(), values.end());
    // Merge duplicates into atoms with weight (multiplicity / N); the
    // quantile function is identical to the ceil(u*N) order-statistic rule.
    const double n = static_cast<double>(values.size());
    std::vector<double> vs, ps;
    std::vector<std::size_t> counts;
    for (std::size_t i = 0; i < values.size();) {
        std::size_t j = i;
        while (j < values.size() && values[j] == values[i]) ++j;
        vs.push_back(values[i]);
        ps.push_back(static_cast<double>(j - i) / n);
        counts.push_back(j);
        i = j;
    }
    MarginalDist d = make_discrete_sorted(std::move(vs), std::move(ps));
    d.kind_ = Kind::empirical;
    // Cumulative boundaries as single divisions count/N rather than running
    // sums: quantile(k/N) must land on the k-th order statistic, and additive
    // accumulation of 1/N can drift past that boundary by an ulp.
    for (std::size_t i = 0; i < counts.size(); ++i)
        d.cum_[i] = static_cast<double>(counts[i]) / n;
    d.cum_.back() = 1.0;
    return d;
}

MarginalDist MarginalDist::discrete(std::vector<double> values, std::vector<double> probs) {
    require(!values.empty(), "discrete: atom list must be non-empty");
    require(values.size() == probs.size(), "discrete: values/probs size mismatch");
    std::map<double, double> atoms;
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        require(std::isfinite(values[i]), "discrete: atom values must be finite");
        require(probs[i] >= 0.0, "discrete: probabilities must be non-negative");
        total += probs[i];
        if (probs[i] > 0.0) atoms[values[i]] += probs[i];
    }
    require(std::abs(total - 1.0) <= 1e-9, "discrete: probabilities must sum to 1");
    require(!atoms.empty(), "discrete: all atoms have zero probability");
    std::vector<double> vs, ps;
    vs.reserve(atoms.size());
    ps.reserve(atoms.size());
    for (const auto& [v, p] : atoms) {
        vs.push_back(v);
        ps.push_back(p / total);
    }
    return make_discrete_sorted(std::move(vs), std::move(ps));
}

MarginalDist MarginalDist::slice(const MarginalDist& base, double lo, double hi) {
    require(lo >= 0.0 && hi <= 1.0 && lo < hi, "slice: need 0 <= lo < hi <= 1");
    const double w = hi - lo;
    switch (base.kind_) {
        case Kind::dirac:
            return base;
        case Kind::bernoulli: {
            // base.quantile jumps from 0 to 1 at t = 1-p.
            const double t = 1.0 - base.a_;
            if (hi <= t) return dirac(0.0);
            if (lo >= t) return dirac(1.0);
            return bernoulli((hi - t) / w);
        }
        case Kind::slice:
            // Compose reparameterizations.
            return slice(*base.base_, base.a_ + (base.b_ - base.a_) * lo,
                         base.a_ + (base.b_ - base.a_) * hi);
        case Kind::empirical:
        case Kind::discrete: {
            // Exact renormalization of the atom masses onto (lo, hi).
            std::vector<double> vs, ps;
            double prev = 0.0;
            for (std::size_t i = 0; i < base.values_.size(); ++i) {
                const double c0 = std::clamp((prev - lo) / w, 0.0, 1.0);
                const double c1 = std::clamp((base.cum_[i] - lo) / w, 0.0, 1.0);
                if (c1 > c0) {
                    vs.push_back(base.values_[i]);
                    ps.push_back(c1 - c0);
                }
                prev = base.cum_[i];
            }
            if (vs.size() == 1) return dirac(vs.front());
            return make_discrete_sorted(std::move(vs), std::move(ps));
        }
        case Kind::uniform01:
        case Kind::exponential: {
            MarginalDist d;
            d.kind_ = Kind::slice;
            d.a_ = lo;
            d.b_ = hi;
            d.base_ = std::make_shared<MarginalDist>(base);
            return d;
        }
    }
    throw std::logic_error("slice: unreachable kind");
}

MarginalDist from_sample(const std::vector<double>& values) {
    return MarginalDist::empirical(values);
}

// ---------------------------------------------------------------------------
// quantile / cdf
// ---------------------------------------------------------------------------

double MarginalDist::quantile(double u) const {
    require(u > 0.0 && u < 1.0, "quantile: u must lie in (0,1)");
    switch (kind_) {
        case Kind::bernoulli:
            return u > 1.0 - a_ ? 1.0 : 0.0;
        case Kind::exponential:
            return -std::log1p(-u) / a_;
        case Kind::uniform01:
            return u;
        case Kind::dirac:
            return a_;
        case Kind::empirical:
        case Kind::discrete: {
            // First atom whose cumulative probability reaches u.
            const auto it = std::lower_bound(cum_.begin(), cum_.end(), u);
            return values_[static_cast<std::size_t>(it - cum_.begin())];
        }
        case Kind::slice:
            return base_->quantile(a_ + (b_ - a_) * u);
    }
    throw std::logic_error("quantile: unreachable kind");
}

double MarginalDist::cdf(double x) const {
    switch (kind_) {
        case Kind::bernoulli:
            if (x < 0.0) return 0.0;
            return x < 1.0 ? 1.0 - a_ : 1.0;
        case Kind::exponential:
            return x <= 0.0 ? 0.0 : -std::expm1(-a_ * x);
        case Kind::uniform01:
            return std::clamp(x, 0.0, 1.0);
        case Kind::dirac:
            return x >= a_ ? 1.0 : 0.0;
        case Kind::empirical:
        case Kind::discrete: {
            // Cumulative mass of atoms <= x.
            const auto it = std::upper_bound(values_.begin(), values_.end(), x);
            if (it == values_.begin()) return 0.0;
            return cum_[static_cast<std::size_t>(it - values_.begin()) - 1];
        }
        case Kind::slice:
            return std::clamp((base_->cdf(x) - a_) / (b_ - a_), 0.0, 1.0);
    }
    throw std::logic_error("cdf: unreachable kind");
}

// ---------------------------------------------------------------------------
// moments / integrals
// ---------------------------------------------------------------------------

MarginalDist::Moments MarginalDist::moments() const {
    switch (kind_) {
        case Kind::bernoulli:
            return {a_, a_ * (1.0 - a_)};
        case Kind::exponential:
            return {1.0 / a_, 1.0 / (a_ * a_)};
        case Kind::uniform01:
            return {0.5, 1.0 / 12.0};
        case Kind::dirac:
            return {a_, 0.0};
        case Kind::empirical:
        case Kind::discrete: {
            const double m = pref1_.back();
            const double s = pref2_.back();
            return {m, std::max(0.0, s - m * m)};
        }
        case Kind::slice: {
            const double m = integrate_quantile_power(0.0, 1.0, 1);
            const double s = integrate_quantile_power(0.0, 1.0, 2);
            return {m, std::max(0.0, s - m * m)};
        }
    }
    throw std::logic_error("moments: unreachable kind");
}

double MarginalDist::discrete_integral(double a, double b, int power) const {
    // The quantile is the step function u -> values_[i] on (cum_[i-1], cum_[i]];
    // integrate piece by piece using the prefix sums for the fully covered
    // middle and explicit overlaps for the (at most two) boundary atoms.
    double total = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const double lo = std::max(a, prev);
        const double hi = std::min(b, cum_[i]);
        if (hi > lo) {
            const double v = power == 1 ? values_[i] : values_[i] * values_[i];
            total += v * (hi - lo);
        }
        prev = cum_[i];
        if (prev >= b) break;
    }
    return total;
}

double MarginalDist::integrate_quantile_power(double a, double b, int power) const {
    require(power == 1 || power == 2, "integrate_quantile_power: power must be 1 or 2");
    require(a >= 0.0 && b <= 1.0 && a <= b,
            "integrate_quantile_power: need 0 <= a <= b <= 1");
    if (a == b) return 0.0;
    switch (kind_) {
        case Kind::bernoulli: {
            // quantile is the indicator of (1-p, 1); both powers integrate to
            // the overlap length.
            const double t = 1.0 - a_;
            return std::max(0.0, b - std::max(a, t));
        }
        case Kind::exponential: {
            const double s = power == 1 ? exp_antideriv_1(b) - exp_antideriv_1(a)
                                        : exp_antideriv_2(b) - exp_antideriv_2(a);
            return s / (power == 1 ? a_ : a_ * a_);
        }
        case Kind::uniform01:
            return power == 1 ? (b * b - a * a) / 2.0 : (b * b * b - a * a * a) / 3.0;
        case Kind::dirac:
            return (power == 1 ? a_ : a_ * a_) * (b - a);
        case Kind::empirical:
        case Kind::discrete:
            return discrete_integral(a, b, power);
        case Kind::slice: {
            // Change of variables v = lo + (hi-lo) u.
            const double w = b_ - a_;
            return base_->integrate_quantile_power(a_ + w * a, a_ + w * b, power) / w;
        }
    }
    throw std::logic_error("integrate_quantile_power: unreachable kind");
}

// ---------------------------------------------------------------------------
// parameter access
// ---------------------------------------------------------------------------

double MarginalDist::param_p() const {
    require(kind_ == Kind::bernoulli, "param_p: not a bernoulli distribution");
    return a_;
}

double MarginalDist::param_rate() const {
    require(kind_ == Kind::exponential, "param_rate: not an exponential distribution");
    return a_;
}

double MarginalDist::param_point() const {
    require(kind_ == Kind::dirac, "param_point: not a dirac distribution");
    return a_;
}

const std::vector<double>& MarginalDist::atom_values() const {
    require(kind_ == Kind::empirical || kind_ == Kind::discrete,
            "atom_values: distribution has no atom list");
    return values_;
}

const std::vector<double>& MarginalDist::atom_probs() const {
    require(kind_ == Kind::empirical || kind_ == Kind::discrete,
            "atom_probs: distribution has no atom list");
    return probs_;
}

} // namespace tailrisk
