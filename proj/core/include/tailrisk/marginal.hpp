#pragma once

#include <memory>
#include <vector>

namespace tailrisk {

// A one-dimensional loss distribution exposing the quantile-function calculus
// (cdf, left-continuous quantile, moments, exact integrals of powers of the
// quantile function) that all aggregation and calibration formulas consume.
//
// Public families: Bernoulli(p), Exponential(rate), Uniform01, Dirac(point),
// Empirical (equal-weight sample).  Two internal kinds keep everything exact:
//   - Discrete: arbitrary finite atom lists (backs Empirical and the exact
//     laws of weighted Bernoulli sums),
//   - Slice: the law of base.quantile(lo + (hi-lo)U) for U uniform, i.e. a
//     quantile reparameterization.  Tail distributions (lo = alpha, hi = 1)
//     and conditional pre-tail marginals (lo = 0, hi = gamma) are both
//     Slices.  Slices of Bernoulli/Dirac/Discrete collapse to named kinds at
//     construction, so a Slice node only ever wraps a continuous family.
//
// All quantile integrals are closed-form or exact finite sums; there is no
// adaptive quadrature anywhere in production paths.
class MarginalDist {
public:
    enum class Kind { bernoulli, exponential, uniform01, dirac, empirical, discrete, slice };

    // -- constructors -------------------------------------------------------
    static MarginalDist bernoulli(double p);          // p in (0,1)
    static MarginalDist exponential(double rate);     // rate > 0
    static MarginalDist uniform01();
    static MarginalDist dirac(double point);
    // Equal-weight empirical distribution of a (not necessarily sorted,
    // non-empty) sample; quantile(u) = value at 1-based index ceil(u*N) of
    // the sorted list.
    static MarginalDist empirical(std::vector<double> values);
    // Finite law with the given atoms; values need not be sorted or unique,
    // probabilities must be >= 0 and sum to 1 (within rounding).
    static MarginalDist discrete(std::vector<double> values, std::vector<double> probs);
    // Law of base.quantile(lo + (hi-lo)*U) for U ~ Uniform(0,1); 0 <= lo < hi <= 1.
    static MarginalDist slice(const MarginalDist& base, double lo, double hi);

    Kind kind() const { return kind_; }

    // -- core calculus ------------------------------------------------------
    // Left-continuous quantile F^{-1}(u) = inf{a : F(a) >= u}; u in (0,1).
    double quantile(double u) const;
    // Right-continuous cdf F(x) = P(X <= x).
    double cdf(double x) const;

    struct Moments {
        double mean;
        double variance;
    };
    Moments moments() const;

    // Exact value of \int_a^b (F^{-1}(u))^power du for power in {1,2} and
    // 0 <= a <= b <= 1 (improper endpoints handled in closed form).
    double integrate_quantile_power(double a, double b, int power) const;

    // -- parameter access (throws when the kind does not match) -------------
    double param_p() const;       // bernoulli
    double param_rate() const;    // exponential
    double param_point() const;   // dirac
    // Sorted unique atom values / probabilities (empirical and discrete).
    const std::vector<double>& atom_values() const;
    const std::vector<double>& atom_probs() const;

private:
    MarginalDist() = default;

    Kind kind_ = Kind::dirac;
    double a_ = 0.0;  // bernoulli p / exponential rate / dirac point / slice lo
    double b_ = 0.0;  // slice hi
    std::vector<double> values_;  // sorted unique atom values
    std::vector<double> probs_;   // atom probabilities
    std::vector<double> cum_;     // cumulative probabilities (same length)
    std::vector<double> pref1_;   // prefix sums of v*p   (for exact integrals)
    std::vector<double> pref2_;   // prefix sums of v^2*p
    std::shared_ptr<const MarginalDist> base_;  // slice base

    static MarginalDist make_discrete_sorted(std::vector<double> values,
                                             std::vector<double> probs);
    double discrete_integral(double a, double b, int power) const;
};

// Builds the empirical distribution of a sample (alias for
// MarginalDist::empirical, spelled as a free function for discoverability).
MarginalDist from_sample(const std::vector<double>& values);

} // namespace tailrisk
