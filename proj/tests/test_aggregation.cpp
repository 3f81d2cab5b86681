#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "tailrisk/aggregation.hpp"
#include "tailrisk/coupling.hpp"
#include "tailrisk/marginal.hpp"
#include "tailrisk/risk_measures.hpp"

using tailrisk::AggregationFn;
using tailrisk::GammaCoupling;
using tailrisk::MarginalDist;

namespace {

GammaCoupling credit_coupling() {
    return GammaCoupling(0.999,
                         std::vector<MarginalDist>(1000, MarginalDist::bernoulli(0.01)));
}

AggregationFn unit_sum(int n) {
    return AggregationFn::weighted_sum(std::vector<double>(n, 1.0));
}

// Pre-tail default probability (gamma - 1 + p)/gamma of the conditional
// Bernoulli marginal.
constexpr double kCreditPg = 0.009 / 0.999;

} // namespace

TEST_SUITE("aggregation") {

TEST_CASE("comonotone value q_alpha") {
    const std::vector<MarginalDist> credit(1000, MarginalDist::bernoulli(0.01));
    CHECK(tailrisk::q_alpha(unit_sum(1000), credit, 0.999) == 1000.0);

    const std::vector<MarginalDist> pair = {MarginalDist::uniform01(),
                                            MarginalDist::uniform01()};
    CHECK(tailrisk::q_alpha(AggregationFn::weighted_sum({2.0, 3.0}), pair, 0.5) ==
          doctest::Approx(2.5).epsilon(1e-13));

    // n = 1 with unit weight reduces to the marginal quantile.
    for (double a : {0.1, 0.37, 0.9})
        CHECK(tailrisk::q_alpha(unit_sum(1), {MarginalDist::exponential(1.0)}, a) ==
              doctest::Approx(tailrisk::var(MarginalDist::exponential(1.0), a))
                  .epsilon(1e-14));

    CHECK_THROWS_AS(tailrisk::q_alpha(unit_sum(2), {MarginalDist::uniform01()}, 0.5),
                    std::invalid_argument);
}

TEST_CASE("binomial quantiles") {
    CHECK(tailrisk::binomial_var(1000, kCreditPg, 0.999) == 20);
    CHECK(tailrisk::binomial_var(1, 0.5, 0.6) == 1);
    CHECK(tailrisk::binomial_var(10, 1e-9, 0.999) == 0);
    CHECK_THROWS_AS(tailrisk::binomial_var(0, 0.5, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(tailrisk::binomial_var(10, 0.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(tailrisk::binomial_var(10, 0.5, 1.0), std::invalid_argument);
}

TEST_CASE("binomial quantile jumps sit at the exact cdf values") {
    // Cumulative probabilities of B(1000, 0.009/0.999) around the interesting
    // tail region, computed independently with exact-summation software.
    const std::vector<std::pair<long long, double>> cdf = {
        {12, 0.8761055795000282}, {13, 0.9266070641118155}, {14, 0.9589739247039154},
        {15, 0.9783155759425883}, {16, 0.9891403068915048}, {17, 0.9948363150485817},
        {18, 0.9976641817245446}, {19, 0.9989928731483703}, {20, 0.9995853487332671},
    };
    for (const auto& [k, F] : cdf) {
        CHECK(tailrisk::binomial_var(1000, kCreditPg, F - 1e-8) == k);
        CHECK(tailrisk::binomial_var(1000, kCreditPg, F + 1e-8) == k + 1);
    }
}

TEST_CASE("worst-case VaR of the credit portfolio") {
    const GammaCoupling c = credit_coupling();
    const AggregationFn f = unit_sum(1000);
    // On the plateau alpha >= gamma the comonotone value is exact.
    CHECK(tailrisk::var_aggregate(f, c, 0.999) == 1000.0);
    // Below gamma: the exact conditional binomial quantile at level alpha/gamma.
    CHECK(tailrisk::var_aggregate(f, c, 0.99) == 17.0);
    CHECK(tailrisk::var_aggregate(f, c, 0.99) ==
          static_cast<double>(tailrisk::binomial_var(1000, kCreditPg, 0.99 / 0.999)));
}

TEST_CASE("single-coordinate aggregation reduces to the marginal") {
    const GammaCoupling c(0.9, {MarginalDist::exponential(2.0)});
    for (double a : {0.9, 0.95, 0.99})
        CHECK(tailrisk::var_aggregate(unit_sum(1), c, a) ==
              doctest::Approx(tailrisk::var(MarginalDist::exponential(2.0), a))
                  .epsilon(1e-14));
}

TEST_CASE("heterogeneous Bernoulli portfolio, exact convolution path") {
    // gamma = 0.9, Bernoulli(0.3) and Bernoulli(0.5) with weights (1,2):
    // conditional defaults have p = 2/9 and 4/9, so the conditional sum W has
    // atoms {0,1,2,3} with probabilities {35,10,28,8}/81.  At alpha = 0.8 the
    // level is 8/9 = 72/81 and cum(2) = 73/81 crosses it: the answer is 2.
    const GammaCoupling c(0.9, {MarginalDist::bernoulli(0.3), MarginalDist::bernoulli(0.5)});
    const AggregationFn f = AggregationFn::weighted_sum({1.0, 2.0});
    CHECK(tailrisk::var_aggregate(f, c, 0.8) == 2.0);

    // In-test enumeration oracle over the four conditional outcomes.
    const double p1 = 2.0 / 9.0, p2 = 4.0 / 9.0;
    std::vector<std::pair<double, double>> atoms = {{0.0, (1 - p1) * (1 - p2)},
                                                    {1.0, p1 * (1 - p2)},
                                                    {2.0, (1 - p1) * p2},
                                                    {3.0, p1 * p2}};
    std::sort(atoms.begin(), atoms.end());
    double cum = 0.0, q = 0.0;
    for (const auto& [v, pr] : atoms) {
        cum += pr;
        if (cum >= 0.8 / 0.9 - 1e-12) {
            q = v;
            break;
        }
    }
    CHECK(q == 2.0);
}

TEST_CASE("Monte Carlo path for non-Bernoulli marginals") {
    // Conditional marginals are Uniform(0, 0.5); their independent sum has
    // median 0.5, and alpha/gamma = 0.5.
    const GammaCoupling c(0.5, {MarginalDist::uniform01(), MarginalDist::uniform01()});
    const double v = tailrisk::var_aggregate(unit_sum(2), c, 0.25, 200000);
    CHECK(v == doctest::Approx(0.5).epsilon(0.01));
    CHECK_THROWS_AS(tailrisk::var_aggregate(unit_sum(2), c, 0.25, 999),
                    std::invalid_argument);
}

TEST_CASE("threshold identity versus the exact mixture law, binomial path") {
    // Two Bernoulli(1/2) coordinates at gamma = 0.6.  The aggregate law is the
    // explicit mixture 0.6 * Binomial(2, 1/6) + 0.4 * Dirac(2), so the VaR can
    // be read off the mixture cdf and compared against var_aggregate exactly.
    const GammaCoupling c(0.6, {MarginalDist::bernoulli(0.5), MarginalDist::bernoulli(0.5)});
    const AggregationFn f = unit_sum(2);
    const MarginalDist mixture = MarginalDist::discrete(
        {0.0, 1.0, 2.0}, {0.6 * 25.0 / 36.0, 0.6 * 10.0 / 36.0, 0.6 / 36.0 + 0.4});
    for (double a : {0.1, 0.3, 0.45, 0.5, 0.55, 0.62, 0.7, 0.9, 0.99})
        CHECK(tailrisk::var_aggregate(f, c, a) ==
              doctest::Approx(tailrisk::var(mixture, a)).epsilon(1e-14));
}

TEST_CASE("threshold identity versus the exact mixture law, convolution path") {
    // Three Bernoulli(0.3) coordinates with distinct weights (0.5, 1.5, 2) at
    // gamma = 0.8: conditional defaults are Bernoulli(1/8), the conditional
    // sum W has the 7-atom law below, and the aggregate is the mixture
    // 0.8 * W + 0.2 * Dirac(4).
    const std::vector<double> lambda = {0.5, 1.5, 2.0};
    const GammaCoupling c(0.8, std::vector<MarginalDist>(3, MarginalDist::bernoulli(0.3)));
    const AggregationFn f = AggregationFn::weighted_sum(lambda);

    const std::vector<double> vals = {0.0, 0.5, 1.5, 2.0, 2.5, 3.5, 4.0};
    const std::vector<double> w_probs = {343.0 / 512, 49.0 / 512, 49.0 / 512, 56.0 / 512,
                                         7.0 / 512,   7.0 / 512,  1.0 / 512};
    const MarginalDist w_expected = MarginalDist::discrete(vals, w_probs);
    const MarginalDist w_lib =
        tailrisk::weighted_bernoulli_sum_dist(lambda, {0.125, 0.125, 0.125});
    REQUIRE(w_lib.atom_values().size() == vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) {
        CHECK(w_lib.atom_values()[i] == doctest::Approx(vals[i]).epsilon(1e-14));
        CHECK(w_lib.atom_probs()[i] == doctest::Approx(w_probs[i]).epsilon(1e-13));
    }

    std::vector<double> mix_probs;
    for (double p : w_probs) mix_probs.push_back(0.8 * p);
    mix_probs.back() += 0.2; // the comonotone tail lands on f = 4
    const MarginalDist mixture = MarginalDist::discrete(vals, mix_probs);
    for (double a : {0.3, 0.5, 0.7, 0.75, 0.79, 0.85, 0.9, 0.99})
        CHECK(tailrisk::var_aggregate(f, c, a) ==
              doctest::Approx(tailrisk::var(mixture, a)).epsilon(1e-14));
    (void)w_expected;
}

TEST_CASE("positive homogeneity of the aggregate tail") {
    // For identical marginals and alpha >= gamma, VaR and ES of the weighted
    // sum are (sum of weights) times the marginal values, exactly.
    const std::vector<double> lambda = {0.5, 1.5, 2.0};
    const double total = 4.0;
    const GammaCoupling c(0.8, std::vector<MarginalDist>(3, MarginalDist::bernoulli(0.3)));
    const AggregationFn f = AggregationFn::weighted_sum(lambda);
    const std::vector<double> vals = {0.0, 0.5, 1.5, 2.0, 2.5, 3.5, 4.0};
    std::vector<double> mix_probs = {0.8 * 343.0 / 512, 0.8 * 49.0 / 512, 0.8 * 49.0 / 512,
                                     0.8 * 56.0 / 512,  0.8 * 7.0 / 512,  0.8 * 7.0 / 512,
                                     0.8 / 512 + 0.2};
    const MarginalDist mixture = MarginalDist::discrete(vals, mix_probs);
    const MarginalDist mu = MarginalDist::bernoulli(0.3);
    for (double a : {0.85, 0.9, 0.99}) {
        CHECK(tailrisk::var_aggregate(f, c, a) ==
              doctest::Approx(total * tailrisk::var(mu, a)).epsilon(1e-13));
        CHECK(tailrisk::es(mixture, a) ==
              doctest::Approx(total * tailrisk::es(mu, a)).epsilon(1e-12));
    }
}

TEST_CASE("sandwich inequality below the threshold") {
    // For alpha < gamma the worst-case VaR sits at level alpha/gamma, which
    // dominates the plain conditional VaR at level alpha.
    for (double a : {0.5, 0.7, 0.9, 0.95, 0.99, 0.995}) {
        const double worst =
            tailrisk::var_aggregate(unit_sum(1000), credit_coupling(), a);
        const double conditional =
            static_cast<double>(tailrisk::binomial_var(1000, kCreditPg, a));
        CHECK(worst >= conditional);
    }
    // Pinned equality points: the quantile does not move between levels alpha
    // and alpha/gamma at these alphas.
    CHECK(tailrisk::var_aggregate(unit_sum(1000), credit_coupling(), 0.9) == 13.0);
    CHECK(tailrisk::binomial_var(1000, kCreditPg, 0.9) == 13);
    CHECK(tailrisk::var_aggregate(unit_sum(1000), credit_coupling(), 0.995) == 18.0);
    CHECK(tailrisk::binomial_var(1000, kCreditPg, 0.995) == 18);
}

TEST_CASE("plateau identity at and above the threshold") {
    const GammaCoupling c = credit_coupling();
    const std::vector<MarginalDist> credit(1000, MarginalDist::bernoulli(0.01));
    for (double a : {0.999, 0.9993, 0.9995, 0.9999}) {
        CHECK(tailrisk::var_aggregate(unit_sum(1000), c, a) == 1000.0);
        CHECK(tailrisk::q_alpha(unit_sum(1000), credit, a) == 1000.0);
    }
}

TEST_CASE("expectile additivity") {
    // Bernoulli(0.5) at gamma = 0.4: F^{-1}(0.4) = 0, hypothesis holds, and
    // the alpha = 0.9 expectile is 0.9.
    CHECK(tailrisk::expectile_aggregate({1.0, 1.0, 1.0}, MarginalDist::bernoulli(0.5), 0.4,
                                        0.9) == doctest::Approx(2.7).epsilon(1e-10));
    // Uniform(0,1) at gamma = 0.5: expectile 0.75 >= 0.5.
    CHECK(tailrisk::expectile_aggregate({1.0, 2.0}, MarginalDist::uniform01(), 0.5, 0.9) ==
          doctest::Approx(2.25).epsilon(1e-10));
    // alpha = 1/2 is the mean case.
    CHECK(tailrisk::expectile_aggregate({1.0, 1.0}, MarginalDist::uniform01(), 0.3, 0.5) ==
          doctest::Approx(1.0).epsilon(1e-10));

    // Bernoulli(0.5) at gamma = 0.6: F^{-1}(0.6) = 1 exceeds every expectile
    // below alpha = 1, so the additivity hypothesis fails.
    CHECK_THROWS_WITH_AS(
        tailrisk::expectile_aggregate({1.0}, MarginalDist::bernoulli(0.5), 0.6, 0.9),
        doctest::Contains("hypothesis not satisfied"), std::domain_error);

    CHECK_THROWS_AS(
        tailrisk::expectile_aggregate({1.0}, MarginalDist::uniform01(), 0.5, 0.4),
        std::invalid_argument);
    CHECK_THROWS_AS(
        tailrisk::expectile_aggregate({-1.0}, MarginalDist::uniform01(), 0.5, 0.9),
        std::invalid_argument);
}

TEST_CASE("ratio curve of the homogeneous portfolio") {
    const auto single = tailrisk::var_ratio_curve(0.01, 0.999, 0.999, {1000});
    REQUIRE(single.size() == 1);
    CHECK(single[0].first == 1000);
    CHECK(single[0].second == doctest::Approx(50.0).epsilon(1e-12));

    const std::vector<long long> decades = {100, 1000, 10000, 100000, 1000000};
    const auto curve = tailrisk::var_ratio_curve(0.01, 0.999, 0.999, decades);
    REQUIRE(curve.size() == 5);
    CHECK(curve[0].second == doctest::Approx(100.0 / 5.0).epsilon(1e-12));
    CHECK(curve[1].second == doctest::Approx(50.0).epsilon(1e-12));
    CHECK(curve[2].second == doctest::Approx(10000.0 / 121.0).epsilon(1e-12));
    CHECK(curve[3].second == doctest::Approx(100000.0 / 995.0).epsilon(1e-12));
    CHECK(curve[4].second == doctest::Approx(1000000.0 / 9302.0).epsilon(1e-12));

    // First decade at which the ratio reaches the mean threshold of 100.
    long long first = -1;
    for (const auto& [n, r] : curve)
        if (r >= 100.0) {
            first = n;
            break;
        }
    CHECK(first == 100000);

    CHECK_THROWS_AS(tailrisk::var_ratio_curve(0.01, 0.999, 0.99, {1000}),
                    std::invalid_argument);
}

TEST_CASE("ratio bounds") {
    const auto credit = tailrisk::ratio_bounds(MarginalDist::bernoulli(0.01), 0.999, 0.999);
    CHECK(credit.limsup_bound == doctest::Approx(111.0).epsilon(1e-9));
    CHECK(credit.mean_threshold == doctest::Approx(100.0).epsilon(1e-9));

    const auto point = tailrisk::ratio_bounds(MarginalDist::dirac(3.0), 0.9, 0.5);
    CHECK(point.limsup_bound == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(point.mean_threshold == doctest::Approx(1.0).epsilon(1e-12));

    // Uniform(1,2) approximated by its 2000-point empirical midpoint grid:
    // VaR^0.9 = 1.89975 and (1/0.9) int_0^0.9 F^{-1} = 1.45 exactly, so the
    // bound is 1.89975/1.45, close to the continuous value 1.9/1.45 = 1.3103.
    std::vector<double> grid(2000);
    for (int k = 1; k <= 2000; ++k) grid[k - 1] = 1.0 + (k - 0.5) / 2000.0;
    const MarginalDist emp = MarginalDist::empirical(grid);
    const auto unif = tailrisk::ratio_bounds(emp, 0.9, 0.9);
    double head_sum = 0.0;
    for (int k = 1; k <= 1800; ++k) head_sum += grid[k - 1];
    const double expected = grid[1799] / ((1.0 / 0.9) * head_sum / 2000.0);
    CHECK(unif.limsup_bound == doctest::Approx(expected).epsilon(1e-12));
    CHECK(unif.limsup_bound == doctest::Approx(1.310).epsilon(5e-4));

    // The limsup bound is never below 1.
    const std::vector<MarginalDist> kinds = {MarginalDist::exponential(1.0),
                                             MarginalDist::uniform01(), emp};
    for (const auto& d : kinds)
        for (double a : {0.5, 0.9, 0.99})
            CHECK(tailrisk::ratio_bounds(d, a, a).limsup_bound >= 1.0 - 1e-12);
    // Bernoulli(0.3) needs gamma past its jump at u = 0.7 for a positive
    // pre-tail mean.
    for (double a : {0.9, 0.99})
        CHECK(tailrisk::ratio_bounds(MarginalDist::bernoulli(0.3), a, a).limsup_bound >=
              1.0 - 1e-12);

    // Pre-tail mean zero (gamma entirely below the Bernoulli jump) is not
    // admissible.
    CHECK_THROWS_AS(tailrisk::ratio_bounds(MarginalDist::bernoulli(0.01), 0.999, 0.5),
                    std::invalid_argument);
}

TEST_CASE("aggregation function plumbing") {
    const AggregationFn mx = AggregationFn::custom(
        [](const std::vector<double>& x) { return std::max(x[0], x[1]); }, 2);
    CHECK(mx({0.3, 0.7}) == 0.7);
    CHECK_FALSE(mx.is_weighted_sum());
    CHECK_THROWS_AS(mx.weights(), std::invalid_argument);
    CHECK(tailrisk::q_alpha(mx, {MarginalDist::uniform01(), MarginalDist::uniform01()},
                            0.5) == doctest::Approx(0.5).epsilon(1e-14));

    // A decreasing callable fails the monotonicity spot check.
    CHECK_THROWS_AS(AggregationFn::custom(
                        [](const std::vector<double>& x) { return -x[0] - x[1]; }, 2),
                    std::invalid_argument);

    CHECK_THROWS_AS(AggregationFn::weighted_sum({1.0, -0.5}), std::invalid_argument);
    CHECK_THROWS_AS(AggregationFn::weighted_sum({}), std::invalid_argument);
    CHECK_THROWS_AS(mx({0.1, 0.2, 0.3}), std::invalid_argument);

    const AggregationFn ws = AggregationFn::weighted_sum({2.0, 3.0});
    CHECK(ws.is_weighted_sum());
    REQUIRE(ws.weights().size() == 2);
    CHECK(ws({1.0, 1.0}) == 5.0);
}

TEST_CASE("weighted Bernoulli convolution") {
    const MarginalDist d = tailrisk::weighted_bernoulli_sum_dist({1.0, 2.0}, {0.3, 0.5});
    REQUIRE(d.atom_values().size() == 4);
    const std::vector<double> vals = {0.0, 1.0, 2.0, 3.0};
    const std::vector<double> probs = {0.35, 0.15, 0.35, 0.15};
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(d.atom_values()[i] == doctest::Approx(vals[i]).epsilon(1e-14));
        CHECK(d.atom_probs()[i] == doctest::Approx(probs[i]).epsilon(1e-14));
    }

    // Eleven powers of two give 2048 distinct sums, beyond a 1000-atom cap.
    std::vector<double> w;
    for (int k = 0; k < 11; ++k) w.push_back(std::pow(2.0, k));
    CHECK_THROWS_AS(
        tailrisk::weighted_bernoulli_sum_dist(w, std::vector<double>(11, 0.5), 1000),
        std::length_error);
}

} // TEST_SUITE
