#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "tailrisk/coupling.hpp"
#include "tailrisk/marginal.hpp"
#include "tailrisk/rng.hpp"
#include "test_util.hpp"

using tailrisk::GammaCoupling;
using tailrisk::MarginalDist;

namespace {

double ks_statistic(std::vector<double> xs, const MarginalDist& d) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double ks = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = d.cdf(xs[i]);
        ks = std::max(ks, std::fabs(f - (i + 1) / n));
        ks = std::max(ks, std::fabs(f - i / n));
    }
    return ks;
}

} // namespace

TEST_SUITE("coupling") {

TEST_CASE("copula examples") {
    CHECK(tailrisk::copula_value(0.5, {0.6, 0.8}) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(tailrisk::copula_value(0.5, {0.2, 0.3}) == doctest::Approx(0.12).epsilon(1e-15));
    CHECK(tailrisk::copula_value(0.5, {1.0, 0.7}) == doctest::Approx(0.7).epsilon(1e-15));
}

TEST_CASE("copula input validation") {
    CHECK_THROWS_AS(tailrisk::copula_value(0.0, {0.5}), std::invalid_argument);
    CHECK_THROWS_AS(tailrisk::copula_value(1.0, {0.5}), std::invalid_argument);
    CHECK_THROWS_AS(tailrisk::copula_value(0.5, {}), std::invalid_argument);
    CHECK_THROWS_AS(tailrisk::copula_value(0.5, {-0.1, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(tailrisk::copula_value(0.5, {0.5, 1.1}), std::invalid_argument);
}

TEST_CASE("copula axioms on a bivariate grid") {
    const int m = 21; // grid points per axis, includes 0 and 1
    for (double gamma : {0.3, 0.7, 0.999}) {
        std::vector<double> grid(m);
        for (int k = 0; k < m; ++k) grid[k] = k / double(m - 1);
        // Groundedness and uniform margins.
        for (double u : grid) {
            CHECK(tailrisk::copula_value(gamma, {0.0, u}) == 0.0);
            CHECK(tailrisk::copula_value(gamma, {u, 0.0}) == 0.0);
            CHECK(tailrisk::copula_value(gamma, {u, 1.0}) ==
                  doctest::Approx(u).epsilon(1e-14));
            CHECK(tailrisk::copula_value(gamma, {1.0, u}) ==
                  doctest::Approx(u).epsilon(1e-14));
        }
        // 2-increasing: every rectangle has nonnegative volume.
        for (int i = 0; i + 1 < m; ++i) {
            for (int j = 0; j + 1 < m; ++j) {
                const double vol = tailrisk::copula_value(gamma, {grid[i + 1], grid[j + 1]}) -
                                   tailrisk::copula_value(gamma, {grid[i], grid[j + 1]}) -
                                   tailrisk::copula_value(gamma, {grid[i + 1], grid[j]}) +
                                   tailrisk::copula_value(gamma, {grid[i], grid[j]});
                CHECK(vol >= -1e-12);
            }
        }
    }
}

TEST_CASE("copula axioms on a trivariate grid") {
    const int m = 11;
    std::vector<double> grid(m);
    for (int k = 0; k < m; ++k) grid[k] = k / double(m - 1);
    for (double gamma : {0.3, 0.7, 0.999}) {
        for (double u : grid) {
            CHECK(tailrisk::copula_value(gamma, {u, 1.0, 1.0}) ==
                  doctest::Approx(u).epsilon(1e-14));
            CHECK(tailrisk::copula_value(gamma, {0.0, u, u}) == 0.0);
        }
        // n-increasing: alternating corner sums of every cell are >= 0.
        for (int i = 0; i + 1 < m; ++i)
            for (int j = 0; j + 1 < m; ++j)
                for (int k = 0; k + 1 < m; ++k) {
                    // Inclusion-exclusion: corner sign is (-1)^(#lower endpoints).
                    double vol = 0.0;
                    for (int c = 0; c < 8; ++c) {
                        const double u1 = (c & 1) ? grid[i + 1] : grid[i];
                        const double u2 = (c & 2) ? grid[j + 1] : grid[j];
                        const double u3 = (c & 4) ? grid[k + 1] : grid[k];
                        const int uppers = (c & 1) + ((c >> 1) & 1) + ((c >> 2) & 1);
                        const double sign = (3 - uppers) % 2 == 0 ? 1.0 : -1.0;
                        vol += sign * tailrisk::copula_value(gamma, {u1, u2, u3});
                    }
                    CHECK(vol >= -1e-12);
                }
    }
}

TEST_CASE("lower orthant order across thresholds") {
    CHECK(tailrisk::lower_orthant_dominates(0.9, 0.5, 2, 101));
    CHECK(tailrisk::lower_orthant_dominates(0.5, 0.5, 3, 21));
    CHECK_THROWS_AS(tailrisk::lower_orthant_dominates(0.5, 0.9, 2, 21),
                    std::invalid_argument);
    const std::vector<double> gs = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    for (double lo : gs)
        for (double hi : gs)
            if (lo <= hi) CHECK(tailrisk::lower_orthant_dominates(hi, lo, 2, 41));
}

TEST_CASE("sampler preserves a single marginal") {
    const GammaCoupling c(0.35, {MarginalDist::exponential(1.0)});
    const auto xs = tailrisk::sample(c, 100000, 1234);
    CHECK(ks_statistic(xs, MarginalDist::exponential(1.0)) < 0.01);
}

TEST_CASE("pre-tail coordinates are conditionally independent") {
    // Bernoulli(0.01) pair at gamma = 0.999: conditional on the pre-tail
    // event both coordinates are independent Bernoulli((gamma-1+p)/gamma).
    const double gamma = 0.999;
    const double pg = 0.009 / 0.999;
    const GammaCoupling c(gamma, {MarginalDist::bernoulli(0.01), MarginalDist::bernoulli(0.01)});
    const std::int64_t n = 1000000;
    std::vector<double> u;
    const auto xs = tailrisk::sample(c, n, 77, &u);
    std::int64_t pre = 0, both = 0;
    for (std::int64_t r = 0; r < n; ++r) {
        if (u[r] <= gamma) {
            ++pre;
            if (xs[2 * r] == 1.0 && xs[2 * r + 1] == 1.0) ++both;
        }
    }
    const double target = pg * pg;
    const double se = std::sqrt(target * (1.0 - target) / static_cast<double>(pre));
    CHECK(std::fabs(both / static_cast<double>(pre) - target) <= 3.0 * se);
}

TEST_CASE("tail rows are exactly comonotone") {
    const double gamma = 0.5;
    const GammaCoupling c(gamma, {MarginalDist::uniform01(), MarginalDist::uniform01(),
                                  MarginalDist::uniform01()});
    std::vector<double> u;
    const auto xs = tailrisk::sample(c, 20000, 99, &u);
    std::int64_t tail_rows = 0;
    for (std::size_t r = 0; r < u.size(); ++r) {
        if (u[r] > gamma) {
            ++tail_rows;
            CHECK(xs[3 * r] == u[r]);
            CHECK(xs[3 * r + 1] == xs[3 * r]);
            CHECK(xs[3 * r + 2] == xs[3 * r]);
        }
    }
    CHECK(tail_rows > 9000); // roughly half the rows
}

TEST_CASE("pre-tail coordinates never exceed the gamma-quantile") {
    const double gamma = 0.5;
    const std::vector<MarginalDist> ms = {MarginalDist::exponential(1.0),
                                          MarginalDist::uniform01(),
                                          MarginalDist::bernoulli(0.2)};
    const GammaCoupling c(gamma, ms);
    std::vector<double> u;
    const auto xs = tailrisk::sample(c, 20000, 4242, &u);
    for (std::size_t r = 0; r < u.size(); ++r) {
        if (u[r] <= gamma) {
            for (int i = 0; i < 3; ++i) {
                CHECK(xs[3 * r + i] <= ms[i].quantile(gamma));
            }
        }
    }
}

TEST_CASE("conditional marginal closed forms") {
    const GammaCoupling high(0.999, {MarginalDist::bernoulli(0.01)});
    const MarginalDist mh = tailrisk::conditional_marginal(high, 0);
    REQUIRE(mh.kind() == MarginalDist::Kind::bernoulli);
    CHECK(mh.param_p() == doctest::Approx(0.009 / 0.999).epsilon(1e-12));

    const GammaCoupling low(0.5, {MarginalDist::bernoulli(0.01)});
    const MarginalDist ml = tailrisk::conditional_marginal(low, 0);
    REQUIRE(ml.kind() == MarginalDist::Kind::dirac);
    CHECK(ml.param_point() == 0.0);

    const GammaCoupling unif(0.6, {MarginalDist::uniform01()});
    const MarginalDist mu = tailrisk::conditional_marginal(unif, 0);
    for (double u : {0.1, 0.5, 0.9})
        CHECK(mu.quantile(u) == doctest::Approx(0.6 * u).epsilon(1e-14));

    const GammaCoupling point(0.3, {MarginalDist::dirac(7.0)});
    const MarginalDist mp = tailrisk::conditional_marginal(point, 0);
    REQUIRE(mp.kind() == MarginalDist::Kind::dirac);
    CHECK(mp.param_point() == 7.0);

    CHECK_THROWS_AS(tailrisk::conditional_marginal(high, 1), std::invalid_argument);
    CHECK_THROWS_AS(tailrisk::conditional_marginal(high, -1), std::invalid_argument);
}

TEST_CASE("comonotone sampler") {
    // All coordinates share the row uniform, so equal marginals give equal
    // coordinates bitwise.
    const auto rows = tailrisk::comonotone_sample(
        {MarginalDist::uniform01(), MarginalDist::uniform01()}, 5000, 11);
    for (std::size_t r = 0; r < 5000; ++r) CHECK(rows[2 * r] == rows[2 * r + 1]);

    // For Bernoulli(0.5) and Bernoulli(0.2): both are 1 iff U > 0.8.
    const auto br = tailrisk::comonotone_sample(
        {MarginalDist::bernoulli(0.5), MarginalDist::bernoulli(0.2)}, 100000, 12);
    std::int64_t both = 0;
    for (std::size_t r = 0; r < 100000; ++r)
        if (br[2 * r] == 1.0 && br[2 * r + 1] == 1.0) ++both;
    const double se = std::sqrt(0.2 * 0.8 / 100000.0);
    CHECK(std::fabs(both / 100000.0 - 0.2) <= 3.0 * se);

    const auto ex = tailrisk::comonotone_sample({MarginalDist::exponential(1.0)}, 100000, 13);
    CHECK(ks_statistic(ex, MarginalDist::exponential(1.0)) < 0.01);
}

TEST_CASE("sample CSV output") {
    const GammaCoupling c(0.5, {MarginalDist::uniform01(), MarginalDist::exponential(1.0)});
    const std::string path = testutil::scratch_path("coupling_csv");
    const std::uint64_t seed = 2024;
    tailrisk::write_sample_csv(c, 10, seed, path);
    const auto lines = testutil::read_lines(path);
    REQUIRE(lines.size() == 11);
    CHECK(lines[0] == "u,x1,x2");
    const auto fields = testutil::split(lines[1], ',');
    REQUIRE(fields.size() == 3);
    CHECK(std::stod(fields[0]) ==
          doctest::Approx(tailrisk::rng::uniform01(seed, 0, 0)).epsilon(1e-12));
    testutil::remove_file(path);
}

TEST_CASE("constructor validation") {
    CHECK_THROWS_AS(GammaCoupling(0.0, {MarginalDist::uniform01()}), std::invalid_argument);
    CHECK_THROWS_AS(GammaCoupling(1.0, {MarginalDist::uniform01()}), std::invalid_argument);
    CHECK_THROWS_AS(GammaCoupling(0.5, {}), std::invalid_argument);
    const GammaCoupling ok(0.5, {MarginalDist::uniform01(), MarginalDist::dirac(1.0)});
    CHECK(ok.dim() == 2);
}

} // TEST_SUITE
