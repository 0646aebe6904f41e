#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "oracle_helpers.hpp"
#include "survkit/common.hpp"
#include "survkit/rng.hpp"
#include "survkit/special.hpp"

using namespace survkit;

TEST_CASE("regularized incomplete gamma halves sum to one") {
    for (double a : {0.3, 0.5, 1.0, 2.5, 7.0, 25.0})
        for (double x : {0.01, 0.4, 1.0, 3.0, 10.0, 40.0})
            CHECK(regularized_gamma_p(a, x) + regularized_gamma_q(a, x) ==
                  doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("regularized gamma closed forms at shape one") {
    // P(1, x) is the exponential CDF.
    for (double x : {0.1, 0.7, 2.0, 5.0})
        CHECK(regularized_gamma_p(1.0, x) == doctest::Approx(1.0 - std::exp(-x)).epsilon(1e-12));
}

TEST_CASE("chi-squared tail matches closed forms for one and two degrees") {
    for (double x : {0.2, 1.0, 3.84, 9.0}) {
        CHECK(chi_squared_sf(x, 2.0) == doctest::Approx(std::exp(-0.5 * x)).epsilon(1e-12));
        CHECK(chi_squared_sf(x, 1.0) ==
              doctest::Approx(2.0 * normal_sf(std::sqrt(x))).epsilon(1e-10));
    }
    CHECK(chi_squared_sf(0.0, 3.0) == 1.0);
    CHECK(chi_squared_sf(-1.0, 3.0) == 1.0);
}

TEST_CASE("chi-squared tail matches an adaptive-quadrature oracle up to ten degrees") {
    for (int df = 1; df <= 10; ++df) {
        const double a = 0.5 * df;
        const double norm = std::exp(-a * std::log(2.0) - log_gamma(a));
        auto pdf = [&](double t) { return norm * std::pow(t, a - 1.0) * std::exp(-0.5 * t); };
        for (double x : {0.5, 2.0, 5.0, 12.0}) {
            // Integrate the upper tail out to where the density is negligible.
            const double upper = x + 90.0;
            const double oracle = testkit::integrate(pdf, x, upper, 1e-14);
            CHECK(chi_squared_sf(x, df) == doctest::Approx(oracle).epsilon(1e-8));
        }
    }
}

TEST_CASE("normal tail is symmetric and anchored at zero") {
    CHECK(normal_sf(0.0) == doctest::Approx(0.5));
    for (double z : {0.5, 1.0, 1.96, 3.0}) {
        CHECK(normal_sf(z) + normal_cdf(-z) == doctest::Approx(2.0 * normal_sf(z)).epsilon(1e-12));
        CHECK(normal_sf(-z) == doctest::Approx(1.0 - normal_sf(z)).epsilon(1e-12));
    }
    CHECK(normal_sf(1.959963984540054) == doctest::Approx(0.025).epsilon(1e-9));
}

TEST_CASE("log gamma reproduces factorials") {
    double f = 1.0;
    for (int k = 1; k <= 10; ++k) {
        CHECK(log_gamma(static_cast<double>(k)) == doctest::Approx(std::log(f)).epsilon(1e-12));
        f *= k;
    }
    CHECK(log_gamma(0.5) == doctest::Approx(0.5 * std::log(M_PI)).epsilon(1e-12));
}

TEST_CASE("pairwise sum equals the naive sum") {
    Rng rng(7);
    std::vector<double> x(1003);
    for (auto& v : x) v = rng.normal();
    const double naive = std::accumulate(x.begin(), x.end(), 0.0);
    CHECK(pairwise_sum(x) == doctest::Approx(naive).epsilon(1e-12));
    CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
    CHECK(pairwise_sum(std::vector<double>{3.25}) == 3.25);
}

TEST_CASE("quantile interpolates order statistics linearly") {
    std::vector<double> x = {4.0, 1.0, 3.0, 2.0};
    CHECK(quantile(x, 0.0) == 1.0);
    CHECK(quantile(x, 1.0) == 4.0);
    CHECK(quantile(x, 0.5) == doctest::Approx(2.5));
    // Against a direct order-statistics oracle on a larger sample.
    Rng rng(11);
    std::vector<double> y(101);
    for (auto& v : y) v = rng.uniform();
    std::vector<double> sorted = y;
    std::sort(sorted.begin(), sorted.end());
    for (double q : {0.025, 0.25, 0.5, 0.9, 0.975}) {
        const double h = 100.0 * q;
        const std::size_t lo = static_cast<std::size_t>(std::floor(h));
        const double w = h - static_cast<double>(lo);
        const double oracle = (1.0 - w) * sorted[lo] + w * sorted[std::min<std::size_t>(lo + 1, 100)];
        CHECK(quantile(y, q) == doctest::Approx(oracle).epsilon(1e-14));
    }
    CHECK_THROWS_AS(quantile({}, 0.5), NumericError);
    CHECK_THROWS_AS(quantile({1.0}, 1.5), NumericError);
}

TEST_CASE("fnv1a matches published test vectors") {
    CHECK(fnv1a64("", 0) == 0xcbf29ce484222325ull);
    CHECK(fnv1a64("a", 1) == 0xaf63dc4c8601ec8cull);
    CHECK(fnv1a64("foobar", 6) == 0x85944171f73967e8ull);
    CHECK(fnv1a64_hex("") == "cbf29ce484222325");
}

TEST_CASE("number formatting is stable and round-trip exact") {
    CHECK(fmt_num(4.0) == "4");
    CHECK(fmt_num(0.75) == "0.75");
    CHECK(fmt_num(0.375) == "0.375");
    CHECK(fmt_num(-2.5) == "-2.5");
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        const double v = rng.normal() * std::pow(10.0, static_cast<int>(rng.uniform_int(7)) - 3);
        CHECK(fmt_num(v) == fmt_num(v));
    }
}

TEST_CASE("seed derivation separates streams deterministically") {
    CHECK(derive_seed(42, 0) == derive_seed(42, 0));
    std::set<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 32; ++s) seen.insert(derive_seed(42, s));
    CHECK(seen.size() == 32);
    CHECK(derive_seed(42, 1) != derive_seed(43, 1));
}

TEST_CASE("rng streams are reproducible by seed") {
    Rng a(99), b(99), c(100);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 100; ++i) {
        const double u = a.uniform();
        all_equal = all_equal && u == b.uniform();
        any_diff = any_diff || u != c.uniform();
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

TEST_CASE("uniform variates stay inside the half-open unit interval") {
    Rng rng(5);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("uniform integers respect the bound and hit every value") {
    Rng rng(6);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 7000; ++i) ++counts[rng.uniform_int(7)];
    for (int k = 0; k < 7; ++k) CHECK(counts[k] > 800);
    CHECK_THROWS_AS(rng.uniform_int(0), NumericError);
}

TEST_CASE("sampler moments match their distributions") {
    Rng rng(2024);
    const int N = 200000;

    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < N; ++i) {
        const double z = rng.normal();
        sum += z;
        sq += z * z;
    }
    CHECK(sum / N == doctest::Approx(0.0).epsilon(0.01));
    CHECK(sq / N == doctest::Approx(1.0).epsilon(0.02));

    sum = 0.0;
    sq = 0.0;
    for (int i = 0; i < N; ++i) {
        const double g = rng.gamma(3.0, 2.0);
        sum += g;
        sq += g * g;
    }
    const double gm = sum / N;
    CHECK(gm == doctest::Approx(1.5).epsilon(0.02));          // shape/rate
    CHECK(sq / N - gm * gm == doctest::Approx(0.75).epsilon(0.05));  // shape/rate^2

    sum = 0.0;
    for (int i = 0; i < N; ++i) sum += rng.gamma(0.4, 1.0);
    CHECK(sum / N == doctest::Approx(0.4).epsilon(0.03));  // shape below one branch

    sum = 0.0;
    for (int i = 0; i < N; ++i) sum += rng.exponential(2.0);
    CHECK(sum / N == doctest::Approx(0.5).epsilon(0.02));

    sum = 0.0;
    for (int i = 0; i < N; ++i) sum += rng.inv_gamma(3.0, 2.0);
    CHECK(sum / N == doctest::Approx(1.0).epsilon(0.03));  // scale/(shape-1)

    sum = 0.0;
    for (int i = 0; i < N; ++i) sum += rng.beta(2.0, 3.0);
    CHECK(sum / N == doctest::Approx(0.4).epsilon(0.02));

    sum = 0.0;
    for (int i = 0; i < N; ++i) sum += rng.inverse_gaussian(2.0, 5.0);
    CHECK(sum / N == doctest::Approx(2.0).epsilon(0.03));
}

TEST_CASE("invalid sampler parameters are rejected") {
    Rng rng(1);
    CHECK_THROWS_AS(rng.exponential(0.0), NumericError);
    CHECK_THROWS_AS(rng.gamma(-1.0, 1.0), NumericError);
    CHECK_THROWS_AS(rng.gamma(1.0, 0.0), NumericError);
    CHECK_THROWS_AS(rng.inverse_gaussian(0.0, 1.0), NumericError);
}
