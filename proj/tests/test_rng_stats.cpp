#include <doctest.h>

#include <cmath>
#include <limits>

#include "dagcheck/rng.hpp"
#include "dagcheck/stats.hpp"

using namespace dagcheck;

TEST_CASE("rng reproduces the same stream for the same seed") {
    Rng a(42), b(42), c(43);
    bool all_equal = true;
    bool any_diff = false;
    for (int k = 0; k < 100; ++k) {
        const auto va = a.next_u64();
        all_equal = all_equal && va == b.next_u64();
        any_diff = any_diff || va != c.next_u64();
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

TEST_CASE("derived streams are independent of each other") {
    Rng a = Rng::derived(7, 0);
    Rng b = Rng::derived(7, 1);
    int matches = 0;
    for (int k = 0; k < 64; ++k) {
        if (a.next_u64() == b.next_u64()) ++matches;
    }
    CHECK(matches == 0);
    CHECK(derive_seed(7, 0) != derive_seed(7, 1));
    CHECK(derive_seed(7, 0) == derive_seed(7, 0));
}

TEST_CASE("uniform_int covers its range uniformly enough") {
    Rng rng(11);
    std::vector<std::int64_t> counts(10, 0);
    for (int k = 0; k < 100000; ++k) {
        const int v = rng.uniform_int(3, 12);
        REQUIRE(v >= 3);
        REQUIRE(v <= 12);
        counts[static_cast<std::size_t>(v - 3)] += 1;
    }
    CHECK(chi_square_uniformity_pvalue(counts) > 0.001);
    CHECK(rng.uniform_int(5, 5) == 5);
    CHECK_THROWS_AS(rng.uniform_int(2, 1), std::invalid_argument);
}

TEST_CASE("normal draws have the right first two moments") {
    Rng rng(2718);
    const int n = 200000;
    double sum = 0.0, sum_sq = 0.0;
    for (int k = 0; k < n; ++k) {
        const double x = rng.normal();
        sum += x;
        sum_sq += x * x;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("uniform stays in [0, 1) and uniform_open in (0, 1)") {
    Rng rng(5);
    for (int k = 0; k < 10000; ++k) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        const double v = rng.uniform_open();
        REQUIRE(v > 0.0);
        REQUIRE(v < 1.0);
    }
}

TEST_CASE("normal_cdf and normal_quantile match reference values") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
    CHECK(normal_cdf(1.959963985) == doctest::Approx(0.975).epsilon(1e-9));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963985).epsilon(1e-9));
    CHECK(normal_quantile(0.995) == doctest::Approx(2.5758293035).epsilon(1e-9));
    CHECK(normal_two_sided_p(1.959963985) == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(normal_two_sided_p(std::numeric_limits<double>::infinity()) == 0.0);
}

TEST_CASE("gamma and chi-squared cdfs match reference values") {
    // Exponential(1): cdf(1) = 1 - e^-1.
    CHECK(gamma_cdf(1.0, 1.0, 1.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
    // Chi-squared(2) is Exponential(1/2).
    CHECK(chi_squared_cdf(2.0, 2.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
    CHECK(chi_squared_cdf(0.0, 3.0) == 0.0);
    // 95th percentile of chi-squared(5) is about 11.0705.
    CHECK(chi_squared_cdf(11.0705, 5.0) == doctest::Approx(0.95).epsilon(1e-4));
}

TEST_CASE("median") {
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 3.0, 2.0}) == doctest::Approx(2.5));
    CHECK(median({5.0}) == 5.0);
    CHECK_THROWS_AS(median({}), std::invalid_argument);
}

TEST_CASE("spearman correlation") {
    CHECK(spearman_correlation({1, 2, 3, 4, 5}, {2, 4, 6, 8, 10}) == doctest::Approx(1.0));
    CHECK(spearman_correlation({1, 2, 3, 4, 5}, {5, 4, 3, 2, 1}) == doctest::Approx(-1.0));
    // One adjacent swap on five points gives 0.9.
    CHECK(spearman_correlation({1, 2, 3, 4, 5}, {1, 3, 2, 4, 5}) == doctest::Approx(0.9));
    // Ties get average ranks.
    CHECK(spearman_correlation({1, 1, 2, 3}, {1, 1, 2, 3}) == doctest::Approx(1.0));
}

TEST_CASE("chi_square_uniformity_pvalue rejects a loaded die") {
    CHECK(chi_square_uniformity_pvalue({100, 100, 100, 100, 100, 100}) == doctest::Approx(1.0));
    CHECK(chi_square_uniformity_pvalue({600, 100, 100, 100, 100, 100}) < 1e-6);
}
