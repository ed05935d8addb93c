#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "covertflow/errors.hpp"
#include "covertflow/rng.hpp"
#include "covertflow/tail_stats.hpp"
#include "oracles.hpp"

using namespace covertflow;

TEST_CASE("ccdf steps down from exactly one") {
    const auto steps = tail_stats::ccdf({1.0, 2.0, 3.0});
    REQUIRE(steps.size() == 3);
    CHECK(steps[0] == std::pair{1.0, 1.0});
    CHECK(steps[1].second == doctest::Approx(2.0 / 3.0));
    CHECK(steps[2].second == doctest::Approx(1.0 / 3.0));

    const auto flat = tail_stats::ccdf({4.0, 4.0, 4.0});
    REQUIRE(flat.size() == 1);
    CHECK(flat[0] == std::pair{4.0, 1.0});

    CHECK_THROWS_AS(tail_stats::ccdf({}), EmptyInput);
}

TEST_CASE("pareto ccdf has log-log slope -(alpha-1)") {
    const auto sample = oracle::sample_pareto(2.5, 1.0, 200000, 42);
    const auto steps = tail_stats::ccdf(sample);
    std::vector<double> lx, ly;
    for (const auto& [x, p] : steps) {
        if (p < 1e-3) break; // drop the noisy extreme tail
        lx.push_back(std::log(x));
        ly.push_back(std::log(p));
    }
    CHECK(oracle::ls_slope(lx, ly) == doctest::Approx(-(2.5 - 1.0)).epsilon(0.03));
}

TEST_CASE("power-law fit recovers the sampling exponent") {
    for (double alpha : {2.23, 2.61}) {
        const auto sample = oracle::sample_pareto(alpha, 1.0, 100000,
                                                  0x5eedULL + static_cast<std::uint64_t>(alpha * 100));
        const auto fit = tail_stats::fit_power_law(sample);
        CHECK(std::fabs(fit.alpha - alpha) < 0.05);
        CHECK(fit.n_tail >= 50);
        CHECK(fit.ks_stat < 0.05);
    }
}

TEST_CASE("too few samples is an error") {
    CHECK_THROWS_AS(tail_stats::fit_power_law(oracle::sample_pareto(2.5, 1.0, 10, 7)),
                    InsufficientTail);
}

TEST_CASE("fit is scale invariant") {
    const auto sample = oracle::sample_pareto(2.4, 1.0, 50000, 99);
    auto scaled = sample;
    for (auto& v : scaled) v *= 1000.0;
    const auto f1 = tail_stats::fit_power_law(sample);
    const auto f2 = tail_stats::fit_power_law(scaled);
    CHECK(f2.alpha == doctest::Approx(f1.alpha).epsilon(1e-9));
    CHECK(f2.x_min == doctest::Approx(f1.x_min * 1000.0).epsilon(1e-9));
    CHECK(f2.n_tail == f1.n_tail);
}

TEST_CASE("parallel and serial fits agree bit for bit") {
    const auto sample = oracle::sample_pareto(2.2, 1.0, 30000, 123);
    const auto a = tail_stats::fit_power_law(sample);
    const auto b = tail_stats::fit_power_law_serial(sample);
    CHECK(a.alpha == b.alpha);
    CHECK(a.x_min == b.x_min);
    CHECK(a.n_tail == b.n_tail);
    CHECK(a.ks_stat == b.ks_stat);
}

TEST_CASE("estimator error shrinks like sqrt(n)") {
    // quadrupling n should roughly halve the spread of alpha-hat
    auto spread = [](size_t n, std::uint64_t salt) {
        std::vector<double> alphas;
        for (std::uint64_t s = 0; s < 24; ++s) {
            const auto fit =
                tail_stats::fit_power_law(oracle::sample_pareto(2.5, 1.0, n, salt + s * 7919));
            alphas.push_back(fit.alpha);
        }
        double mean = 0.0;
        for (double a : alphas) mean += a;
        mean /= static_cast<double>(alphas.size());
        double var = 0.0;
        for (double a : alphas) var += (a - mean) * (a - mean);
        return std::sqrt(var / static_cast<double>(alphas.size() - 1));
    };
    const double s1 = spread(10000, 1000);
    const double s2 = spread(40000, 2000);
    CHECK(s1 / s2 > 1.4);
    CHECK(s1 / s2 < 3.0);
}

TEST_CASE("ratio transform maps distance-to-one onto an unbounded proxy") {
    const auto out = tail_stats::ratio_tail_transform({0.0, 0.9});
    CHECK(out[0] == doctest::Approx(1.0));
    CHECK(out[1] == doctest::Approx(10.0));
    CHECK_THROWS_AS(tail_stats::ratio_tail_transform({1.0}), ValidationError);
    CHECK_THROWS_AS(tail_stats::ratio_tail_transform({-0.1}), ValidationError);
}

TEST_CASE("kendall tau endpoints") {
    const std::vector<double> x{1, 2, 3, 4, 5};
    const std::vector<double> rev{9, 7, 5, 3, 1};
    CHECK(tail_stats::kendall_tau(x, x) == doctest::Approx(1.0));
    CHECK(tail_stats::kendall_tau(x, rev) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(tail_stats::kendall_tau({1, 2}, {1}), LengthMismatch);
}

TEST_CASE("merge-sort tau equals the quadratic tally on 1000 random cases") {
    Xoshiro256pp rng(2024);
    for (int rep = 0; rep < 1000; ++rep) {
        const size_t n = 2 + rng.below(49);
        std::vector<double> x(n), y(n);
        const bool heavy_ties = rep % 2 == 0;
        for (size_t i = 0; i < n; ++i) {
            // small integer support produces plenty of ties
            x[i] = heavy_ties ? static_cast<double>(rng.below(5)) : rng.uniform01();
            y[i] = heavy_ties ? static_cast<double>(rng.below(4)) : rng.uniform01();
        }
        const double fast = tail_stats::kendall_tau(x, y);
        const double slow = oracle::kendall_tau_bruteforce(x, y);
        CHECK(fast == doctest::Approx(slow).epsilon(1e-12));
    }
}

TEST_CASE("tau is invariant under strictly increasing transforms") {
    Xoshiro256pp rng(77);
    std::vector<double> x(400), y(400);
    for (size_t i = 0; i < x.size(); ++i) {
        x[i] = rng.uniform(0.1, 10.0);
        y[i] = x[i] + rng.uniform(-2.0, 2.0);
    }
    auto ex = x, ey = y;
    for (auto& v : ex) v = std::exp(v);
    for (auto& v : ey) v = std::cbrt(v);
    CHECK(tail_stats::kendall_tau(x, y) ==
          doctest::Approx(tail_stats::kendall_tau(ex, ey)).epsilon(1e-12));
}

TEST_CASE("tau matrix is symmetric with unit diagonal, parallel equals serial") {
    Xoshiro256pp rng(5);
    std::vector<std::vector<double>> cols(4, std::vector<double>(500));
    for (auto& col : cols)
        for (auto& v : col) v = rng.uniform01();
    const auto m = tail_stats::kendall_tau_matrix(cols);
    const auto ms = tail_stats::kendall_tau_matrix_serial(cols);
    CHECK(m == ms);
    for (int i = 0; i < 4; ++i) {
        CHECK(m[static_cast<size_t>(i) * 4 + i] == 1.0);
        for (int j = 0; j < 4; ++j) {
            CHECK(m[static_cast<size_t>(i) * 4 + j] == m[static_cast<size_t>(j) * 4 + i]);
            CHECK(std::fabs(m[static_cast<size_t>(i) * 4 + j]) <= 1.0);
        }
    }
}

TEST_CASE("upper tail dependence: comonotone is 1, independent is 1-q") {
    std::vector<double> u(2000);
    for (size_t i = 0; i < u.size(); ++i) u[i] = (static_cast<double>(i) + 0.5) / 2000.0;
    CHECK(tail_stats::upper_tail_dependence(u, u, 0.95) == doctest::Approx(1.0).epsilon(0.02));

    Xoshiro256pp rng(31);
    const size_t n = 1000000;
    std::vector<double> a(n), b(n);
    for (size_t i = 0; i < n; ++i) {
        a[i] = rng.uniform01();
        b[i] = rng.uniform01();
    }
    // 3 binomial standard errors around (1-q)^2 / (1-q) = 0.05
    const double se = std::sqrt(0.0025 * (1.0 - 0.0025) / static_cast<double>(n)) / 0.05;
    const double lambda = tail_stats::upper_tail_dependence(a, b, 0.95);
    CHECK(std::fabs(lambda - 0.05) <= 3.0 * se);
}
