#include <doctest.h>

#include <cmath>

#include "covertflow/dist.hpp"
#include "oracles.hpp"

using namespace covertflow;

TEST_CASE("normal cdf and quantile agree with reference values") {
    CHECK(dist::norm_cdf(0.0) == doctest::Approx(0.5));
    CHECK(dist::norm_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-9));
    CHECK(dist::norm_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-9));
    CHECK(dist::norm_quantile(0.5) == doctest::Approx(0.0));
    for (double p : {1e-9, 1e-4, 0.01, 0.3, 0.5, 0.77, 0.999, 1.0 - 1e-9}) {
        const double x = dist::norm_quantile(p);
        CHECK(dist::norm_cdf(x) == doctest::Approx(p).epsilon(1e-10));
    }
}

TEST_CASE("incomplete beta satisfies the symmetry identity") {
    for (double a : {0.5, 2.0, 6.5}) {
        for (double b : {0.5, 1.5, 8.0}) {
            for (double x : {0.05, 0.3, 0.62, 0.95}) {
                CHECK(dist::inc_beta(a, b, x) ==
                      doctest::Approx(1.0 - dist::inc_beta(b, a, 1.0 - x)).epsilon(1e-11));
            }
        }
    }
}

TEST_CASE("chi-square cdf matches the closed form at 4 degrees of freedom") {
    // chi2(4): P(X <= x) = 1 - exp(-x/2) (1 + x/2)
    for (double x : {0.5, 2.0, 4.0, 9.488, 20.0}) {
        const double closed = 1.0 - std::exp(-0.5 * x) * (1.0 + 0.5 * x);
        CHECK(dist::chi2_cdf(x, 4.0) == doctest::Approx(closed).epsilon(1e-11));
    }
    CHECK(dist::chi2_quantile(0.95, 4.0) == doctest::Approx(9.487729036781154).epsilon(1e-8));
}

TEST_CASE("student t cdf matches numerical integration of its density") {
    for (double nu : {3.0, 7.0, 13.0}) {
        for (double x : {0.3, 1.1, 2.6}) {
            const double tail =
                oracle::simpson([nu](double t) { return dist::t_pdf(t, nu); }, 0.0, x, 4000);
            CHECK(dist::t_cdf(x, nu) == doctest::Approx(0.5 + tail).epsilon(1e-9));
        }
    }
}

TEST_CASE("student t quantile round-trips and hits the table value") {
    CHECK(dist::t_quantile(0.975, 5.0) == doctest::Approx(2.570581835636197).epsilon(1e-6));
    for (double nu : {3.0, 13.0, 50.0}) {
        double hint = std::numeric_limits<double>::quiet_NaN();
        for (double p : {0.001, 0.2, 0.5, 0.77, 0.999}) {
            const double q = dist::t_quantile(p, nu);
            CHECK(dist::t_cdf(q, nu) == doctest::Approx(p).epsilon(1e-10));
            // warm-started path must agree with the cold path
            hint = dist::t_quantile(p, nu, hint);
            CHECK(hint == doctest::Approx(q).epsilon(1e-12));
        }
    }
}

TEST_CASE("F distribution reduces to squared t and has median 1 when symmetric") {
    CHECK(dist::f_cdf(1.0, 6.0, 6.0) == doctest::Approx(0.5).epsilon(1e-10));
    const double nu = 13.0;
    for (double p : {0.6, 0.9, 0.99}) {
        const double t = dist::t_quantile(0.5 + 0.5 * p, nu);
        CHECK(dist::f_quantile(p, 1.0, nu) == doctest::Approx(t * t).epsilon(1e-7));
    }
}

TEST_CASE("chi-square quantile table interpolates the exact quantile") {
    dist::Chi2QuantileTable table(13.0);
    for (double u : {1e-5, 0.004, 0.1, 0.5, 0.93, 0.9999}) {
        CHECK(table(u) == doctest::Approx(dist::chi2_quantile(u, 13.0)).epsilon(5e-4));
    }
}
