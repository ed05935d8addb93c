#include "covertflow/dist.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace covertflow::dist {

double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) return -std::numeric_limits<double>::infinity();
        if (p == 1.0) return std::numeric_limits<double>::infinity();
        throw std::domain_error("norm_quantile: p outside (0,1)");
    }
    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                   1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                 1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                   5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                 4.2313330701600911252e1) * r + 1.0);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                    2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                  3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
              (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                    1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                  6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                    1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                  2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
              (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                    1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                  1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0.0 ? -val : val;
}

namespace {

// Continued fraction for the incomplete beta (Numerical Recipes betacf).
double beta_cf(double a, double b, double x) {
    const int max_iter = 300;
    const double eps = 3e-15;
    const double fpmin = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

} // namespace

double inc_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_cf(a, b, x) / a;
    }
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double inc_gamma_p(double a, double x) {
    if (x <= 0.0) return 0.0;
    if (x < a + 1.0) {
        // series representation
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int n = 0; n < 500; ++n) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 3e-15) break;
        }
        return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    // continued fraction for Q(a,x), Lentz
    const double fpmin = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 3e-15) break;
    }
    const double q = std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
    return 1.0 - q;
}

double t_cdf(double x, double nu) {
    if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
    if (std::fabs(x) < 1e-4) {
        // series around 0; the beta-ratio argument loses resolution here
        const double pdf0 = std::exp(std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                                     0.5 * std::log(nu * M_PI));
        return 0.5 + pdf0 * (x - (nu + 1.0) / (6.0 * nu) * x * x * x);
    }
    const double ib = inc_beta(0.5 * nu, 0.5, nu / (nu + x * x));
    return x >= 0.0 ? 1.0 - 0.5 * ib : 0.5 * ib;
}

double t_pdf(double x, double nu) { return std::exp(t_log_pdf(x, nu)); }

double t_log_pdf(double x, double nu) {
    return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
           0.5 * std::log(nu * M_PI) - 0.5 * (nu + 1.0) * std::log1p(x * x / nu);
}

double t_quantile(double p, double nu, double hint) {
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) return -std::numeric_limits<double>::infinity();
        if (p == 1.0) return std::numeric_limits<double>::infinity();
        throw std::domain_error("t_quantile: p outside (0,1)");
    }
    double x;
    if (std::isfinite(hint)) {
        x = hint;
    } else {
        // Hill's asymptotic expansion of the normal quantile
        const double z = norm_quantile(p);
        const double g1 = (z * z * z + z) / 4.0;
        const double g2 = (5.0 * std::pow(z, 5) + 16.0 * z * z * z + 3.0 * z) / 96.0;
        const double g3 = (3.0 * std::pow(z, 7) + 19.0 * std::pow(z, 5) +
                           17.0 * z * z * z - 15.0 * z) / 384.0;
        x = z + g1 / nu + g2 / (nu * nu) + g3 / (nu * nu * nu);
    }
    // Newton with a bisection safety net
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 60; ++it) {
        const double f = t_cdf(x, nu) - p;
        if (f == 0.0) return x;
        if (f > 0.0) hi = std::min(hi, x);
        else lo = std::max(lo, x);
        const double dfdx = t_pdf(x, nu);
        double step = f / std::max(dfdx, 1e-300);
        double xn = x - step;
        if (!(xn > lo && xn < hi)) {
            if (std::isinf(lo)) xn = hi - std::max(1.0, std::fabs(hi));
            else if (std::isinf(hi)) xn = lo + std::max(1.0, std::fabs(lo));
            else xn = 0.5 * (lo + hi);
        }
        if (std::fabs(xn - x) <= 1e-14 * (1.0 + std::fabs(x))) return xn;
        x = xn;
    }
    return x;
}

double chi2_cdf(double x, double k) {
    if (x <= 0.0) return 0.0;
    return inc_gamma_p(0.5 * k, 0.5 * x);
}

double chi2_quantile(double p, double k) {
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) return 0.0;
        throw std::domain_error("chi2_quantile: p outside (0,1)");
    }
    // Wilson-Hilferty start
    const double z = norm_quantile(p);
    const double c = 2.0 / (9.0 * k);
    double x = k * std::pow(1.0 - c + z * std::sqrt(c), 3);
    if (!(x > 0.0)) x = 0.5 * k;
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 80; ++it) {
        const double f = chi2_cdf(x, k) - p;
        if (f == 0.0) return x;
        if (f > 0.0) hi = std::min(hi, x);
        else lo = std::max(lo, x);
        const double pdf = std::exp((0.5 * k - 1.0) * std::log(x) - 0.5 * x -
                                    std::lgamma(0.5 * k) - 0.5 * k * M_LN2);
        double xn = x - f / std::max(pdf, 1e-300);
        if (!(xn > lo && xn < hi)) {
            xn = std::isinf(hi) ? 2.0 * std::max(x, 1.0) : 0.5 * (lo + hi);
        }
        if (std::fabs(xn - x) <= 1e-13 * (1.0 + std::fabs(x))) return xn;
        x = xn;
    }
    return x;
}

double f_cdf(double x, double d1, double d2) {
    if (x <= 0.0) return 0.0;
    return inc_beta(0.5 * d1, 0.5 * d2, d1 * x / (d1 * x + d2));
}

double f_quantile(double p, double d1, double d2) {
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) return 0.0;
        throw std::domain_error("f_quantile: p outside (0,1)");
    }
    double lo = 0.0, hi = 1.0;
    while (f_cdf(hi, d1, d2) < p) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) break;
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f_cdf(mid, d1, d2) < p) lo = mid;
        else hi = mid;
        if (hi - lo <= 1e-12 * (1.0 + hi)) break;
    }
    return 0.5 * (lo + hi);
}

Chi2QuantileTable::Chi2QuantileTable(double k, int grid) : k_(k), grid_(grid) {
    q_.resize(static_cast<size_t>(grid) + 1);
    for (int i = 0; i <= grid; ++i) {
        const double u = (i == 0)        ? 0.5 / grid
                         : (i == grid)   ? 1.0 - 0.5 / grid
                                         : static_cast<double>(i) / grid;
        q_[static_cast<size_t>(i)] = chi2_quantile(u, k);
    }
}

double Chi2QuantileTable::operator()(double u) const {
    const double lo_edge = 1.0 / grid_;
    if (u < lo_edge || u > 1.0 - lo_edge) return chi2_quantile(u, k_);
    const double t = u * grid_;
    const int i = std::min(static_cast<int>(t), grid_ - 1);
    const double frac = t - i;
    return q_[static_cast<size_t>(i)] * (1.0 - frac) + q_[static_cast<size_t>(i) + 1] * frac;
}

} // namespace covertflow::dist
