#pragma once
#include <cmath>
#include <vector>

// Scalar distribution kernels: normal, Student t, chi-square, F.
// Everything here is deterministic closed-form or iterative-to-convergence;
// no global state.
namespace covertflow::dist {

inline double norm_pdf(double x) {
    static const double inv_sqrt_2pi = 0.3989422804014326779;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

// Inverse normal CDF, Wichura's AS 241 (PPND16), |error| < 1e-15 on (0,1).
double norm_quantile(double p);

// Regularized incomplete beta I_x(a, b) via continued fraction (Lentz).
double inc_beta(double a, double b, double x);

// Regularized lower incomplete gamma P(a, x).
double inc_gamma_p(double a, double x);

double t_cdf(double x, double nu);
double t_pdf(double x, double nu);
double t_log_pdf(double x, double nu);

// Quantile of the Student t. `hint` (if finite) warm-starts the Newton
// iteration; sorted inputs chain hints for a large speedup.
double t_quantile(double p, double nu, double hint = std::numeric_limits<double>::quiet_NaN());

double chi2_cdf(double x, double k);
double chi2_quantile(double p, double k);

double f_cdf(double x, double d1, double d2);
double f_quantile(double p, double d1, double d2);

// Precomputed chi-square quantile grid for fast inverse-CDF sampling inside
// Monte Carlo loops. Exact quantile calls are used outside the grid range.
class Chi2QuantileTable {
public:
    Chi2QuantileTable() = default;
    explicit Chi2QuantileTable(double k, int grid = 4096);
    double operator()(double u) const;
    double dof() const { return k_; }

private:
    double k_ = 0.0;
    int grid_ = 0;
    std::vector<double> q_;
};

} // namespace covertflow::dist
