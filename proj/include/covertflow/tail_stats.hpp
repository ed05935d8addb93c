#pragma once
#include <cstddef>
#include <utility>
#include <vector>

// CCDF construction, Pareto-tail estimation (Hill MLE with KS-minimizing
// x_min selection) and rank dependence measures.
namespace covertflow::tail_stats {

struct TailFit {
    double x_min = 0.0;
    double alpha = 0.0; // density tail exponent; log-log CCDF slope is -(alpha-1)
    std::size_t n_tail = 0;
    double ks_stat = 1.0;
};

struct PowerLawOptions {
    std::size_t min_tail = 50;       // candidates must keep at least this many samples
    std::size_t max_candidates = 500; // log-spaced cap on distinct x_min candidates
};

// Sorted (x, P(X >= x)) steps; the first probability is exactly 1.
std::vector<std::pair<double, double>> ccdf(const std::vector<double>& samples);

// alpha-hat = 1 + n_tail / sum(ln(x_i / x_min)), x_min chosen to minimize the
// KS distance between the tail sample and the fitted Pareto.
TailFit fit_power_law(const std::vector<double>& samples, const PowerLawOptions& opts = {});
TailFit fit_power_law_serial(const std::vector<double>& samples, const PowerLawOptions& opts = {});

// Unbounded proxy 1/(1 - f2) whose Pareto exponent equals the exponent of the
// distance-to-one lower tail.
std::vector<double> ratio_tail_transform(const std::vector<double>& f2_samples);

// Tie-corrected tau_b via merge-sort counting, O(n log n).
double kendall_tau(const std::vector<double>& x, const std::vector<double>& y);

// columns are feature vectors of equal length; returns a dim x dim matrix.
std::vector<double> kendall_tau_matrix(const std::vector<std::vector<double>>& columns);
std::vector<double> kendall_tau_matrix_serial(const std::vector<std::vector<double>>& columns);

// lambda_hat_U(q) = P(u1 > q, u2 > q) / (1 - q)
double upper_tail_dependence(const std::vector<double>& u1, const std::vector<double>& u2,
                             double q);

} // namespace covertflow::tail_stats
