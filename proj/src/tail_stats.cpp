#include "covertflow/tail_stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "covertflow/errors.hpp"

namespace covertflow::tail_stats {

std::vector<std::pair<double, double>> ccdf(const std::vector<double>& samples) {
    if (samples.empty()) throw EmptyInput("ccdf: no samples");
    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    if (!(sorted.front() > 0.0)) throw ValidationError("ccdf: samples must be positive");
    const double n = static_cast<double>(sorted.size());
    std::vector<std::pair<double, double>> out;
    for (size_t i = 0; i < sorted.size(); ++i) {
        if (i > 0 && sorted[i] == sorted[i - 1]) continue;
        out.emplace_back(sorted[i], static_cast<double>(sorted.size() - i) / n);
    }
    return out;
}

namespace {

struct Candidate {
    size_t index;
    double x_min;
    double alpha;
    double ks;
    bool valid;
};

Candidate eval_candidate(const std::vector<double>& sorted, const std::vector<double>& suffix_log,
                         size_t idx) {
    Candidate c{idx, sorted[idx], 0.0, 1.0, false};
    const size_t n_tail = sorted.size() - idx;
    const double log_sum = suffix_log[idx] - static_cast<double>(n_tail) * std::log(sorted[idx]);
    if (!(log_sum > 0.0)) return c;
    c.alpha = 1.0 + static_cast<double>(n_tail) / log_sum;
    // KS distance between the empirical tail CDF and the fitted Pareto
    double ks = 0.0;
    const double exponent = 1.0 - c.alpha;
    for (size_t i = 0; i < n_tail; ++i) {
        const double model = 1.0 - std::pow(sorted[idx + i] / c.x_min, exponent);
        const double hi = static_cast<double>(i + 1) / static_cast<double>(n_tail);
        const double lo = static_cast<double>(i) / static_cast<double>(n_tail);
        ks = std::max(ks, std::max(std::fabs(hi - model), std::fabs(lo - model)));
    }
    c.ks = ks;
    c.valid = true;
    return c;
}

TailFit fit_impl(const std::vector<double>& samples, const PowerLawOptions& opts, bool parallel) {
    if (samples.size() < opts.min_tail)
        throw InsufficientTail("fit_power_law: need at least " + std::to_string(opts.min_tail) +
                               " samples");
    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    if (!(sorted.front() > 0.0)) throw ValidationError("fit_power_law: samples must be positive");

    std::vector<double> suffix_log(sorted.size() + 1, 0.0);
    for (size_t i = sorted.size(); i-- > 0;)
        suffix_log[i] = suffix_log[i + 1] + std::log(sorted[i]);

    // distinct-value candidate x_min indices keeping at least min_tail samples
    std::vector<size_t> candidates;
    for (size_t i = 0; i + opts.min_tail <= sorted.size(); ++i) {
        if (i > 0 && sorted[i] == sorted[i - 1]) continue;
        candidates.push_back(i);
    }
    if (candidates.empty()) throw InsufficientTail("fit_power_law: no viable x_min candidate");

    if (candidates.size() > opts.max_candidates) {
        // thin to log-spaced values over the candidate range
        std::vector<size_t> thinned;
        thinned.reserve(opts.max_candidates);
        const double lo = std::log(sorted[candidates.front()]);
        const double hi = std::log(sorted[candidates.back()]);
        size_t cursor = 0;
        for (size_t k = 0; k < opts.max_candidates; ++k) {
            const double target =
                std::exp(lo + (hi - lo) * static_cast<double>(k) /
                                  static_cast<double>(opts.max_candidates - 1));
            while (cursor + 1 < candidates.size() && sorted[candidates[cursor]] < target) ++cursor;
            if (thinned.empty() || thinned.back() != candidates[cursor])
                thinned.push_back(candidates[cursor]);
        }
        candidates = std::move(thinned);
    }

    std::vector<Candidate> results(candidates.size());
#pragma omp parallel for schedule(dynamic, 8) if (parallel)
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(candidates.size()); ++k)
        results[static_cast<size_t>(k)] =
            eval_candidate(sorted, suffix_log, candidates[static_cast<size_t>(k)]);

    const Candidate* best = nullptr;
    for (const auto& c : results)
        if (c.valid && (!best || c.ks < best->ks)) best = &c;
    if (!best) throw InsufficientTail("fit_power_law: degenerate sample (no spread in any tail)");

    TailFit fit;
    fit.x_min = best->x_min;
    fit.alpha = best->alpha;
    fit.n_tail = sorted.size() - best->index;
    fit.ks_stat = best->ks;
    return fit;
}

} // namespace

TailFit fit_power_law(const std::vector<double>& samples, const PowerLawOptions& opts) {
    return fit_impl(samples, opts, true);
}

TailFit fit_power_law_serial(const std::vector<double>& samples, const PowerLawOptions& opts) {
    return fit_impl(samples, opts, false);
}

std::vector<double> ratio_tail_transform(const std::vector<double>& f2_samples) {
    std::vector<double> out;
    out.reserve(f2_samples.size());
    for (double f2 : f2_samples) {
        if (!(f2 >= 0.0 && f2 < 1.0))
            throw ValidationError("ratio_tail_transform: f2 must lie in [0,1)");
        out.push_back(1.0 / (1.0 - f2));
    }
    return out;
}

namespace {

// pairs (i < j) with strictly decreasing values, counted by merge sort
std::uint64_t count_inversions(std::vector<double>& v, std::vector<double>& buf, size_t lo,
                               size_t hi) {
    if (hi - lo < 2) return 0;
    const size_t mid = lo + (hi - lo) / 2;
    std::uint64_t count = count_inversions(v, buf, lo, mid) + count_inversions(v, buf, mid, hi);
    size_t a = lo, b = mid, k = lo;
    while (a < mid && b < hi) {
        if (v[b] < v[a]) {
            count += mid - a;
            buf[k++] = v[b++];
        } else {
            buf[k++] = v[a++];
        }
    }
    while (a < mid) buf[k++] = v[a++];
    while (b < hi) buf[k++] = v[b++];
    std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo),
              buf.begin() + static_cast<std::ptrdiff_t>(hi),
              v.begin() + static_cast<std::ptrdiff_t>(lo));
    return count;
}

std::uint64_t tie_pairs(const std::vector<double>& sorted_vals) {
    std::uint64_t t = 0;
    size_t run = 1;
    for (size_t i = 1; i <= sorted_vals.size(); ++i) {
        if (i < sorted_vals.size() && sorted_vals[i] == sorted_vals[i - 1]) {
            ++run;
        } else {
            t += static_cast<std::uint64_t>(run) * (run - 1) / 2;
            run = 1;
        }
    }
    return t;
}

} // namespace

double kendall_tau(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw LengthMismatch();
    const size_t n = x.size();
    if (n < 2) throw ValidationError("kendall_tau: need at least two observations");

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (x[a] != x[b]) return x[a] < x[b];
        return y[a] < y[b];
    });

    // tie counts: n1 over x runs, n3 over joint (x, y) runs
    std::uint64_t n1 = 0, n3 = 0;
    {
        size_t run_x = 1, run_xy = 1;
        for (size_t i = 1; i <= n; ++i) {
            const bool same_x = i < n && x[order[i]] == x[order[i - 1]];
            const bool same_xy = same_x && y[order[i]] == y[order[i - 1]];
            if (same_x) ++run_x;
            else {
                n1 += static_cast<std::uint64_t>(run_x) * (run_x - 1) / 2;
                run_x = 1;
            }
            if (same_xy) ++run_xy;
            else {
                n3 += static_cast<std::uint64_t>(run_xy) * (run_xy - 1) / 2;
                run_xy = 1;
            }
        }
    }

    std::vector<double> y_by_x(n);
    for (size_t i = 0; i < n; ++i) y_by_x[i] = y[order[i]];
    std::vector<double> buf(n);
    const std::uint64_t discordant = count_inversions(y_by_x, buf, 0, n);
    const std::uint64_t n2 = tie_pairs(y_by_x); // y_by_x is sorted now

    const double tot = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    const double num = tot - static_cast<double>(n1) - static_cast<double>(n2) +
                       static_cast<double>(n3) - 2.0 * static_cast<double>(discordant);
    const double den = std::sqrt((tot - static_cast<double>(n1)) * (tot - static_cast<double>(n2)));
    if (!(den > 0.0)) return 0.0; // a constant margin carries no rank information
    return num / den;
}

namespace {

std::vector<double> tau_matrix_impl(const std::vector<std::vector<double>>& columns, bool parallel) {
    const int dim = static_cast<int>(columns.size());
    std::vector<double> m(static_cast<size_t>(dim) * dim, 1.0);
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j) pairs.emplace_back(i, j);
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(pairs.size()); ++k) {
        const auto [i, j] = pairs[static_cast<size_t>(k)];
        const double tau = kendall_tau(columns[static_cast<size_t>(i)], columns[static_cast<size_t>(j)]);
        m[static_cast<size_t>(i) * dim + j] = tau;
        m[static_cast<size_t>(j) * dim + i] = tau;
    }
    return m;
}

} // namespace

std::vector<double> kendall_tau_matrix(const std::vector<std::vector<double>>& columns) {
    return tau_matrix_impl(columns, true);
}

std::vector<double> kendall_tau_matrix_serial(const std::vector<std::vector<double>>& columns) {
    return tau_matrix_impl(columns, false);
}

double upper_tail_dependence(const std::vector<double>& u1, const std::vector<double>& u2,
                             double q) {
    if (u1.size() != u2.size()) throw LengthMismatch();
    if (u1.empty()) throw EmptyInput("upper_tail_dependence: no scores");
    if (!(q > 0.0 && q < 1.0)) throw ValidationError("q must lie in (0,1)");
    size_t joint = 0;
    for (size_t i = 0; i < u1.size(); ++i)
        if (u1[i] > q && u2[i] > q) ++joint;
    return static_cast<double>(joint) / static_cast<double>(u1.size()) / (1.0 - q);
}

} // namespace covertflow::tail_stats
