#include "covertflow/copula.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "covertflow/dist.hpp"
#include "covertflow/errors.hpp"
#include "covertflow/rng.hpp"
#include "covertflow/tail_stats.hpp"

namespace covertflow::copula {

std::string to_string(Family f) { return f == Family::Gaussian ? "gaussian" : "t"; }

Family family_from_string(const std::string& s) {
    if (s == "gaussian") return Family::Gaussian;
    if (s == "t" || s == "student" || s == "student_t") return Family::StudentT;
    throw ValidationError("unknown copula family: " + s);
}

UniformScores to_uniform_scores(const std::vector<FeatureVector>& features,
                                const std::vector<std::string>& ids, std::uint64_t jitter_seed,
                                double jitter_eps) {
    if (features.size() != ids.size()) throw LengthMismatch();
    if (features.empty()) throw EmptyInput("to_uniform_scores: no incidents");
    if (!(jitter_eps > 0.0 && jitter_eps < 0.5))
        throw ValidationError("jitter_eps must lie in (0, 0.5)");

    const size_t n = features.size();
    UniformScores scores;
    scores.ids = ids;
    scores.jitter_seed = jitter_seed;
    scores.jitter_eps = jitter_eps;

    for (int j = 0; j < kFeatureDim; ++j) {
        std::vector<double> raw(n);
        for (size_t i = 0; i < n; ++i) raw[i] = features[i].get(j);
        if (j >= 2) { // discrete frequency features get tie-breaking jitter
            Xoshiro256pp rng(derive_seed(jitter_seed, static_cast<std::uint64_t>(j)));
            for (size_t i = 0; i < n; ++i) raw[i] += jitter_eps * rng.uniform01();
        }
        std::vector<size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
            if (raw[a] != raw[b]) return raw[a] < raw[b];
            return a < b;
        });
        auto& col = scores.u[static_cast<size_t>(j)];
        col.resize(n);
        for (size_t r = 0; r < n; ++r)
            col[order[r]] = static_cast<double>(r + 1) / static_cast<double>(n + 1);
        auto& table = scores.ecdf[static_cast<size_t>(j)];
        table.resize(n);
        for (size_t r = 0; r < n; ++r) table[r] = raw[order[r]];
    }
    return scores;
}

namespace {

// latent scores per observation for the given family
std::vector<double> latent_scores(const UniformScores& scores, Family family, int nu) {
    const size_t n = scores.size();
    std::vector<double> z(n * kFeatureDim);
    for (int j = 0; j < kFeatureDim; ++j) {
        const auto& col = scores.u[static_cast<size_t>(j)];
        if (family == Family::Gaussian) {
            for (size_t i = 0; i < n; ++i)
                z[i * kFeatureDim + static_cast<size_t>(j)] = dist::norm_quantile(col[i]);
        } else {
            // warm-start the t quantile along the sorted column
            std::vector<size_t> order(n);
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(),
                      [&](size_t a, size_t b) { return col[a] < col[b]; });
            double hint = std::numeric_limits<double>::quiet_NaN();
            for (size_t r = 0; r < n; ++r) {
                hint = dist::t_quantile(col[order[r]], nu, hint);
                z[order[r] * kFeatureDim + static_cast<size_t>(j)] = hint;
            }
        }
    }
    return z;
}

double gaussian_loglik(const std::vector<double>& z, size_t n, const linalg::Matrix& R) {
    const auto L = linalg::cholesky(R, kFeatureDim);
    const double logdet = linalg::log_det_spd(R, kFeatureDim);
    double ll = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double* zi = &z[i * kFeatureDim];
        double z2 = 0.0;
        for (int j = 0; j < kFeatureDim; ++j) z2 += zi[j] * zi[j];
        ll += -0.5 * logdet - 0.5 * (linalg::quad_form_inv(L, kFeatureDim, zi) - z2);
    }
    return ll;
}

double student_loglik(const std::vector<double>& w, size_t n, const linalg::Matrix& R, int nu) {
    const int d = kFeatureDim;
    const auto L = linalg::cholesky(R, d);
    const double logdet = linalg::log_det_spd(R, d);
    const double dnu = static_cast<double>(nu);
    const double cnst = std::lgamma(0.5 * (dnu + d)) + (d - 1) * std::lgamma(0.5 * dnu) -
                        d * std::lgamma(0.5 * (dnu + 1.0));
    double ll = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double* wi = &w[i * static_cast<size_t>(d)];
        const double q = linalg::quad_form_inv(L, d, wi);
        double marg = 0.0;
        for (int j = 0; j < d; ++j) marg += std::log1p(wi[j] * wi[j] / dnu);
        ll += cnst - 0.5 * logdet - 0.5 * (dnu + d) * std::log1p(q / dnu) +
              0.5 * (dnu + 1.0) * marg;
    }
    return ll;
}

linalg::Matrix correlation_from_kendall(const UniformScores& scores) {
    std::vector<std::vector<double>> cols;
    for (int j = 0; j < kFeatureDim; ++j) cols.push_back(scores.u[static_cast<size_t>(j)]);
    const auto tau = tail_stats::kendall_tau_matrix(cols);
    linalg::Matrix R(kFeatureDim * kFeatureDim, 1.0);
    for (int i = 0; i < kFeatureDim; ++i)
        for (int j = 0; j < kFeatureDim; ++j)
            R[static_cast<size_t>(i) * kFeatureDim + j] =
                i == j ? 1.0 : std::sin(0.5 * M_PI * tau[static_cast<size_t>(i) * kFeatureDim + j]);
    return linalg::nearest_correlation(R, kFeatureDim, 1e-6);
}

} // namespace

CopulaModel fit_copula(const UniformScores& scores, Family family) {
    const size_t n = scores.size();
    if (n < 2) throw EmptyInput("fit_copula: need at least two incidents");

    CopulaModel model;
    model.family = family;
    model.dim = kFeatureDim;
    model.n = n;
    model.jitter_seed = scores.jitter_seed;
    model.jitter_eps = scores.jitter_eps;
    model.R = correlation_from_kendall(scores);
    if (linalg::min_eigenvalue(model.R, kFeatureDim) <= 1e-8) throw SingularCorrelation();

    int k = kFeatureDim * (kFeatureDim - 1) / 2;
    if (family == Family::Gaussian) {
        const auto z = latent_scores(scores, family, 0);
        model.loglik = gaussian_loglik(z, n, model.R);
    } else {
        constexpr int nu_lo = 3, nu_hi = 50;
        std::vector<double> ll(nu_hi - nu_lo + 1);
#pragma omp parallel for schedule(dynamic)
        for (int nu = nu_lo; nu <= nu_hi; ++nu) {
            const auto w = latent_scores(scores, Family::StudentT, nu);
            ll[static_cast<size_t>(nu - nu_lo)] = student_loglik(w, n, model.R, nu);
        }
        int best = nu_lo;
        for (int nu = nu_lo; nu <= nu_hi; ++nu)
            if (ll[static_cast<size_t>(nu - nu_lo)] > ll[static_cast<size_t>(best - nu_lo)]) best = nu;
        model.nu = best;
        model.loglik = ll[static_cast<size_t>(best - nu_lo)];
        k += 1;
    }
    model.aic = 2.0 * k - 2.0 * model.loglik;
    model.bic = k * std::log(static_cast<double>(n)) - 2.0 * model.loglik;
    return model;
}

CopulaModel fit_copula_auto(const UniformScores& scores, CopulaModel* gaussian_fit,
                            CopulaModel* student_fit) {
    const CopulaModel g = fit_copula(scores, Family::Gaussian);
    const CopulaModel t = fit_copula(scores, Family::StudentT);
    if (gaussian_fit) *gaussian_fit = g;
    if (student_fit) *student_fit = t;
    return t.aic < g.aic ? t : g;
}

FamilyPrecheck precheck_families(const std::vector<double>& tau_matrix,
                                 const UniformScores& scores) {
    FamilyPrecheck res;
    double tau_min = 1.0, tau_max = -1.0;
    for (int i = 0; i < kFeatureDim; ++i)
        for (int j = i + 1; j < kFeatureDim; ++j) {
            const double t = tau_matrix[static_cast<size_t>(i) * kFeatureDim + j];
            tau_min = std::min(tau_min, t);
            tau_max = std::max(tau_max, t);
        }
    res.min_tau = tau_min;
    res.tau_spread = tau_max - tau_min;
    res.clayton_admissible = tau_min >= 0.0;
    res.gumbel_admissible = tau_min >= 0.0;
    res.frank_admissible = res.tau_spread <= res.frank_spread_threshold;
    res.lambda_upper.assign(kFeatureDim * kFeatureDim, 1.0);
    for (int i = 0; i < kFeatureDim; ++i)
        for (int j = i + 1; j < kFeatureDim; ++j) {
            const double l = tail_stats::upper_tail_dependence(
                scores.u[static_cast<size_t>(i)], scores.u[static_cast<size_t>(j)], 0.95);
            res.lambda_upper[static_cast<size_t>(i) * kFeatureDim + j] = l;
            res.lambda_upper[static_cast<size_t>(j) * kFeatureDim + i] = l;
        }
    return res;
}

namespace {

struct LatentSampler {
    const CopulaModel* model;
    linalg::Matrix chol;
    dist::Chi2QuantileTable chi2;

    explicit LatentSampler(const CopulaModel& m) : model(&m) {
        chol = linalg::cholesky(m.R, m.dim);
        if (m.family == Family::StudentT) {
            if (m.nu < 3) throw DegenerateModel();
            chi2 = dist::Chi2QuantileTable(static_cast<double>(m.nu));
        }
    }

    // one sequential-conditioning pass; `us` supplies the uniforms
    double orthant_sample(const std::vector<double>& z, const double* us) const {
        const int d = model->dim;
        double scale = 1.0;
        int offset = 0;
        if (model->family == Family::StudentT) {
            const double s = chi2(us[0]);
            scale = std::sqrt(s / static_cast<double>(model->nu));
            offset = 1;
        }
        double prod = 1.0;
        double y[8];
        for (int i = 0; i < d; ++i) {
            double m = 0.0;
            for (int k = 0; k < i; ++k) m += chol[static_cast<size_t>(i) * d + k] * y[k];
            const double bound = (z[static_cast<size_t>(i)] * scale - m) /
                                 chol[static_cast<size_t>(i) * d + i];
            const double e = dist::norm_cdf(bound);
            if (e <= 1e-300) return 0.0;
            prod *= e;
            if (i + 1 < d) {
                double t = us[offset + i] * e;
                t = std::min(std::max(t, 1e-300), 1.0 - 1e-16);
                y[i] = dist::norm_quantile(t);
            }
        }
        return prod;
    }
};

} // namespace

namespace {

OrthantEstimate orthant_with_sampler(const LatentSampler& sampler, const std::vector<double>& z,
                                     std::size_t n_pairs, std::uint64_t seed) {
    if (n_pairs == 0) throw ValidationError("n_pairs must be positive");
    const int n_uniforms =
        sampler.model->dim + (sampler.model->family == Family::StudentT ? 1 : 0);

    Xoshiro256pp rng(seed);
    double us[9], anti[9];
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t j = 0; j < n_pairs; ++j) {
        for (int k = 0; k < n_uniforms; ++k) {
            us[k] = rng.uniform_open();
            anti[k] = 1.0 - us[k];
        }
        const double m = 0.5 * (sampler.orthant_sample(z, us) + sampler.orthant_sample(z, anti));
        sum += m;
        sum_sq += m * m;
    }
    OrthantEstimate est;
    const double np = static_cast<double>(n_pairs);
    est.p = sum / np;
    if (n_pairs > 1) {
        const double var = std::max(0.0, (sum_sq - sum * sum / np) / (np - 1.0));
        est.std_err = std::sqrt(var / np);
    }
    return est;
}

std::vector<double> survival_bounds(const CopulaModel& model, const std::vector<double>& u) {
    std::vector<double> z(u.size());
    for (size_t i = 0; i < u.size(); ++i) {
        if (!(u[i] > 0.0 && u[i] < 1.0))
            throw ValidationError("joint_survival: scores must lie strictly in (0,1)");
        const double tail = 1.0 - u[i];
        z[i] = model.family == Family::Gaussian
                   ? dist::norm_quantile(tail)
                   : dist::t_quantile(tail, static_cast<double>(model.nu));
    }
    return z;
}

} // namespace

OrthantEstimate orthant_probability(const CopulaModel& model, const std::vector<double>& z,
                                    std::size_t n_pairs, std::uint64_t seed) {
    if (static_cast<int>(z.size()) != model.dim) throw DegenerateModel();
    return orthant_with_sampler(LatentSampler(model), z, n_pairs, seed);
}

OrthantEstimate joint_survival(const CopulaModel& model, const std::vector<double>& u,
                               std::size_t n_pairs, std::uint64_t seed) {
    if (static_cast<int>(u.size()) != model.dim) throw DegenerateModel();
    return orthant_probability(model, survival_bounds(model, u), n_pairs, seed);
}

namespace {

std::vector<TriageScore> rank_impl(const CopulaModel& model, const UniformScores& scores,
                                   std::uint64_t master_seed, std::size_t n_pairs, bool parallel) {
    const size_t n = scores.size();
    std::vector<TriageScore> out(n);
    const LatentSampler sampler(model); // shared: the chi2 table is expensive to build
#pragma omp parallel for schedule(dynamic, 64) if (parallel)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
        const size_t idx = static_cast<size_t>(i);
        const auto row = scores.row(idx);
        const std::vector<double> u(row.begin(), row.end());
        const auto est = orthant_with_sampler(sampler, survival_bounds(model, u), n_pairs,
                                              derive_seed(master_seed, scores.ids[idx]));
        out[idx] = {scores.ids[idx], est.p, est.std_err, 0};
    }
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (out[a].p != out[b].p) return out[a].p < out[b].p;
        return out[a].incident_id < out[b].incident_id;
    });
    std::vector<TriageScore> ranked;
    ranked.reserve(n);
    for (size_t r = 0; r < n; ++r) {
        TriageScore s = out[order[r]];
        s.rank = static_cast<long>(r + 1);
        ranked.push_back(std::move(s));
    }
    return ranked;
}

} // namespace

std::vector<TriageScore> rank_incidents(const CopulaModel& model, const UniformScores& scores,
                                        std::uint64_t master_seed, std::size_t n_pairs) {
    return rank_impl(model, scores, master_seed, n_pairs, true);
}

std::vector<TriageScore> rank_incidents_serial(const CopulaModel& model,
                                               const UniformScores& scores,
                                               std::uint64_t master_seed, std::size_t n_pairs) {
    return rank_impl(model, scores, master_seed, n_pairs, false);
}

double top_k_feature_audit(const std::vector<TriageScore>& ranking, const UniformScores& scores,
                           std::size_t k, double q) {
    if (k == 0 || k > ranking.size()) throw ValidationError("top_k_feature_audit: bad k");
    std::map<std::string, size_t> index;
    for (size_t i = 0; i < scores.size(); ++i) index[scores.ids[i]] = i;
    size_t unremarkable = 0;
    for (size_t r = 0; r < k; ++r) {
        const size_t i = index.at(ranking[r].incident_id);
        bool any_extreme = false;
        for (int j = 0; j < kFeatureDim; ++j)
            any_extreme = any_extreme || scores.u[static_cast<size_t>(j)][i] > q;
        if (!any_extreme) ++unremarkable;
    }
    return static_cast<double>(unremarkable) / static_cast<double>(k);
}

QQReport qq_validate(const CopulaModel& model, const UniformScores& scores) {
    const size_t n = scores.size();
    const int d = model.dim;
    const auto z = latent_scores(scores, model.family,
                                 model.family == Family::StudentT ? model.nu : 0);
    const auto L = linalg::cholesky(model.R, d);
    std::vector<double> dist_scores(n);
    for (size_t i = 0; i < n; ++i) {
        const double q = linalg::quad_form_inv(L, d, &z[i * static_cast<size_t>(d)]);
        dist_scores[i] = model.family == Family::Gaussian ? q : q / static_cast<double>(d);
    }
    std::sort(dist_scores.begin(), dist_scores.end());

    QQReport rep;
    rep.reference = model.family == Family::Gaussian ? QQReport::Reference::ChiSquared4
                                                     : QQReport::Reference::F4Nu;
    size_t bulk_total = 0, bulk_within = 0;
    double first_dev = 100.0;
    bool found_dev = false;
    for (size_t i = 0; i < n; ++i) {
        const double pct = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        const double theo = model.family == Family::Gaussian
                                ? dist::chi2_quantile(pct, static_cast<double>(d))
                                : dist::f_quantile(pct, static_cast<double>(d),
                                                   static_cast<double>(model.nu));
        const bool within = theo > 0.0 && std::fabs(dist_scores[i] - theo) <= 0.10 * theo;
        if (pct >= 0.05 && pct <= 0.95) {
            ++bulk_total;
            if (within) ++bulk_within;
        }
        if (!within && !found_dev) {
            first_dev = pct * 100.0;
            found_dev = true;
        }
    }
    rep.bulk_fraction_within_10pct =
        bulk_total ? static_cast<double>(bulk_within) / static_cast<double>(bulk_total) : 0.0;
    rep.first_deviation_percentile = first_dev;
    return rep;
}

std::vector<std::array<double, kFeatureDim>> sample_copula(const CopulaModel& model, std::size_t n,
                                                           std::uint64_t seed) {
    if (model.dim != kFeatureDim) throw DegenerateModel();
    const auto L = linalg::cholesky(model.R, kFeatureDim);
    dist::Chi2QuantileTable chi2;
    if (model.family == Family::StudentT)
        chi2 = dist::Chi2QuantileTable(static_cast<double>(model.nu));

    Xoshiro256pp rng(seed);
    std::vector<std::array<double, kFeatureDim>> out(n);
    double eps[kFeatureDim];
    for (size_t i = 0; i < n; ++i) {
        for (double& e : eps) e = dist::norm_quantile(rng.uniform_open());
        double scale = 1.0;
        if (model.family == Family::StudentT) {
            const double s = chi2(rng.uniform_open());
            scale = 1.0 / std::sqrt(s / static_cast<double>(model.nu));
        }
        for (int j = 0; j < kFeatureDim; ++j) {
            double g = 0.0;
            for (int k = 0; k <= j; ++k) g += L[static_cast<size_t>(j) * kFeatureDim + k] * eps[k];
            const double w = g * scale;
            out[i][static_cast<size_t>(j)] =
                model.family == Family::Gaussian
                    ? dist::norm_cdf(w)
                    : dist::t_cdf(w, static_cast<double>(model.nu));
        }
    }
    return out;
}

} // namespace covertflow::copula
