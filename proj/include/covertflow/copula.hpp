#pragma once
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "covertflow/incident.hpp"
#include "covertflow/linalg.hpp"

// Elliptical-copula triage: ECDF transforms with tie-breaking jitter,
// Gaussian/t fitting by Kendall inversion with profile likelihood over the
// degrees of freedom, joint survival scoring via latent orthant Monte Carlo,
// and Q-Q validation against the chi-squared / F references.
namespace covertflow::copula {

inline constexpr int kFeatureDim = 4;

enum class Family { Gaussian, StudentT };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

struct UniformScores {
    std::vector<std::string> ids;
    std::array<std::vector<double>, kFeatureDim> u;    // rank/(n+1), strictly in (0,1)
    std::array<std::vector<double>, kFeatureDim> ecdf; // sorted jittered raw values
    std::uint64_t jitter_seed = 0;
    double jitter_eps = 0.4;

    std::size_t size() const { return ids.size(); }
    std::array<double, kFeatureDim> row(std::size_t i) const {
        return {u[0][i], u[1][i], u[2][i], u[3][i]};
    }
};

// Discrete features (f3, f4) receive additive uniform(0, jitter_eps) noise
// before the rank transform; eps < 0.5 preserves the order between distinct
// integers. Continuous ties are broken by input position.
UniformScores to_uniform_scores(const std::vector<FeatureVector>& features,
                                const std::vector<std::string>& ids, std::uint64_t jitter_seed,
                                double jitter_eps = 0.4);

struct CopulaModel {
    Family family = Family::Gaussian;
    int dim = kFeatureDim;
    linalg::Matrix R; // dim x dim correlation
    int nu = 0;       // StudentT only
    double loglik = 0.0;
    double aic = 0.0;
    double bic = 0.0;
    std::size_t n = 0;
    std::uint64_t jitter_seed = 0;
    double jitter_eps = 0.4;
};

// R by Kendall inversion rho = sin(pi*tau/2) projected to the nearest
// positive-definite correlation matrix; StudentT nu by profile likelihood
// over the integer grid [3, 50].
CopulaModel fit_copula(const UniformScores& scores, Family family);

// AIC winner across both families; optionally returns both fits.
CopulaModel fit_copula_auto(const UniformScores& scores, CopulaModel* gaussian_fit = nullptr,
                            CopulaModel* student_fit = nullptr);

struct FamilyPrecheck {
    bool clayton_admissible = true; // needs non-negative dependence on all pairs
    bool gumbel_admissible = true;  // same requirement
    bool frank_admissible = true;   // one parameter cannot span heterogeneous taus
    double min_tau = 0.0;
    double tau_spread = 0.0;
    double frank_spread_threshold = 0.3;
    std::vector<double> lambda_upper; // empirical lambda_U(0.95), dim x dim
};

FamilyPrecheck precheck_families(const std::vector<double>& tau_matrix,
                                 const UniformScores& scores);

struct OrthantEstimate {
    double p = 0.0;
    double std_err = 0.0;
};

// Pr(Z_1 <= z_1, ..., Z_d <= z_d) under the latent Gaussian/t law, estimated
// by sequentially-conditioned Monte Carlo with antithetic pairs. Every sample
// contributes a positive product of conditional probabilities, so the
// estimate is strictly positive.
OrthantEstimate orthant_probability(const CopulaModel& model, const std::vector<double>& z,
                                    std::size_t n_pairs, std::uint64_t seed);

// Joint survival p = Pr(U > u) evaluated through the radial symmetry of
// elliptical copulas as the orthant at quantile(1 - u_i).
OrthantEstimate joint_survival(const CopulaModel& model, const std::vector<double>& u,
                               std::size_t n_pairs = 100000, std::uint64_t seed = 1);

struct TriageScore {
    std::string incident_id;
    double p = 0.0;
    double mc_std_err = 0.0;
    long rank = 0; // 1 = rarest (smallest p)
};

// Ascending-p ranking with per-incident Monte Carlo substreams derived from
// (master_seed, incident id); results are independent of thread count.
std::vector<TriageScore> rank_incidents(const CopulaModel& model, const UniformScores& scores,
                                        std::uint64_t master_seed, std::size_t n_pairs = 100000);
std::vector<TriageScore> rank_incidents_serial(const CopulaModel& model,
                                               const UniformScores& scores,
                                               std::uint64_t master_seed,
                                               std::size_t n_pairs = 100000);

// Fraction of the top-k (ascending p) whose every feature score sits at or
// below quantile q.
double top_k_feature_audit(const std::vector<TriageScore>& ranking, const UniformScores& scores,
                           std::size_t k, double q);

struct QQReport {
    enum class Reference { ChiSquared4, F4Nu };
    Reference reference = Reference::ChiSquared4;
    double bulk_fraction_within_10pct = 0.0; // over the 5th-95th percentile range
    double first_deviation_percentile = 100.0;
};

QQReport qq_validate(const CopulaModel& model, const UniformScores& scores);

// Draws n rows of uniform scores from the model (used by the synthetic
// baseline generator and the oracle tests).
std::vector<std::array<double, kFeatureDim>> sample_copula(const CopulaModel& model, std::size_t n,
                                                           std::uint64_t seed);

} // namespace covertflow::copula
