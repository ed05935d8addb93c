#pragma once
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "covertflow/copula.hpp"
#include "covertflow/detection.hpp"
#include "covertflow/features.hpp"
#include "covertflow/incident.hpp"
#include "covertflow/ledger.hpp"

// Synthetic incident baselines with power-law marginals and optional copula
// dependence, planted covert campaigns matching the three case-study
// signatures, and triage-quality measurement.
namespace covertflow::synth_eval {

struct ParetoMarginal {
    double alpha = 2.5; // density tail exponent, > 1
    double x_min = 1.0;
};

struct BaselineSpec {
    std::size_t n = 0;
    ParetoMarginal f1{2.23, 10.0};
    ParetoMarginal f2_proxy{2.36, 1.0}; // Pareto proxy 1/(1 - f2)
    // frequency proxies start below 1 so the ceiling puts the bulk at count 1
    ParetoMarginal f3{2.61, 0.5};
    ParetoMarginal f4{2.57, 0.5};
    std::optional<copula::CopulaModel> dependence; // empty = independent features
    ChainId chain = ChainId::Ethereum;
    MevType mev_type = MevType::Sandwich;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SynthDataset {
    std::vector<Incident> incidents;
    std::vector<FeatureVector> features; // aligned with incidents
    std::vector<std::string> ids;
};

// Inverse-CDF mapping of copula (or independent) uniforms onto the marginals.
// Frequency features are discretized by ceiling; f4 is drawn first and f3
// thinned against it so f3 <= f4 always holds.
SynthDataset generate_baseline(const BaselineSpec& spec);

enum class CampaignType { ExtremeVolume, RepeatedPair, JointlyElevated };

std::string to_string(CampaignType t);
CampaignType campaign_from_string(const std::string& s);

struct PlantSpec {
    CampaignType type = CampaignType::JointlyElevated;
    double percentile = 0.85; // target percentile within the baseline
    std::size_t count = 1;
};

// Optional link into the staging pipeline: volume-signature plants derive
// their economics from an executed staged sandwich scaled to the target
// volume instead of direct synthesis. JointlyElevated always synthesizes
// directly since it needs exact placement in all four features.
struct StagingLink {
    double pool_reserve_base = 100.0;
    double pool_quote_ratio = 10.0; // quote per base
    double base_price_usd = 1000.0;
};

// Appends the campaign's incidents and returns their ids (the ground truth).
std::vector<std::string> plant_campaign(SynthDataset& dataset, const PlantSpec& plant,
                                        const StagingLink* link = nullptr);

struct EvalConfig {
    copula::Family family = copula::Family::Gaussian;
    bool auto_family = false;
    std::size_t mc_pairs = 256;
    std::uint64_t seed = 1;
    double jitter_eps = 0.4;
    std::vector<std::size_t> recall_ks{100, 500, 1000};
};

struct PlantOutcome {
    std::string id;
    long multivariate_rank = 0;
    long best_single_feature_rank = 0;
};

struct TriageEvaluation {
    std::vector<PlantOutcome> plants;
    std::map<std::size_t, double> recall_at_k;
    bool recall_applicable = true;
    copula::CopulaModel model;
    std::vector<copula::TriageScore> ranking;
};

TriageEvaluation evaluate_triage(const SynthDataset& dataset,
                                 const std::vector<std::string>& ground_truth,
                                 const EvalConfig& cfg);

// --- staged-scenario generator used to exercise the detectors and the
//     clustering tracer against realistic ledgers ---

struct Scenario {
    std::vector<LedgerTx> ledger;
    detection::AssetMap assets;
    features::PriceTable prices;
    std::string sender;
    std::string receiver;
    std::string dex; // the staged pool's contract id
    std::size_t address_count = 0;
    MevType staged_type = MevType::Sandwich;
    double staged_transfer = 0.0;
};

// Staged sandwich (PBS block) plus background swap traffic through the same
// pool and some wallet-to-wallet transfers.
Scenario generate_sandwich_scenario(std::uint64_t seed);

// Staged two-leg arbitrage under the FCFS sequencer plus background traffic.
Scenario generate_arbitrage_scenario(std::uint64_t seed);

// Blocks of single-swap transactions from distinct senders; contains no
// sandwich triple and no closed cycle by construction.
std::vector<LedgerTx> generate_benign_blocks(std::uint64_t seed, std::size_t n_blocks,
                                             detection::AssetMap* assets_out = nullptr,
                                             features::PriceTable* prices_out = nullptr);

} // namespace covertflow::synth_eval
