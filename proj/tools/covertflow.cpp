// covertflow: staged-MEV transfer simulation and forensic triage toolkit.
//
// Subcommands: simulate sandwich | simulate arbitrage | simulate
// arbitrum-timing | detect | features | fit tail | fit copula | rank |
// eval triage | report. Every randomized command requires --seed (or
// COVERTFLOW_SEED) and is bit-reproducible.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "covertflow/copula.hpp"
#include "covertflow/rng.hpp"
#include "covertflow/detection.hpp"
#include "covertflow/errors.hpp"
#include "covertflow/features.hpp"
#include "covertflow/io.hpp"
#include "covertflow/market.hpp"
#include "covertflow/staging.hpp"
#include "covertflow/synth_eval.hpp"
#include "covertflow/tail_stats.hpp"

using namespace covertflow;
using json = nlohmann::ordered_json;

namespace {

struct SeedOption {
    std::optional<std::uint64_t> value;

    std::uint64_t require() const {
        if (value) return *value;
        if (const char* env = std::getenv("COVERTFLOW_SEED")) {
            try {
                return std::stoull(env);
            } catch (const std::exception&) {
                throw ValidationError("COVERTFLOW_SEED is not an integer");
            }
        }
        throw ValidationError("this command is randomized: pass --seed or set COVERTFLOW_SEED");
    }
};

void add_seed(CLI::App* cmd, SeedOption& seed) {
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&seed](std::uint64_t v) { seed.value = v; },
        "seed for all randomized state (env fallback: COVERTFLOW_SEED)");
}

amm::PoolState pool_from_config(const io::Config& cfg, const std::string& section) {
    amm::PoolState pool;
    pool.reserve_base = cfg.get_num(section, "reserve_base", 0.0);
    pool.reserve_quote = cfg.get_num(section, "reserve_quote", 0.0);
    pool.fee_bps = static_cast<int>(cfg.get_int(section, "fee_bps", 0));
    if (!pool.tradable())
        throw ValidationError("config [" + section + "]: reserves must be positive");
    if (pool.fee_bps < 0 || pool.fee_bps >= 10000)
        throw ValidationError("config [" + section + "]: fee_bps must lie in [0, 10000)");
    return pool;
}

chain::SequencerConfig chain_from_config(const io::Config& cfg, std::uint64_t seed) {
    chain::SequencerConfig seq;
    seq.processing_delay_ms = cfg.get_num("chain", "processing_delay_ms", 200.0);
    seq.block_interval_ms = cfg.get_num("chain", "block_interval_ms", 250.0);
    seq.boundary_phase_ms = cfg.get_num("chain", "boundary_phase_ms", 0.0);
    seq.publication_delay_ms =
        cfg.get_num("chain", "publication_delay_ms", seq.block_interval_ms);
    seq.regions = {{cfg.get_num("chain", "adversary_mean_ms", 5.0),
                    cfg.get_num("chain", "adversary_jitter_ms", 8.0)},
                   {cfg.get_num("chain", "probe_mean_ms", 15.0),
                    cfg.get_num("chain", "probe_jitter_ms", 8.0)}};
    seq.seed = seed;
    seq.validate();
    return seq;
}

chain::TimingOptions timing_from_config(const io::Config& cfg) {
    chain::TimingOptions opts;
    opts.probe_cadence_ms = cfg.get_num("timing", "probe_cadence_ms", 25.0);
    opts.probe_count = static_cast<int>(cfg.get_int("timing", "probe_count", 40));
    opts.boundary_margin_ms = cfg.get_num("timing", "boundary_margin_ms", 20.0);
    const std::string crit = cfg.get_str("timing", "success_criterion", "exact_two_blocks");
    if (crit == "exact_two_blocks") {
        opts.criterion = chain::SuccessCriterion::ExactlyTwoBlocksAfter;
    } else if (crit == "later_block") {
        opts.criterion = chain::SuccessCriterion::LaterBlockBeforeCompetitor;
    } else {
        throw ValidationError("config [timing] success_criterion: " + crit);
    }
    if (opts.probe_cadence_ms >= cfg.get_num("chain", "block_interval_ms", 250.0))
        throw ValidationError("probe cadence must be below the block interval");
    return opts;
}

detection::AssetMap assets_from_config(const io::Config& cfg) {
    detection::AssetMap assets;
    for (const std::string section : {"pool", "pool_a", "pool_b"}) {
        if (!cfg.has(section, "reserve_base")) continue;
        assets[cfg.get_str(section, "id", section)] = {cfg.get_str(section, "base", "base"),
                                                       cfg.get_str(section, "quote", "quote")};
    }
    if (assets.empty()) throw ValidationError("config defines no pool sections");
    return assets;
}

std::array<double, 4> percentile_row(const copula::UniformScores& scores, size_t i) {
    return {scores.u[0][i], scores.u[1][i], scores.u[2][i], scores.u[3][i]};
}

int cmd_simulate_sandwich(const std::string& config_path, const std::string& out_path,
                          const std::string& summary_path) {
    const auto cfg = io::Config::load(config_path);
    const auto pool = pool_from_config(cfg, "pool");

    staging::SandwichParams params;
    params.sender_capital = cfg.get_num("staging.sandwich", "sender_capital", 0.0);
    params.receiver_base = cfg.get_num("staging.sandwich", "receiver_base", 0.0);
    params.receiver_quote = cfg.get_num("staging.sandwich", "receiver_quote", 0.0);
    params.sender = cfg.get_str("staging.sandwich", "sender", "S");
    params.receiver = cfg.get_str("staging.sandwich", "receiver", "R");
    params.pool_id = cfg.get_str("pool", "id", "pool");

    staging::PbsConfig pbs;
    pbs.colluding_validator = cfg.get_bool("staging.sandwich", "colluding", true);
    pbs.bid = cfg.get_num("staging.sandwich", "bid", 1e6);
    pbs.competing_bid = cfg.get_num("staging.sandwich", "competing_bid", 0.0);

    const auto plan = staging::plan_sandwich(pool, params);
    const auto exec = staging::execute_sandwich(plan, pool, pbs);
    if (!out_path.empty()) io::write_ledger_jsonl(out_path, exec.ledger);

    json summary;
    summary["predicted_transfer"] = io::format_decimal(plan.predicted_transfer);
    summary["realized_transfer"] = io::format_decimal(exec.realized_transfer);
    summary["effectiveness_pct"] = io::format_decimal(100.0 * exec.realized_effectiveness);
    summary["stranded"] = io::format_decimal(exec.realized_stranded);
    summary["recovered"] =
        io::format_decimal(exec.outcomes.size() == 3 ? exec.outcomes[2].amount_out : 0.0);
    summary["sender_loss"] = io::format_decimal(plan.sender_loss);
    summary["bundle_included"] = exec.bundle_included;
    summary["adversary_cost"] = io::format_decimal(exec.adversary_cost);
    if (!summary_path.empty()) {
        std::ofstream out(summary_path);
        out << summary.dump(2) << "\n";
    }
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int cmd_simulate_arbitrage(const std::string& config_path, const SeedOption& seed,
                           const std::string& out_path, const std::string& summary_path) {
    const auto cfg = io::Config::load(config_path);
    const auto pool_a = pool_from_config(cfg, "pool_a");
    const auto pool_b = pool_from_config(cfg, "pool_b");
    const auto seq = chain_from_config(cfg, seed.require());
    const auto opts = timing_from_config(cfg);

    staging::ArbitrageParams params;
    params.sender_capital = cfg.get_num("staging.arbitrage", "sender_capital", 0.0);
    params.receiver_capital = cfg.get_num("staging.arbitrage", "receiver_capital", 0.0);
    params.sender = cfg.get_str("staging.arbitrage", "sender", "S");
    params.receiver = cfg.get_str("staging.arbitrage", "receiver", "R");
    params.pool_a_id = cfg.get_str("pool_a", "id", "pool_a");
    params.pool_b_id = cfg.get_str("pool_b", "id", "pool_b");
    params.block_gap = static_cast<int>(cfg.get_int("staging.arbitrage", "block_gap", 2));
    const double delay = cfg.get_num("staging.arbitrage", "delay_ms", 330.0);

    const auto plan = staging::plan_arbitrage(pool_a, pool_b, params);
    const auto exec = staging::execute_arbitrage(plan, pool_a, pool_b, seq, delay, opts);
    if (!out_path.empty()) io::write_ledger_jsonl(out_path, exec.ledger);

    json summary;
    summary["predicted_transfer"] = io::format_decimal(plan.predicted_transfer);
    summary["realized_transfer"] = io::format_decimal(exec.realized_transfer);
    summary["sender_loss"] = io::format_decimal(plan.sender_loss);
    summary["success"] = exec.success;
    summary["deniability_failure"] = exec.deniability_failure;
    summary["inflating_block"] = exec.inflating_block;
    summary["arbitrage_block"] = exec.arbitrage_block;
    if (!summary_path.empty()) {
        std::ofstream out(summary_path);
        out << summary.dump(2) << "\n";
    }
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int cmd_simulate_timing(const std::string& config_path, const SeedOption& seed, int trials,
                        double delay, const std::string& sweep, double reaction,
                        const std::string& out_path) {
    const auto cfg = io::Config::load(config_path);
    const auto seq = chain_from_config(cfg, seed.require());
    const auto opts = timing_from_config(cfg);

    std::vector<double> delays;
    if (!sweep.empty()) {
        double lo = 0, hi = 0, step = 0;
        if (std::sscanf(sweep.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0.0)
            throw ValidationError("--sweep expects lo:hi:step");
        for (double d = lo; d <= hi + 1e-9; d += step) delays.push_back(d);
    } else {
        delays.push_back(delay);
    }

    std::vector<std::vector<std::string>> rows;
    json best;
    double best_rate = -1.0;
    for (double d : delays) {
        const auto res = chain::run_timing_experiment(seq, d, trials, reaction, opts);
        rows.push_back({io::format_decimal(d), std::to_string(trials),
                        io::format_decimal(res.success_rate),
                        io::format_decimal(res.adversary_wins_rate), std::to_string(seq.seed)});
        if (res.success_rate > best_rate) {
            best_rate = res.success_rate;
            best = {{"delay_ms", d},
                    {"success_rate", res.success_rate},
                    {"adversary_wins_rate", res.adversary_wins_rate}};
        }
    }
    if (!out_path.empty())
        io::write_csv(out_path,
                      {"delay_ms", "trials", "success_rate", "adversary_wins_rate", "seed"}, rows);
    json summary;
    summary["trials"] = trials;
    summary["competitor_reaction_ms"] = reaction;
    summary["best"] = best;
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int cmd_detect(const std::string& ledger_path, const std::string& config_path,
               const std::string& prices_path, const std::string& out_path,
               const std::string& chain_name) {
    const auto cfg = io::Config::load(config_path);
    const auto assets = assets_from_config(cfg);
    const auto prices = features::load_price_table(prices_path);
    const auto ledger = io::read_ledger_jsonl(ledger_path);
    const ChainId chain_id = chain_from_string(chain_name);

    features::ExclusionCounter exclusions;
    const auto sandwiches = detection::detect_sandwich(ledger, assets, prices, &exclusions);
    const auto arbitrages = detection::detect_arbitrage(ledger, assets, prices, &exclusions);

    std::vector<io::IncidentRecord> records;
    int n = 0;
    auto push = [&](const detection::DetectedIncident& d) {
        io::IncidentRecord rec;
        rec.incident.id =
            to_string(d.mev_type) + "-" + std::to_string(d.block) + "-" + std::to_string(n++);
        rec.incident.chain = chain_id;
        rec.incident.mev_type = d.mev_type;
        rec.incident.block = d.block;
        rec.incident.extractor = d.extractor;
        rec.incident.extractee = d.extractee;
        rec.incident.profit_usd = d.extractor_profit_usd;
        rec.incident.capital_usd = d.extractee_capital_usd;
        rec.incident.loss_usd = d.extractee_loss_usd;
        rec.extra["tx_ids"] = d.tx_ids;
        rec.extra["profit_quote"] = io::format_decimal(d.extractor_profit_quote);
        if (d.co_inclusion_warning) rec.extra["co_inclusion_warning"] = true;
        records.push_back(std::move(rec));
    };
    for (const auto& d : sandwiches) push(d);
    for (const auto& d : arbitrages) push(d);
    io::write_incidents_jsonl(out_path, records);

    json summary;
    summary["sandwich_incidents"] = sandwiches.size();
    summary["arbitrage_incidents"] = arbitrages.size();
    summary["excluded_unpriceable"] = exclusions.excluded;
    summary["exclusion_rate"] = exclusions.rate();
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int cmd_features(const std::string& incidents_path, const std::string& out_path) {
    const auto records = io::read_incidents_jsonl(incidents_path);
    std::vector<Incident> raw;
    raw.reserve(records.size());
    for (const auto& r : records) raw.push_back(r.incident);
    const auto ingest = features::validate_incidents(raw);
    for (const auto& d : ingest.diagnostics) std::cerr << "rejected: " << d << "\n";
    if (ingest.accepted.empty()) throw ValidationError("no incidents passed ingest validation");

    const auto feats = features::compute_features(ingest.accepted);
    std::vector<std::string> ids;
    ids.reserve(ingest.accepted.size());
    for (const auto& inc : ingest.accepted) ids.push_back(inc.id);
    io::write_features_jsonl(out_path, ids, feats);

    json summary;
    summary["accepted"] = ingest.accepted.size();
    summary["rejected"] = ingest.rejected;
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int cmd_fit_tail(const std::string& features_path, const std::string& feature,
                 const std::string& out_path, const std::string& ccdf_path, long min_tail) {
    const auto [ids, feats] = io::read_features_jsonl(features_path);
    int column;
    if (feature == "f1") column = 0;
    else if (feature == "f2") column = 1;
    else if (feature == "f3") column = 2;
    else if (feature == "f4") column = 3;
    else throw ValidationError("--feature must be one of f1|f2|f3|f4");

    std::vector<double> samples;
    samples.reserve(feats.size());
    for (const auto& f : feats) samples.push_back(f.get(column));
    if (column == 1) samples = tail_stats::ratio_tail_transform(samples);

    tail_stats::PowerLawOptions opts;
    opts.min_tail = static_cast<size_t>(min_tail);
    const auto fit = tail_stats::fit_power_law(samples, opts);
    if (!out_path.empty()) io::write_tail_fit_json(out_path, fit, feature);
    if (!ccdf_path.empty()) {
        std::vector<std::vector<std::string>> rows;
        for (const auto& [x, p] : tail_stats::ccdf(samples))
            rows.push_back({io::format_decimal(x), io::format_decimal(p)});
        io::write_csv(ccdf_path, {"x", "ccdf"}, rows);
    }

    json summary;
    summary["feature"] = feature;
    summary["alpha"] = fit.alpha;
    summary["x_min"] = fit.x_min;
    summary["n_tail"] = fit.n_tail;
    summary["ks_stat"] = fit.ks_stat;
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int cmd_fit_copula(const std::string& features_path, const std::string& family_name,
                   const SeedOption& seed, const std::string& out_path, double jitter_eps) {
    const auto [ids, feats] = io::read_features_jsonl(features_path);
    if (feats.size() < 100)
        throw ValidationError("fit copula needs at least 100 incidents, got " +
                              std::to_string(feats.size()));
    const auto scores = copula::to_uniform_scores(feats, ids, seed.require(), jitter_eps);

    std::vector<std::vector<double>> cols(scores.u.begin(), scores.u.end());
    const auto tau = tail_stats::kendall_tau_matrix(cols);
    const auto precheck = copula::precheck_families(tau, scores);

    copula::CopulaModel gaussian, student, model;
    if (family_name == "auto") {
        model = copula::fit_copula_auto(scores, &gaussian, &student);
    } else {
        model = copula::fit_copula(scores, copula::family_from_string(family_name));
    }

    json extras;
    extras["precheck"] = {{"clayton_admissible", precheck.clayton_admissible},
                          {"gumbel_admissible", precheck.gumbel_admissible},
                          {"frank_admissible", precheck.frank_admissible},
                          {"min_tau", precheck.min_tau},
                          {"tau_spread", precheck.tau_spread}};
    json lambda = json::array();
    for (int i = 0; i < 4; ++i) {
        json row = json::array();
        for (int j = 0; j < 4; ++j)
            row.push_back(precheck.lambda_upper[static_cast<size_t>(i) * 4 + j]);
        lambda.push_back(std::move(row));
    }
    extras["lambda_upper_095"] = std::move(lambda);
    if (family_name == "auto") {
        extras["gaussian_aic"] = gaussian.aic;
        extras["student_aic"] = student.aic;
        extras["delta_aic_t_minus_gaussian"] = student.aic - gaussian.aic;
    }
    const auto qq = copula::qq_validate(model, scores);
    extras["qq"] = {
        {"reference",
         qq.reference == copula::QQReport::Reference::ChiSquared4 ? "chi2_4" : "f_4_nu"},
        {"bulk_fraction_within_10pct", qq.bulk_fraction_within_10pct},
        {"first_deviation_percentile", qq.first_deviation_percentile}};

    io::write_model_json(out_path, model, extras);
    json summary;
    summary["family"] = copula::to_string(model.family);
    if (model.family == copula::Family::StudentT) summary["nu"] = model.nu;
    summary["aic"] = model.aic;
    summary["loglik"] = model.loglik;
    summary["n"] = model.n;
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int cmd_rank(const std::string& model_path, const std::string& features_path,
             const std::string& out_path, const SeedOption& seed, long mc_pairs) {
    const auto model = io::read_model_json(model_path);
    const auto [ids, feats] = io::read_features_jsonl(features_path);
    // the jitter configuration rides with the model so re-ranking reproduces
    // the transform that was fitted
    const auto scores = copula::to_uniform_scores(feats, ids, model.jitter_seed, model.jitter_eps);
    const auto ranking =
        copula::rank_incidents(model, scores, seed.require(), static_cast<size_t>(mc_pairs));

    std::map<std::string, size_t> index;
    for (size_t i = 0; i < ids.size(); ++i) index[ids[i]] = i;
    std::vector<io::RankedRecord> records;
    records.reserve(ranking.size());
    for (const auto& r : ranking) {
        io::RankedRecord rec;
        rec.score = r;
        const size_t i = index.at(r.incident_id);
        rec.features = feats[i];
        rec.percentiles = percentile_row(scores, i);
        records.push_back(std::move(rec));
    }
    io::write_ranked_jsonl(out_path, records);

    json summary;
    summary["ranked"] = records.size();
    summary["mc_pairs"] = mc_pairs;
    summary["lowest_p"] = records.empty() ? 0.0 : records.front().score.p;
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int cmd_eval_triage(const std::string& config_path, const SeedOption& seed_opt,
                    const std::string& out_csv, const std::string& out_summary) {
    const auto cfg = io::Config::load(config_path);
    const std::uint64_t seed = seed_opt.require();

    synth_eval::BaselineSpec spec;
    spec.n = static_cast<size_t>(cfg.get_int("eval", "n", 100000));
    spec.f1 = {cfg.get_num("eval", "alpha_f1", 2.23), cfg.get_num("eval", "xmin_f1", 10.0)};
    spec.f2_proxy = {cfg.get_num("eval", "alpha_f2", 2.36), cfg.get_num("eval", "xmin_f2", 1.0)};
    spec.f3 = {cfg.get_num("eval", "alpha_f3", 2.61), cfg.get_num("eval", "xmin_f3", 0.5)};
    spec.f4 = {cfg.get_num("eval", "alpha_f4", 2.57), cfg.get_num("eval", "xmin_f4", 0.5)};
    spec.seed = derive_seed(seed, 0xba5eu);
    const std::string dependence = cfg.get_str("eval", "dependence_model", "");
    if (!dependence.empty()) spec.dependence = io::read_model_json(dependence);

    auto dataset = synth_eval::generate_baseline(spec);

    synth_eval::PlantSpec plant;
    plant.type =
        synth_eval::campaign_from_string(cfg.get_str("eval", "campaign", "jointly_elevated"));
    plant.percentile = cfg.get_num("eval", "percentile", 0.85);
    plant.count = static_cast<size_t>(cfg.get_int("eval", "count", 1));
    std::optional<synth_eval::StagingLink> link;
    if (cfg.get_bool("eval", "staged_link", false)) link.emplace();
    const auto truth = synth_eval::plant_campaign(dataset, plant, link ? &*link : nullptr);

    synth_eval::EvalConfig ecfg;
    const std::string family = cfg.get_str("eval", "family", "gaussian");
    if (family == "auto") ecfg.auto_family = true;
    else ecfg.family = copula::family_from_string(family);
    ecfg.mc_pairs = static_cast<size_t>(cfg.get_int("eval", "mc_pairs", 256));
    ecfg.seed = seed;
    ecfg.jitter_eps = cfg.get_num("eval", "jitter_eps", 0.4);
    const auto ev = synth_eval::evaluate_triage(dataset, truth, ecfg);

    std::vector<std::vector<std::string>> rows;
    for (const auto& p : ev.plants)
        rows.push_back({"rank", p.id, std::to_string(p.multivariate_rank),
                        std::to_string(p.best_single_feature_rank)});
    if (ev.recall_applicable) {
        for (const auto& [k, v] : ev.recall_at_k)
            rows.push_back({"recall", std::to_string(k), io::format_decimal(v), ""});
    } else {
        rows.push_back({"recall", "all", "not-applicable", ""});
    }
    if (!out_csv.empty())
        io::write_csv(out_csv,
                      {"record", "plant_id_or_k", "multivariate_rank_or_recall",
                       "best_single_feature_rank"},
                      rows);

    json summary;
    summary["n_baseline"] = spec.n;
    summary["campaign"] = synth_eval::to_string(plant.type);
    summary["planted"] = truth.size();
    summary["family"] = copula::to_string(ev.model.family);
    json plants = json::array();
    for (const auto& p : ev.plants)
        plants.push_back({{"id", p.id},
                          {"multivariate_rank", p.multivariate_rank},
                          {"best_single_feature_rank", p.best_single_feature_rank}});
    summary["plants"] = std::move(plants);
    if (ev.recall_applicable) {
        json recall;
        for (const auto& [k, v] : ev.recall_at_k) recall[std::to_string(k)] = v;
        summary["recall_at_k"] = std::move(recall);
    } else {
        summary["recall_at_k"] = "not-applicable";
    }
    if (!out_summary.empty()) {
        std::ofstream out(out_summary);
        out << summary.dump(2) << "\n";
    }
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int cmd_report(const std::string& ranked_path, long top_k, const std::string& table_path,
               const std::string& ccdf_path) {
    const auto records = io::read_ranked_jsonl(ranked_path);
    if (records.empty()) throw ValidationError("ranked file is empty");
    const size_t k = std::min(static_cast<size_t>(top_k), records.size());

    std::ostringstream table;
    table << "rank  p             id                        pct(f1,f2,f3,f4)\n";
    char line[256];
    for (size_t i = 0; i < k; ++i) {
        const auto& r = records[i];
        std::snprintf(line, sizeof line, "%-5ld %-13.6g %-25s %.3f %.3f %.3f %.3f\n",
                      r.score.rank, r.score.p, r.score.incident_id.c_str(), r.percentiles[0],
                      r.percentiles[1], r.percentiles[2], r.percentiles[3]);
        table << line;
    }
    std::cout << table.str();
    if (!table_path.empty()) {
        std::ofstream out(table_path);
        out << table.str();
    }

    if (!ccdf_path.empty()) {
        std::vector<double> ps;
        ps.reserve(records.size());
        for (const auto& r : records) ps.push_back(r.score.p);
        std::vector<std::vector<std::string>> rows;
        for (const auto& [x, p] : tail_stats::ccdf(ps))
            rows.push_back({io::format_decimal(x), io::format_decimal(p)});
        io::write_csv(ccdf_path, {"p", "ccdf"}, rows);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"staged-MEV transfer simulation and forensic triage toolkit"};
    app.require_subcommand(1);

    int threads = 1;
    app.add_option("--threads", threads, "worker threads (default 1 for reproducibility)");

    std::string config_path, out_path, summary_path, ledger_path, prices_path, incidents_path;
    std::string features_path, model_path, ranked_path, ccdf_path, table_path, out_csv;
    std::string feature = "f1", family = "auto", chain_name = "ethereum", sweep;
    SeedOption seed;
    int trials = 200;
    double delay = 330.0, reaction = 0.0, jitter_eps = 0.4;
    long mc_pairs = 100000, min_tail = 50, top_k = 20;

    auto* simulate = app.add_subcommand("simulate", "stage covert transfers");
    simulate->require_subcommand(1);
    auto* sim_sandwich = simulate->add_subcommand("sandwich", "three-tx PBS bundle transfer");
    sim_sandwich->add_option("--config", config_path, "scenario config")->required();
    sim_sandwich->add_option("--out", out_path, "ledger JSONL output");
    sim_sandwich->add_option("--summary", summary_path, "summary JSON output");

    auto* sim_arb = simulate->add_subcommand("arbitrage", "two-leg FCFS transfer");
    sim_arb->add_option("--config", config_path, "scenario config")->required();
    sim_arb->add_option("--out", out_path, "ledger JSONL output");
    sim_arb->add_option("--summary", summary_path, "summary JSON output");
    add_seed(sim_arb, seed);

    auto* sim_timing = simulate->add_subcommand("arbitrum-timing", "submission-delay experiment");
    sim_timing->add_option("--config", config_path, "scenario config")->required();
    sim_timing->add_option("--trials", trials, "trials per delay");
    sim_timing->add_option("--delay", delay, "submission delay in ms");
    sim_timing->add_option("--sweep", sweep, "delay sweep lo:hi:step (overrides --delay)");
    sim_timing->add_option("--reaction", reaction, "competitor reaction time in ms");
    sim_timing->add_option("--out", out_path, "results CSV");
    add_seed(sim_timing, seed);

    auto* detect = app.add_subcommand("detect", "run the syntactic MEV detectors");
    detect->add_option("--ledger", ledger_path, "ledger JSONL")->required();
    detect->add_option("--config", config_path, "scenario config (pool/asset map)")->required();
    detect->add_option("--prices", prices_path, "price table CSV")->required();
    detect->add_option("--out", out_path, "incident JSONL output")->required();
    detect->add_option("--chain", chain_name, "ethereum|arbitrum");

    auto* feats = app.add_subcommand("features", "compute F1-F4 features");
    feats->add_option("--incidents", incidents_path, "incident JSONL")->required();
    feats->add_option("--out", out_path, "feature JSONL output")->required();

    auto* fit = app.add_subcommand("fit", "fit statistical models");
    fit->require_subcommand(1);
    auto* fit_tail = fit->add_subcommand("tail", "power-law tail fit");
    fit_tail->add_option("--features", features_path, "feature JSONL")->required();
    fit_tail->add_option("--feature", feature, "f1|f2|f3|f4")->required();
    fit_tail->add_option("--out", out_path, "fit JSON output");
    fit_tail->add_option("--ccdf", ccdf_path, "CCDF CSV output");
    fit_tail->add_option("--min-tail", min_tail, "minimum tail size");

    auto* fit_cop = fit->add_subcommand("copula", "elliptical dependence fit");
    fit_cop->add_option("--features", features_path, "feature JSONL")->required();
    fit_cop->add_option("--family", family, "gaussian|t|auto (auto = AIC winner)");
    fit_cop->add_option("--out", out_path, "model JSON output")->required();
    fit_cop->add_option("--jitter-eps", jitter_eps, "tie-break jitter width");
    add_seed(fit_cop, seed);

    auto* rank = app.add_subcommand("rank", "joint-survival triage ranking");
    rank->add_option("--model", model_path, "model JSON")->required();
    rank->add_option("--features", features_path, "feature JSONL")->required();
    rank->add_option("--out", out_path, "ranked JSONL output")->required();
    rank->add_option("--mc-pairs", mc_pairs, "antithetic MC pairs per incident");
    add_seed(rank, seed);

    auto* eval = app.add_subcommand("eval", "evaluate triage quality");
    eval->require_subcommand(1);
    auto* eval_triage = eval->add_subcommand("triage", "planted-campaign evaluation");
    eval_triage->add_option("--config", config_path, "eval config")->required();
    eval_triage->add_option("--out-csv", out_csv, "per-plant rank CSV");
    eval_triage->add_option("--out-summary", summary_path, "summary JSON");
    add_seed(eval_triage, seed);

    auto* report = app.add_subcommand("report", "human-readable triage report");
    report->add_option("--ranked", ranked_path, "ranked JSONL")->required();
    report->add_option("--top-k", top_k, "rows to print");
    report->add_option("--out-table", table_path, "table output file");
    report->add_option("--out-ccdf", ccdf_path, "CCDF CSV of p");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

#ifdef _OPENMP
    omp_set_num_threads(threads > 0 ? threads : 1);
#endif

    try {
        if (sim_sandwich->parsed())
            return cmd_simulate_sandwich(config_path, out_path, summary_path);
        if (sim_arb->parsed())
            return cmd_simulate_arbitrage(config_path, seed, out_path, summary_path);
        if (sim_timing->parsed())
            return cmd_simulate_timing(config_path, seed, trials, delay, sweep, reaction, out_path);
        if (detect->parsed())
            return cmd_detect(ledger_path, config_path, prices_path, out_path, chain_name);
        if (feats->parsed()) return cmd_features(incidents_path, out_path);
        if (fit_tail->parsed())
            return cmd_fit_tail(features_path, feature, out_path, ccdf_path, min_tail);
        if (fit_cop->parsed())
            return cmd_fit_copula(features_path, family, seed, out_path, jitter_eps);
        if (rank->parsed()) return cmd_rank(model_path, features_path, out_path, seed, mc_pairs);
        if (eval_triage->parsed()) return cmd_eval_triage(config_path, seed, out_csv, summary_path);
        if (report->parsed()) return cmd_report(ranked_path, top_k, table_path, ccdf_path);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
