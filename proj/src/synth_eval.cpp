#include "covertflow/synth_eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "covertflow/errors.hpp"
#include "covertflow/market.hpp"
#include "covertflow/rng.hpp"
#include "covertflow/staging.hpp"

namespace covertflow::synth_eval {

void BaselineSpec::validate() const {
    for (const auto* m : {&f1, &f2_proxy, &f3, &f4}) {
        if (!(m->alpha > 1.0)) throw ValidationError("marginal alpha must exceed 1");
        if (!(m->x_min > 0.0)) throw ValidationError("marginal x_min must be positive");
    }
    if (dependence && dependence->dim != copula::kFeatureDim)
        throw ValidationError("dependence model must be 4-dimensional");
}

std::string to_string(CampaignType t) {
    switch (t) {
    case CampaignType::ExtremeVolume: return "extreme_volume";
    case CampaignType::RepeatedPair: return "repeated_pair";
    default: return "jointly_elevated";
    }
}

CampaignType campaign_from_string(const std::string& s) {
    if (s == "extreme_volume") return CampaignType::ExtremeVolume;
    if (s == "repeated_pair") return CampaignType::RepeatedPair;
    if (s == "jointly_elevated") return CampaignType::JointlyElevated;
    throw ValidationError("unknown campaign type: " + s);
}

namespace {

// CCDF inverse: larger u maps to a larger value
double pareto_inverse(const ParetoMarginal& m, double u) {
    return m.x_min * std::pow(1.0 - u, -1.0 / (m.alpha - 1.0));
}

Incident make_incident(const BaselineSpec& spec, std::string id, std::string extractor,
                       std::string extractee, const FeatureVector& f) {
    Incident inc;
    inc.id = std::move(id);
    inc.chain = spec.chain;
    inc.mev_type = spec.mev_type;
    inc.extractor = std::move(extractor);
    inc.extractee = std::move(extractee);
    inc.profit_usd = f.f1_volume_usd;
    inc.loss_usd = f.f1_volume_usd; // fee-less staged accounting: profit equals loss
    inc.capital_usd = f.f2_ratio > 0.0 ? inc.loss_usd / f.f2_ratio : inc.loss_usd * 10.0;
    return inc;
}

} // namespace

SynthDataset generate_baseline(const BaselineSpec& spec) {
    spec.validate();
    SynthDataset ds;
    if (spec.n == 0) return ds;

    std::vector<std::array<double, copula::kFeatureDim>> uniforms;
    if (spec.dependence) {
        uniforms = copula::sample_copula(*spec.dependence, spec.n, spec.seed);
    } else {
        uniforms.resize(spec.n);
        Xoshiro256pp rng(derive_seed(spec.seed, 0x62617365u));
        for (auto& row : uniforms)
            for (auto& v : row) v = rng.uniform_open();
    }

    ds.incidents.reserve(spec.n);
    ds.features.reserve(spec.n);
    ds.ids.reserve(spec.n);
    for (size_t i = 0; i < spec.n; ++i) {
        const auto& u = uniforms[i];
        FeatureVector f;
        f.f1_volume_usd = pareto_inverse(spec.f1, u[0]);
        f.f2_ratio = 1.0 - 1.0 / pareto_inverse(spec.f2_proxy, u[1]);
        const double f4_raw = pareto_inverse(spec.f4, u[3]);
        f.f4_extractee_freq = static_cast<long>(std::ceil(f4_raw));
        const double f3_raw = pareto_inverse(spec.f3, u[2]);
        f.f3_bilateral_freq =
            std::max<long>(1, std::min<long>(static_cast<long>(std::ceil(f3_raw)),
                                             f.f4_extractee_freq));
        std::string id = "base-" + std::to_string(i);
        ds.incidents.push_back(make_incident(spec, id, "x-" + std::to_string(i),
                                             "v-" + std::to_string(i), f));
        ds.incidents.back().block = static_cast<long>(i);
        ds.features.push_back(f);
        ds.ids.push_back(std::move(id));
    }
    return ds;
}

namespace {

double feature_quantile(const SynthDataset& ds, int feature, double p) {
    std::vector<double> vals(ds.features.size());
    for (size_t i = 0; i < ds.features.size(); ++i) vals[i] = ds.features[i].get(feature);
    std::sort(vals.begin(), vals.end());
    const size_t idx = std::min(vals.size() - 1,
                                static_cast<size_t>(std::floor(p * static_cast<double>(vals.size()))));
    return vals[idx];
}

double median_feature(const SynthDataset& ds, int feature) {
    return feature_quantile(ds, feature, 0.5);
}

// stage a fully-funded sandwich whose transfer is worth target_usd
Incident staged_incident(const StagingLink& link, double target_usd, const std::string& id,
                         const std::string& extractor, const std::string& extractee) {
    amm::PoolState pool{link.pool_reserve_base, link.pool_reserve_base * link.pool_quote_ratio, 0};
    const double target_base = target_usd / link.base_price_usd;

    // transfer grows monotonically with sender capital; bisect to the target
    auto transfer_for = [&](double capital) {
        staging::SandwichParams params;
        params.sender_capital = capital;
        params.receiver_base = 0.5 * pool.reserve_base;
        params.receiver_quote = pool.reserve_quote; // ample, fully recoverable
        return staging::plan_sandwich(pool, params);
    };
    double lo = 0.0, hi = pool.reserve_base;
    while (transfer_for(hi).predicted_transfer < target_base) {
        pool.reserve_base *= 2.0;
        pool.reserve_quote *= 2.0;
        hi = pool.reserve_base;
    }
    staging::SandwichPlan plan = transfer_for(hi);
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        plan = transfer_for(mid);
        if (plan.predicted_transfer < target_base) lo = mid;
        else hi = mid;
    }
    const auto exec = staging::execute_sandwich(plan, pool, staging::PbsConfig{});

    Incident inc;
    inc.id = id;
    inc.extractor = extractor;
    inc.extractee = extractee;
    inc.profit_usd = exec.realized_transfer * link.base_price_usd;
    inc.capital_usd = plan.params.sender_capital * link.base_price_usd;
    inc.loss_usd = plan.sender_loss * link.base_price_usd;
    if (inc.loss_usd >= inc.capital_usd) inc.loss_usd = inc.capital_usd * (1.0 - 1e-9);
    return inc;
}

} // namespace

std::vector<std::string> plant_campaign(SynthDataset& dataset, const PlantSpec& plant,
                                        const StagingLink* link) {
    if (dataset.features.empty()) throw EmptyInput("plant_campaign: empty baseline");
    if (!(plant.percentile > 0.0 && plant.percentile < 1.0))
        throw ValidationError("plant percentile must lie in (0,1)");
    if (plant.count == 0) return {};

    std::vector<std::string> planted;
    const size_t start = dataset.incidents.size();
    for (size_t k = 0; k < plant.count; ++k) {
        const std::string id = "plant-" + to_string(plant.type) + "-" + std::to_string(k);
        std::string extractor = "plant-extractor-" + std::to_string(k);
        std::string extractee = "plant-extractee-" + std::to_string(k);
        FeatureVector f;
        switch (plant.type) {
        case CampaignType::ExtremeVolume:
            // nudged above the quantile so an extreme percentile plants a
            // strict dataset maximum
            f.f1_volume_usd = feature_quantile(dataset, 0, plant.percentile) * 1.0001;
            f.f2_ratio = median_feature(dataset, 1);
            f.f3_bilateral_freq = 1;
            f.f4_extractee_freq = 1;
            break;
        case CampaignType::RepeatedPair: {
            // one extractor revisiting one extractee `count` times
            extractor = "plant-extractor";
            extractee = "plant-extractee";
            f.f1_volume_usd = median_feature(dataset, 0);
            f.f2_ratio = median_feature(dataset, 1);
            f.f3_bilateral_freq = static_cast<long>(plant.count);
            f.f4_extractee_freq = static_cast<long>(plant.count);
            break;
        }
        case CampaignType::JointlyElevated: {
            f.f1_volume_usd = feature_quantile(dataset, 0, plant.percentile);
            f.f2_ratio = feature_quantile(dataset, 1, plant.percentile);
            const long f4 = static_cast<long>(
                std::llround(std::ceil(feature_quantile(dataset, 3, plant.percentile))));
            const long f3 = static_cast<long>(
                std::llround(std::ceil(feature_quantile(dataset, 2, plant.percentile))));
            f.f4_extractee_freq = std::max<long>(1, f4);
            f.f3_bilateral_freq = std::max<long>(1, std::min(f3, f.f4_extractee_freq));
            break;
        }
        }

        Incident inc;
        if (link && plant.type != CampaignType::JointlyElevated) {
            inc = staged_incident(*link, f.f1_volume_usd, id, extractor, extractee);
            f.f1_volume_usd = inc.profit_usd;
            f.f2_ratio = inc.capital_usd > 0.0 ? inc.loss_usd / inc.capital_usd : 0.0;
        } else {
            BaselineSpec dummy;
            if (!dataset.incidents.empty()) {
                dummy.chain = dataset.incidents.front().chain;
                dummy.mev_type = dataset.incidents.front().mev_type;
            }
            inc = make_incident(dummy, id, extractor, extractee, f);
        }
        inc.id = id;
        inc.block = static_cast<long>(start + k);
        dataset.incidents.push_back(inc);
        dataset.features.push_back(f);
        dataset.ids.push_back(id);
        planted.push_back(id);
    }
    return planted;
}

TriageEvaluation evaluate_triage(const SynthDataset& dataset,
                                 const std::vector<std::string>& ground_truth,
                                 const EvalConfig& cfg) {
    if (dataset.features.size() < 100)
        throw ValidationError("evaluate_triage: need at least 100 incidents for the fit");

    TriageEvaluation ev;
    const auto scores = copula::to_uniform_scores(dataset.features, dataset.ids,
                                                  derive_seed(cfg.seed, 0x6a69u), cfg.jitter_eps);
    ev.model = cfg.auto_family ? copula::fit_copula_auto(scores)
                               : copula::fit_copula(scores, cfg.family);
    ev.ranking = copula::rank_incidents(ev.model, scores, derive_seed(cfg.seed, 0x726bu),
                                        cfg.mc_pairs);

    std::map<std::string, long> multivariate_rank;
    for (const auto& s : ev.ranking) multivariate_rank[s.incident_id] = s.rank;

    // per-feature descending orderings; rank 1 = most extreme
    std::map<std::string, long> best_single;
    {
        const size_t n = dataset.features.size();
        std::vector<size_t> order(n);
        for (int j = 0; j < copula::kFeatureDim; ++j) {
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
                const double va = dataset.features[a].get(j), vb = dataset.features[b].get(j);
                if (va != vb) return va > vb;
                return dataset.ids[a] < dataset.ids[b];
            });
            for (size_t r = 0; r < n; ++r) {
                const auto& id = dataset.ids[order[r]];
                auto [it, inserted] = best_single.emplace(id, static_cast<long>(r + 1));
                if (!inserted) it->second = std::min(it->second, static_cast<long>(r + 1));
            }
        }
    }

    for (const auto& id : ground_truth) {
        PlantOutcome o;
        o.id = id;
        o.multivariate_rank = multivariate_rank.count(id) ? multivariate_rank[id] : -1;
        o.best_single_feature_rank = best_single.count(id) ? best_single[id] : -1;
        ev.plants.push_back(std::move(o));
    }

    if (ground_truth.empty()) {
        ev.recall_applicable = false;
    } else {
        for (size_t k : cfg.recall_ks) {
            size_t hits = 0;
            for (const auto& p : ev.plants)
                if (p.multivariate_rank > 0 && static_cast<size_t>(p.multivariate_rank) <= k)
                    ++hits;
            ev.recall_at_k[k] = static_cast<double>(hits) / static_cast<double>(ground_truth.size());
        }
    }
    return ev;
}

// ---------------------------------------------------------------------------
// staged-scenario generation

namespace {

features::PriceTable scenario_prices(double spot_quote_per_base) {
    features::PriceTable prices;
    prices.set("quote", 1.0);
    prices.set("base", spot_quote_per_base);
    return prices;
}

void add_background(Scenario& sc, market::Market& mkt, Xoshiro256pp& rng, long first_block,
                    size_t n_wallets, const std::vector<std::string>& pool_ids) {
    long block = first_block;
    int pos = 0;
    std::vector<std::string> actives;
    for (size_t w = 0; w < n_wallets; ++w) {
        const std::string wallet = "wallet-" + std::to_string(w);
        actives.push_back(wallet);
        // round-robin keeps every pool's degree above the clustering threshold
        const auto& pool_id = pool_ids[w % pool_ids.size()];
        auto& info = mkt.pool(pool_id);
        const bool sell_base = rng.uniform01() < 0.5;
        amm::SwapOrder order;
        order.trader = wallet;
        order.pool_id = pool_id;
        order.direction = sell_base ? amm::Direction::BaseForQuote : amm::Direction::QuoteForBase;
        const double reserve_in =
            sell_base ? info.state.reserve_base : info.state.reserve_quote;
        order.amount_in = reserve_in * rng.uniform(0.001, 0.01);

        chain::SimTx tx;
        tx.id = "bg-" + std::to_string(w);
        tx.submitter = wallet;
        tx.payload = chain::SwapPayload{{order}, false};
        sc.ledger.push_back(mkt.apply(tx, block, pos));
        if (++pos >= 5) {
            pos = 0;
            ++block;
        }
    }
    // a few plain wallet-to-wallet transfers
    ++block;
    for (int t = 0; t < 8 && actives.size() > 2; ++t) {
        const auto& a = actives[rng.below(actives.size())];
        const auto& b = actives[rng.below(actives.size())];
        if (a == b) continue;
        LedgerTx rec;
        rec.id = "tr-" + std::to_string(t);
        rec.block = block;
        rec.position = t;
        rec.from = a;
        rec.to = b;
        rec.transfer_amount = rng.uniform(0.1, 2.0);
        sc.ledger.push_back(std::move(rec));
    }
    sc.address_count = n_wallets + 2 + pool_ids.size(); // wallets, sender/receiver, pools
}

} // namespace

Scenario generate_sandwich_scenario(std::uint64_t seed) {
    Xoshiro256pp rng(derive_seed(seed, 0x736e64u));
    Scenario sc;
    sc.staged_type = MevType::Sandwich;
    sc.sender = "staged-sender";
    sc.receiver = "staged-receiver";
    sc.dex = "pool";

    amm::PoolState pool;
    pool.reserve_base = rng.uniform(50.0, 500.0);
    pool.reserve_quote = pool.reserve_base * rng.uniform(2.0, 50.0);
    pool.fee_bps = 0;

    staging::SandwichParams params;
    params.sender = sc.sender;
    params.receiver = sc.receiver;
    params.pool_id = sc.dex;
    params.sender_capital = pool.reserve_base * rng.uniform(0.05, 0.4);
    params.receiver_base = pool.reserve_base * rng.uniform(0.1, 0.5);
    params.receiver_quote = pool.reserve_quote; // fully funded backrun

    const auto plan = staging::plan_sandwich(pool, params);
    const auto exec = staging::execute_sandwich(plan, pool, staging::PbsConfig{});
    sc.ledger = exec.ledger;
    sc.staged_transfer = exec.realized_transfer;

    market::Market mkt;
    mkt.add_pool({sc.dex, "base", "quote", exec.pool_after});
    sc.assets = market::asset_map(mkt);
    sc.prices = scenario_prices(plan.pre_spot);

    const size_t n_wallets = 110 + rng.below(60);
    add_background(sc, mkt, rng, exec.block.index + 1, n_wallets, {sc.dex});
    return sc;
}

Scenario generate_arbitrage_scenario(std::uint64_t seed) {
    Xoshiro256pp rng(derive_seed(seed, 0x61726274u));
    Scenario sc;
    sc.staged_type = MevType::Arbitrage;
    sc.sender = "staged-sender";
    sc.receiver = "staged-receiver";
    sc.dex = "pool_a";

    amm::PoolState pool_a;
    pool_a.reserve_base = rng.uniform(100.0, 600.0);
    pool_a.reserve_quote = pool_a.reserve_base * rng.uniform(4.0, 30.0);
    amm::PoolState pool_b;
    pool_b.reserve_base = pool_a.reserve_base * rng.uniform(0.6, 1.6);
    pool_b.reserve_quote = pool_b.reserve_base * (pool_a.reserve_quote / pool_a.reserve_base);

    staging::ArbitrageParams params;
    params.sender = sc.sender;
    params.receiver = sc.receiver;
    params.sender_capital = pool_a.reserve_base * rng.uniform(0.05, 0.3);
    params.receiver_capital = pool_a.reserve_quote; // ample
    const auto plan = staging::plan_arbitrage(pool_a, pool_b, params);

    chain::SequencerConfig seq;
    seq.seed = derive_seed(seed, 0x73657175u);
    seq.boundary_phase_ms = rng.uniform01() * seq.block_interval_ms;
    const auto exec = staging::execute_arbitrage(plan, pool_a, pool_b, seq, 330.0);
    sc.ledger = exec.ledger;
    sc.staged_transfer = exec.realized_transfer;

    market::Market mkt;
    mkt.add_pool({"pool_a", "base", "quote", exec.pool_a_after});
    mkt.add_pool({"pool_b", "base", "quote", exec.pool_b_after});
    sc.assets = market::asset_map(mkt);
    sc.prices = scenario_prices(pool_a.spot_rate());

    long last_block = 0;
    for (const auto& rec : sc.ledger) last_block = std::max(last_block, rec.block);
    const size_t n_wallets = 110 + rng.below(60);
    add_background(sc, mkt, rng, last_block + 1, n_wallets, {"pool_a", "pool_b"});
    return sc;
}

std::vector<LedgerTx> generate_benign_blocks(std::uint64_t seed, std::size_t n_blocks,
                                             detection::AssetMap* assets_out,
                                             features::PriceTable* prices_out) {
    Xoshiro256pp rng(derive_seed(seed, 0x62656eu));
    market::Market mkt;
    mkt.add_pool({"pool", "base", "quote", {1000.0, 10000.0, 0}});
    std::vector<LedgerTx> ledger;
    size_t wallet = 0;
    for (size_t b = 0; b < n_blocks; ++b) {
        const int n_txs = 3 + static_cast<int>(rng.below(6));
        for (int pos = 0; pos < n_txs; ++pos) {
            auto& info = mkt.pool("pool");
            const bool sell_base = rng.uniform01() < 0.5;
            amm::SwapOrder order;
            order.trader = "benign-" + std::to_string(wallet++);
            order.pool_id = "pool";
            order.direction =
                sell_base ? amm::Direction::BaseForQuote : amm::Direction::QuoteForBase;
            const double reserve_in =
                sell_base ? info.state.reserve_base : info.state.reserve_quote;
            order.amount_in = reserve_in * rng.uniform(0.0005, 0.01);
            chain::SimTx tx;
            tx.id = "benign-" + std::to_string(b) + "-" + std::to_string(pos);
            tx.submitter = order.trader;
            tx.payload = chain::SwapPayload{{order}, false};
            ledger.push_back(mkt.apply(tx, static_cast<long>(b), pos));
        }
    }
    if (assets_out) *assets_out = market::asset_map(mkt);
    if (prices_out) *prices_out = scenario_prices(10.0);
    return ledger;
}

} // namespace covertflow::synth_eval
