#include <doctest.h>

#include <set>

#include "covertflow/detection.hpp"
#include "covertflow/errors.hpp"
#include "covertflow/staging.hpp"
#include "covertflow/synth_eval.hpp"

using namespace covertflow;

namespace {

features::PriceTable toy_prices() {
    features::PriceTable p;
    p.set("base", 10.0);
    p.set("quote", 1.0);
    return p;
}

detection::AssetMap toy_assets(const std::string& pool = "pool") {
    return {{pool, {"base", "quote"}}};
}

std::vector<LedgerTx> staged_toy_ledger() {
    amm::PoolState pool{100.0, 1000.0, 0};
    staging::SandwichParams params;
    params.sender_capital = 50.0;
    params.receiver_base = 50.0;
    params.receiver_quote = 167.0;
    const auto plan = staging::plan_sandwich(pool, params);
    return staging::execute_sandwich(plan, pool, staging::PbsConfig{}).ledger;
}

} // namespace

TEST_CASE("the staged toy block is classified as one ordinary sandwich") {
    const auto incidents = detection::detect_sandwich(staged_toy_ledger(), toy_assets(), toy_prices());
    REQUIRE(incidents.size() == 1);
    const auto& inc = incidents[0];
    CHECK(inc.mev_type == MevType::Sandwich);
    CHECK(inc.extractor == "R");
    CHECK(inc.extractee == "S");
    // loss of 33.33 base-equivalents at 10 usd per base
    CHECK(inc.extractee_loss_usd / 10.0 == doctest::Approx(100.0 / 3.0).epsilon(1e-6));
    CHECK(inc.extractor_profit_usd <= inc.extractee_loss_usd + 1e-9);
    CHECK(inc.extractee_capital_usd == doctest::Approx(500.0).epsilon(1e-9));
}

TEST_CASE("a non-reversing third leg is not a sandwich") {
    auto ledger = staged_toy_ledger();
    REQUIRE(ledger[2].swaps.size() == 1);
    ledger[2].swaps[0].direction = ledger[0].swaps[0].direction; // same way as the frontrun
    CHECK(detection::detect_sandwich(ledger, toy_assets(), toy_prices()).empty());
}

TEST_CASE("non-adjacent triples are not flagged") {
    auto ledger = staged_toy_ledger();
    ledger[2].position = 5; // break adjacency
    CHECK(detection::detect_sandwich(ledger, toy_assets(), toy_prices()).empty());
}

TEST_CASE("benign single-swap blocks produce zero detections") {
    detection::AssetMap assets;
    features::PriceTable prices;
    const auto ledger = synth_eval::generate_benign_blocks(2024, 1000, &assets, &prices);
    CHECK(detection::detect_sandwich(ledger, assets, prices).empty());
    CHECK(detection::detect_arbitrage(ledger, assets, prices).empty());
}

TEST_CASE("a staged two-block arbitrage is classified as standard arbitrage") {
    amm::PoolState pool_a{200.0, 2000.0, 0};
    amm::PoolState pool_b{220.0, 2200.0, 0};
    staging::ArbitrageParams params;
    params.sender_capital = 40.0;
    params.receiver_capital = 500.0;
    const auto plan = staging::plan_arbitrage(pool_a, pool_b, params);
    chain::SequencerConfig seq;
    seq.seed = 11;
    const auto exec = staging::execute_arbitrage(plan, pool_a, pool_b, seq, 330.0);
    REQUIRE(exec.success);

    detection::AssetMap assets{{"pool_a", {"base", "quote"}}, {"pool_b", {"base", "quote"}}};
    const auto incidents = detection::detect_arbitrage(exec.ledger, assets, toy_prices());
    REQUIRE(incidents.size() == 1);
    CHECK(incidents[0].mev_type == MevType::Arbitrage);
    CHECK(incidents[0].extractor == "R");
    CHECK(incidents[0].extractee == "S");
    CHECK_FALSE(incidents[0].co_inclusion_warning);
    CHECK(incidents[0].extractor_profit_quote ==
          doctest::Approx(plan.predicted_transfer).epsilon(1e-9));
}

TEST_CASE("a zero-gain cycle is not an incident") {
    std::vector<LedgerTx> ledger(2);
    ledger[0] = {"inflate", 0, 0, "S", "pool_a",
                 {{"pool_a", amm::Direction::BaseForQuote, 10.0, 90.0}}, 0.0};
    ledger[1] = {"cycle", 1, 0, "R", "pool_b",
                 {{"pool_a", amm::Direction::QuoteForBase, 50.0, 6.0},
                  {"pool_b", amm::Direction::BaseForQuote, 6.0, 50.0}}, 0.0};
    detection::AssetMap assets{{"pool_a", {"base", "quote"}}, {"pool_b", {"base", "quote"}}};
    CHECK(detection::detect_arbitrage(ledger, assets, toy_prices()).empty());
    // positive gain flips it into an incident
    ledger[1].swaps[1].amount_out = 55.0;
    CHECK(detection::detect_arbitrage(ledger, assets, toy_prices()).size() == 1);
}

TEST_CASE("co-included legs are flagged with a deniability warning") {
    std::vector<LedgerTx> ledger(2);
    ledger[0] = {"inflate", 3, 0, "S", "pool_a",
                 {{"pool_a", amm::Direction::BaseForQuote, 10.0, 90.0}}, 0.0};
    ledger[1] = {"cycle", 3, 1, "R", "pool_b",
                 {{"pool_a", amm::Direction::QuoteForBase, 50.0, 6.0},
                  {"pool_b", amm::Direction::BaseForQuote, 6.0, 58.0}}, 0.0};
    detection::AssetMap assets{{"pool_a", {"base", "quote"}}, {"pool_b", {"base", "quote"}}};
    const auto incidents = detection::detect_arbitrage(ledger, assets, toy_prices());
    REQUIRE(incidents.size() == 1);
    CHECK(incidents[0].co_inclusion_warning);
}

TEST_CASE("degree-capped clustering leaves sender and receiver unlinked") {
    const auto sc = synth_eval::generate_sandwich_scenario(7);
    const auto graph = detection::build_transfer_graph(sc.ledger);
    const auto clusters = detection::cluster_addresses(graph, 50);
    const int cs = clusters.cluster_of(sc.sender);
    const int cr = clusters.cluster_of(sc.receiver);
    REQUIRE(cs >= 0);
    REQUIRE(cr >= 0);
    CHECK(cs != cr);
    CHECK(clusters.suppressed_edges > 0);
}

TEST_CASE("retaining the DEX merges nearly everything into one component") {
    const auto sc = synth_eval::generate_sandwich_scenario(8);
    const auto graph = detection::build_transfer_graph(sc.ledger);
    const auto clusters = detection::cluster_addresses(graph, SIZE_MAX);
    size_t largest = 0, total = 0;
    for (const auto& c : clusters.clusters) {
        largest = std::max(largest, c.size());
        total += c.size();
    }
    CHECK(clusters.suppressed_edges == 0);
    CHECK(static_cast<double>(largest) >= 0.9 * static_cast<double>(total));
}

TEST_CASE("a direct transfer keeps the endpoints in one cluster") {
    std::vector<LedgerTx> ledger(1);
    ledger[0] = {"t0", 0, 0, "S", "R", {}, 5.0};
    const auto clusters =
        detection::cluster_addresses(detection::build_transfer_graph(ledger), 50);
    CHECK(clusters.cluster_of("S") == clusters.cluster_of("R"));
    CHECK(clusters.cluster_of("S") >= 0);
}

TEST_CASE("staged scenarios are always detected with the intended type") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto snd = synth_eval::generate_sandwich_scenario(seed);
        const auto si = detection::detect_sandwich(snd.ledger, snd.assets, snd.prices);
        REQUIRE(si.size() >= 1);
        bool found = false;
        for (const auto& inc : si) {
            found = found || (inc.extractor == snd.receiver && inc.extractee == snd.sender);
            // fee-less extraction cannot outrun the staged loss
            CHECK(inc.extractor_profit_usd <=
                  inc.extractee_loss_usd + 1e-9 * std::max(1.0, inc.extractee_loss_usd));
        }
        CHECK(found);

        const auto arb = synth_eval::generate_arbitrage_scenario(seed);
        const auto ai = detection::detect_arbitrage(arb.ledger, arb.assets, arb.prices);
        REQUIRE(ai.size() >= 1);
        found = false;
        for (const auto& inc : ai) {
            found = found || (inc.extractor == arb.receiver && inc.extractee == arb.sender);
            CHECK(inc.extractor_profit_usd <=
                  inc.extractee_loss_usd + 1e-9 * std::max(1.0, inc.extractee_loss_usd));
        }
        CHECK(found);
    }
}
