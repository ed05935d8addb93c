#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "covertflow/errors.hpp"
#include "covertflow/io.hpp"

using namespace covertflow;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/covertflow-test-" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("config parses sections, comments and typed values") {
    const auto cfg = io::Config::parse_text(
        "# comment\n"
        "[pool]\n"
        "reserve_base = 100\n"
        "fee_bps = 30\n"
        "base = BTC\n"
        "\n"
        "[staging.sandwich]\n"
        "colluding = true\n");
    CHECK(cfg.get_num("pool", "reserve_base", 0.0) == 100.0);
    CHECK(cfg.get_int("pool", "fee_bps", 0) == 30);
    CHECK(cfg.get_str("pool", "base", "?") == "BTC");
    CHECK(cfg.get_bool("staging.sandwich", "colluding", false));
    CHECK(cfg.get_num("pool", "missing", 7.5) == 7.5);
    CHECK_FALSE(cfg.has("pool", "missing"));
    CHECK_THROWS_AS(io::Config::parse_text("[x]\nbad line\n"), ValidationError);
    CHECK_THROWS_AS(io::Config::parse_text("[x]\nk = notanumber\n").get_num("x", "k", 0.0),
                    ValidationError);
}

TEST_CASE("decimal strings round-trip exactly") {
    for (double v : {0.1, 1.0 / 3.0, 33.33333333333332, 1e-17, 123456789.123456789}) {
        CHECK(io::parse_decimal(io::format_decimal(v)) == v);
    }
}

TEST_CASE("incident records survive a write-read cycle with unknown fields") {
    TempFile f("incidents.jsonl");
    {
        std::ofstream out(f.path);
        out << R"({"id":"a","chain":"ethereum","mev_type":"sandwich","block":7,)"
            << R"("extractor":"X","extractee":"V","profit_usd":"123.456",)"
            << R"("capital_usd":"1000","loss_usd":"123.456","custom_tag":"keep-me"})"
            << "\n";
    }
    auto records = io::read_incidents_jsonl(f.path);
    REQUIRE(records.size() == 1);
    CHECK(records[0].incident.profit_usd == 123.456);
    CHECK(records[0].extra.at("custom_tag") == "keep-me");

    TempFile g("incidents2.jsonl");
    io::write_incidents_jsonl(g.path, records);
    const auto again = io::read_incidents_jsonl(g.path);
    REQUIRE(again.size() == 1);
    CHECK(again[0].incident.id == "a");
    CHECK(again[0].incident.block == 7);
    CHECK(again[0].incident.capital_usd == 1000.0);
    CHECK(again[0].extra.at("custom_tag") == "keep-me");

    // byte-identical on a rewrite
    TempFile h("incidents3.jsonl");
    io::write_incidents_jsonl(h.path, again);
    std::ifstream in1(g.path), in2(h.path);
    std::string s1((std::istreambuf_iterator<char>(in1)), {});
    std::string s2((std::istreambuf_iterator<char>(in2)), {});
    CHECK(s1 == s2);
}

TEST_CASE("ledger and model files round-trip") {
    TempFile f("ledger.jsonl");
    std::vector<LedgerTx> ledger(2);
    ledger[0] = {"t0", 0, 0, "A", "pool",
                 {{"pool", amm::Direction::BaseForQuote, 1.5, 12.25}}, 0.0};
    ledger[1] = {"t1", 1, 0, "B", "C", {}, 3.5};
    io::write_ledger_jsonl(f.path, ledger);
    const auto back = io::read_ledger_jsonl(f.path);
    REQUIRE(back.size() == 2);
    CHECK(back[0].swaps.size() == 1);
    CHECK(back[0].swaps[0].amount_out == 12.25);
    CHECK(back[1].transfer_amount == 3.5);

    TempFile m("model.json");
    copula::CopulaModel model;
    model.family = copula::Family::StudentT;
    model.dim = 4;
    model.R = linalg::identity(4);
    model.R[1] = model.R[4] = 0.25;
    model.nu = 13;
    model.loglik = 1234.5;
    model.aic = -2455.0;
    model.n = 999;
    model.jitter_seed = 42;
    io::write_model_json(m.path, model);
    const auto mm = io::read_model_json(m.path);
    CHECK(mm.family == copula::Family::StudentT);
    CHECK(mm.nu == 13);
    CHECK(mm.R == model.R);
    CHECK(mm.jitter_seed == 42);
}

TEST_CASE("missing files raise MissingFile") {
    CHECK_THROWS_AS(io::Config::load("/nonexistent/path.cfg"), MissingFile);
    CHECK_THROWS_AS(io::read_incidents_jsonl("/nonexistent/x.jsonl"), MissingFile);
}
