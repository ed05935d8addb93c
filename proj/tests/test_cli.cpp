// End-to-end checks of the command-line surface: exit codes, determinism and
// the wiring between subcommands. Spawns the real binary.
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "covertflow/copula.hpp"
#include "covertflow/io.hpp"
#include "covertflow/synth_eval.hpp"

using json = nlohmann::json;

namespace {

#ifndef COVERTFLOW_BIN
#error "COVERTFLOW_BIN must point at the CLI binary"
#endif
#ifndef COVERTFLOW_CONFIG_DIR
#error "COVERTFLOW_CONFIG_DIR must point at the shipped configs"
#endif

const std::string kBin = COVERTFLOW_BIN;
const std::string kConfigs = COVERTFLOW_CONFIG_DIR;

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run(const std::string& args, const std::string& env_prefix = "") {
    const std::string cmd =
        (env_prefix.empty() ? "" : env_prefix + " ") + kBin + " " + args + " 2>/dev/null";
    std::array<char, 4096> buf{};
    std::string output;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (fgets(buf.data(), buf.size(), pipe)) output += buf.data();
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), output};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("unknown subcommands and missing seeds exit with code 1") {
    CHECK(run("frobnicate").exit_code == 1);
    CHECK(run("simulate sandwich").exit_code == 1); // missing --config
    // randomized command without --seed or env
    CHECK(run("simulate arbitrage --config " + kConfigs + "/arbitrage.cfg").exit_code == 1);
    CHECK(run("detect --ledger /nope --config /nope --prices /nope --out /tmp/x").exit_code == 1);
}

TEST_CASE("the reference sandwich flows from simulate through detect to features") {
    const auto sim = run("simulate sandwich --config " + kConfigs +
                         "/toy_sandwich.cfg --out /tmp/cf-cli-ledger.jsonl");
    REQUIRE(sim.exit_code == 0);
    const auto summary = json::parse(sim.output);
    CHECK(std::stod(summary["realized_transfer"].get<std::string>()) ==
          doctest::Approx(100.0 / 3.0).epsilon(1e-9));
    CHECK(std::stod(summary["effectiveness_pct"].get<std::string>()) ==
          doctest::Approx(200.0 / 3.0).epsilon(1e-9));

    const auto det = run("detect --ledger /tmp/cf-cli-ledger.jsonl --config " + kConfigs +
                         "/toy_sandwich.cfg --prices " + kConfigs +
                         "/prices.csv --out /tmp/cf-cli-incidents.jsonl");
    REQUIRE(det.exit_code == 0);
    CHECK(json::parse(det.output)["sandwich_incidents"] == 1);

    const auto feat =
        run("features --incidents /tmp/cf-cli-incidents.jsonl --out /tmp/cf-cli-features.jsonl");
    REQUIRE(feat.exit_code == 0);
    CHECK(json::parse(feat.output)["accepted"] == 1);
}

TEST_CASE("randomized commands are byte-identical under a repeated seed") {
    using namespace covertflow;
    // synthesize a feature file large enough for the copula fit
    synth_eval::BaselineSpec spec;
    spec.n = 800;
    spec.seed = 5;
    const auto ds = synth_eval::generate_baseline(spec);
    io::write_features_jsonl("/tmp/cf-cli-base-features.jsonl", ds.ids, ds.features);

    const std::string fit_args = "fit copula --features /tmp/cf-cli-base-features.jsonl "
                                 "--family gaussian --seed 7 --out ";
    REQUIRE(run(fit_args + "/tmp/cf-cli-model1.json").exit_code == 0);
    REQUIRE(run(fit_args + "/tmp/cf-cli-model2.json").exit_code == 0);
    CHECK(slurp("/tmp/cf-cli-model1.json") == slurp("/tmp/cf-cli-model2.json"));

    const std::string rank_args = "rank --model /tmp/cf-cli-model1.json "
                                  "--features /tmp/cf-cli-base-features.jsonl "
                                  "--mc-pairs 128 --seed 7 --out ";
    REQUIRE(run(rank_args + "/tmp/cf-cli-ranked1.jsonl").exit_code == 0);
    REQUIRE(run(rank_args + "/tmp/cf-cli-ranked2.jsonl").exit_code == 0);
    const std::string r1 = slurp("/tmp/cf-cli-ranked1.jsonl");
    CHECK(r1 == slurp("/tmp/cf-cli-ranked2.jsonl"));
    CHECK(!r1.empty());

    // a different seed must change the Monte Carlo stream
    REQUIRE(run("rank --model /tmp/cf-cli-model1.json "
                "--features /tmp/cf-cli-base-features.jsonl "
                "--mc-pairs 128 --seed 8 --out /tmp/cf-cli-ranked3.jsonl")
                .exit_code == 0);
    CHECK(r1 != slurp("/tmp/cf-cli-ranked3.jsonl"));

    // thread count must not change results
    REQUIRE(run("--threads 4 " + rank_args + "/tmp/cf-cli-ranked4.jsonl").exit_code == 0);
    CHECK(r1 == slurp("/tmp/cf-cli-ranked4.jsonl"));

    // COVERTFLOW_SEED is a full substitute for --seed
    const std::string features_before = slurp("/tmp/cf-cli-base-features.jsonl");
    const auto env_run = run("rank --model /tmp/cf-cli-model1.json "
                             "--features /tmp/cf-cli-base-features.jsonl "
                             "--mc-pairs 128 --out /tmp/cf-cli-ranked5.jsonl",
                             "COVERTFLOW_SEED=7");
    REQUIRE(env_run.exit_code == 0);
    CHECK(r1 == slurp("/tmp/cf-cli-ranked5.jsonl"));

    // commands never mutate their inputs
    CHECK(features_before == slurp("/tmp/cf-cli-base-features.jsonl"));
    CHECK(slurp("/tmp/cf-cli-model1.json") == slurp("/tmp/cf-cli-model2.json"));
}

TEST_CASE("auto family selection writes the AIC winner") {
    using namespace covertflow;
    copula::CopulaModel truth;
    truth.family = copula::Family::StudentT;
    truth.dim = 4;
    truth.nu = 5;
    truth.R = {1.0, 0.3, 0.2, 0.25, 0.3, 1.0, 0.15, 0.2,
               0.2, 0.15, 1.0, 0.7, 0.25, 0.2, 0.7, 1.0};
    const auto u = copula::sample_copula(truth, 6000, 17);
    std::vector<FeatureVector> feats(u.size());
    std::vector<std::string> ids(u.size());
    for (size_t i = 0; i < u.size(); ++i) {
        ids[i] = "s" + std::to_string(i);
        feats[i].f1_volume_usd = u[i][0];
        feats[i].f2_ratio = u[i][1] * 0.99;
        feats[i].f3_bilateral_freq = 1 + static_cast<long>(u[i][2] * 1e6);
        feats[i].f4_extractee_freq = feats[i].f3_bilateral_freq +
                                     static_cast<long>(u[i][3] * 1e6);
    }
    io::write_features_jsonl("/tmp/cf-cli-tdata.jsonl", ids, feats);
    const auto fit = run("fit copula --features /tmp/cf-cli-tdata.jsonl --family auto "
                         "--seed 3 --out /tmp/cf-cli-tmodel.json");
    REQUIRE(fit.exit_code == 0);
    CHECK(json::parse(fit.output)["family"] == "t");
    const auto model_json = json::parse(slurp("/tmp/cf-cli-tmodel.json"));
    CHECK(model_json["family"] == "t");
    CHECK(model_json["delta_aic_t_minus_gaussian"].get<double>() < 0.0);
}

TEST_CASE("fit tail and report emit plot data") {
    using namespace covertflow;
    synth_eval::BaselineSpec spec;
    spec.n = 5000;
    spec.seed = 21;
    const auto ds = synth_eval::generate_baseline(spec);
    io::write_features_jsonl("/tmp/cf-cli-tail-features.jsonl", ds.ids, ds.features);

    const auto fit = run("fit tail --features /tmp/cf-cli-tail-features.jsonl --feature f2 "
                         "--out /tmp/cf-cli-tail.json --ccdf /tmp/cf-cli-ccdf.csv");
    REQUIRE(fit.exit_code == 0);
    CHECK(json::parse(fit.output)["alpha"].get<double>() > 1.5);
    std::ifstream ccdf("/tmp/cf-cli-ccdf.csv");
    std::string header, first;
    std::getline(ccdf, header);
    std::getline(ccdf, first);
    CHECK(header == "x,ccdf");
    CHECK(first.substr(first.find(',') + 1) == "1"); // first probability is exactly 1

    REQUIRE(run("fit copula --features /tmp/cf-cli-tail-features.jsonl --family gaussian "
                "--seed 2 --out /tmp/cf-cli-model-r.json")
                .exit_code == 0);
    REQUIRE(run("rank --model /tmp/cf-cli-model-r.json "
                "--features /tmp/cf-cli-tail-features.jsonl --mc-pairs 64 --seed 2 "
                "--out /tmp/cf-cli-ranked-r.jsonl")
                .exit_code == 0);
    const auto rep = run("report --ranked /tmp/cf-cli-ranked-r.jsonl --top-k 3 "
                         "--out-ccdf /tmp/cf-cli-pccdf.csv");
    REQUIRE(rep.exit_code == 0);
    // header plus exactly three rows
    int lines = 0;
    std::istringstream out(rep.output);
    std::string line;
    while (std::getline(out, line)) ++lines;
    CHECK(lines == 4);
    std::ifstream pccdf("/tmp/cf-cli-pccdf.csv");
    std::getline(pccdf, header);
    std::getline(pccdf, first);
    CHECK(first.substr(first.find(',') + 1) == "1");
}
