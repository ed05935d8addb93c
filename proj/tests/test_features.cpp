#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

#include "covertflow/errors.hpp"
#include "covertflow/features.hpp"
#include "covertflow/rng.hpp"

using namespace covertflow;

namespace {

Incident make(const std::string& id, const std::string& extractor, const std::string& extractee,
              double profit, double capital, double loss) {
    Incident inc;
    inc.id = id;
    inc.extractor = extractor;
    inc.extractee = extractee;
    inc.profit_usd = profit;
    inc.capital_usd = capital;
    inc.loss_usd = loss;
    return inc;
}

} // namespace

TEST_CASE("a singleton incident has unit frequencies") {
    const auto f = features::compute_features({make("a", "x", "v", 100.0, 1000.0, 100.0)});
    REQUIRE(f.size() == 1);
    CHECK(f[0].f1_volume_usd == 100.0);
    CHECK(f[0].f2_ratio == doctest::Approx(0.1));
    CHECK(f[0].f3_bilateral_freq == 1);
    CHECK(f[0].f4_extractee_freq == 1);
}

TEST_CASE("frequency counts match an exhaustive pairwise tally") {
    Xoshiro256pp rng(9);
    std::vector<Incident> ds;
    for (int i = 0; i < 400; ++i) {
        const std::string extractor = "x" + std::to_string(rng.below(12));
        const std::string extractee = "v" + std::to_string(rng.below(8));
        ds.push_back(make("i" + std::to_string(i), extractor, extractee, rng.uniform(1, 100),
                          1000.0, rng.uniform(0, 900)));
    }
    const auto f = features::compute_features(ds);
    for (size_t i = 0; i < ds.size(); ++i) {
        long pair = 0, extractee = 0;
        for (const auto& other : ds) {
            if (other.extractee == ds[i].extractee) {
                ++extractee;
                if (other.extractor == ds[i].extractor) ++pair;
            }
        }
        REQUIRE(f[i].f3_bilateral_freq == pair);
        REQUIRE(f[i].f4_extractee_freq == extractee);
        REQUIRE(f[i].f3_bilateral_freq <= f[i].f4_extractee_freq);
    }
}

TEST_CASE("a heavily revisited extractee shows the fan-in signature") {
    // one extractee hit 1650 times by 27 extractors, the top pair 161 times
    std::vector<Incident> ds;
    int id = 0;
    for (int k = 0; k < 161; ++k)
        ds.push_back(make("i" + std::to_string(id++), "x0", "victim", 10.0, 100.0, 10.0));
    int remaining = 1650 - 161;
    int extractor = 1;
    while (remaining > 0) {
        const int burst = std::min(remaining, 58);
        for (int k = 0; k < burst; ++k)
            ds.push_back(make("i" + std::to_string(id++), "x" + std::to_string(extractor),
                              "victim", 10.0, 100.0, 10.0));
        remaining -= burst;
        ++extractor;
    }
    REQUIRE(extractor <= 27);
    const auto f = features::compute_features(ds);
    CHECK(f[0].f3_bilateral_freq == 161);
    CHECK(f[0].f4_extractee_freq == 1650);

    // count consistency: the f3 groups of one extractee sum to its f4
    std::map<std::string, long> group_size;
    for (const auto& inc : ds)
        if (inc.extractee == "victim") ++group_size[inc.extractor];
    long sum = 0;
    for (const auto& [k, v] : group_size) sum += v;
    CHECK(sum == 1650);
}

TEST_CASE("features are independent of dataset ordering") {
    std::vector<Incident> ds;
    Xoshiro256pp rng(44);
    for (int i = 0; i < 200; ++i)
        ds.push_back(make("i" + std::to_string(i), "x" + std::to_string(rng.below(5)),
                          "v" + std::to_string(rng.below(5)), rng.uniform(1, 10), 50.0,
                          rng.uniform(0, 49)));
    const auto f1 = features::compute_features(ds);

    auto shuffled = ds;
    std::mt19937 gen(1);
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    const auto f2 = features::compute_features(shuffled);
    for (size_t i = 0; i < ds.size(); ++i) {
        size_t j = 0;
        while (shuffled[j].id != ds[i].id) ++j;
        CHECK(f1[i].f1_volume_usd == f2[j].f1_volume_usd);
        CHECK(f1[i].f2_ratio == f2[j].f2_ratio);
        CHECK(f1[i].f3_bilateral_freq == f2[j].f3_bilateral_freq);
        CHECK(f1[i].f4_extractee_freq == f2[j].f4_extractee_freq);
    }
}

TEST_CASE("zero capital is rejected") {
    CHECK_THROWS_AS(features::compute_features({make("a", "x", "v", 1.0, 0.0, 0.0)}), ZeroCapital);
    CHECK_THROWS_AS(features::compute_features({}), EmptyInput);
}

TEST_CASE("ingest drops incidents whose loss reaches their capital") {
    const auto res = features::validate_incidents({
        make("ok", "x", "v", 1.0, 100.0, 99.0),
        make("full-loss", "x", "v", 1.0, 100.0, 100.0),
        make("no-capital", "x", "v", 1.0, 0.0, 0.0),
    });
    CHECK(res.accepted.size() == 1);
    CHECK(res.rejected == 2);
    CHECK(res.diagnostics.size() == 2);
}

TEST_CASE("usd valuation multiplies through the price table") {
    features::PriceTable table;
    table.set("base", 1000.0);
    CHECK(features::value_in_usd(33.33, "base", table) == doctest::Approx(33330.0));
    CHECK_THROWS_AS(features::value_in_usd(1.0, "mystery", table), UnknownAsset);

    features::ExclusionCounter counter;
    for (const std::string asset : {"base", "mystery", "base", "mystery2"}) {
        ++counter.total;
        try {
            features::value_in_usd(1.0, asset, table);
        } catch (const UnknownAsset&) {
            ++counter.excluded;
        }
    }
    CHECK(counter.excluded == 2);
    CHECK(counter.rate() == doctest::Approx(0.5));
}
