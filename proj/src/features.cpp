#include "covertflow/features.hpp"

#include <fstream>
#include <sstream>

#include "covertflow/errors.hpp"

namespace covertflow {

std::string to_string(ChainId c) { return c == ChainId::Ethereum ? "ethereum" : "arbitrum"; }
std::string to_string(MevType m) { return m == MevType::Sandwich ? "sandwich" : "arbitrage"; }

ChainId chain_from_string(const std::string& s) {
    if (s == "ethereum") return ChainId::Ethereum;
    if (s == "arbitrum") return ChainId::Arbitrum;
    throw ValidationError("unknown chain: " + s);
}

MevType mev_type_from_string(const std::string& s) {
    if (s == "sandwich") return MevType::Sandwich;
    if (s == "arbitrage") return MevType::Arbitrage;
    throw ValidationError("unknown mev_type: " + s);
}

} // namespace covertflow

namespace covertflow::features {

std::optional<double> PriceTable::price(const std::string& asset) const {
    auto it = usd_.find(asset);
    if (it == usd_.end()) return std::nullopt;
    return it->second;
}

PriceTable load_price_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingFile(path);
    PriceTable table;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ValidationError("price table row needs 'asset,usd_price': " + line);
        const std::string asset = line.substr(0, comma);
        if (asset == "asset") continue; // header
        double price = 0.0;
        try {
            price = std::stod(line.substr(comma + 1));
        } catch (const std::exception&) {
            throw ValidationError("bad price in row: " + line);
        }
        if (!(price > 0.0)) throw ValidationError("price must be positive: " + line);
        table.set(asset, price);
    }
    return table;
}

double value_in_usd(double amount, const std::string& asset, const PriceTable& table) {
    const auto p = table.price(asset);
    if (!p) throw UnknownAsset(asset);
    return amount * *p;
}

IngestResult validate_incidents(const std::vector<Incident>& raw) {
    IngestResult res;
    res.accepted.reserve(raw.size());
    for (const auto& inc : raw) {
        if (!(inc.capital_usd > 0.0)) {
            ++res.rejected;
            res.diagnostics.push_back(inc.id + ": capital_usd must be positive");
            continue;
        }
        if (!(inc.loss_usd >= 0.0) || inc.loss_usd >= inc.capital_usd) {
            ++res.rejected;
            res.diagnostics.push_back(inc.id + ": loss_usd must lie in [0, capital_usd)");
            continue;
        }
        if (inc.profit_usd < 0.0) {
            ++res.rejected;
            res.diagnostics.push_back(inc.id + ": profit_usd must be non-negative");
            continue;
        }
        res.accepted.push_back(inc);
    }
    return res;
}

std::vector<FeatureVector> compute_features(const std::vector<Incident>& dataset) {
    if (dataset.empty()) throw EmptyInput("compute_features: empty dataset");
    std::map<std::pair<std::string, std::string>, long> pair_count;
    std::map<std::string, long> extractee_count;
    for (const auto& inc : dataset) {
        if (!(inc.capital_usd > 0.0)) throw ZeroCapital(inc.id);
        ++pair_count[{inc.extractor, inc.extractee}];
        ++extractee_count[inc.extractee];
    }
    std::vector<FeatureVector> out;
    out.reserve(dataset.size());
    for (const auto& inc : dataset) {
        FeatureVector f;
        f.f1_volume_usd = inc.profit_usd;
        f.f2_ratio = inc.loss_usd / inc.capital_usd;
        f.f3_bilateral_freq = pair_count[{inc.extractor, inc.extractee}];
        f.f4_extractee_freq = extractee_count[inc.extractee];
        out.push_back(f);
    }
    return out;
}

} // namespace covertflow::features
