#pragma once
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "covertflow/incident.hpp"

// F1-F4 feature extraction over an incident dataset plus the static price
// table that substitutes for a live USD price feed.
namespace covertflow::features {

class PriceTable {
public:
    void set(const std::string& asset, double usd) { usd_[asset] = usd; }
    std::optional<double> price(const std::string& asset) const;
    bool empty() const { return usd_.empty(); }
    const std::map<std::string, double>& prices() const { return usd_; }

private:
    std::map<std::string, double> usd_;
};

PriceTable load_price_table(const std::string& path);

// Throws UnknownAsset; callers exclude the incident and count the exclusion.
double value_in_usd(double amount, const std::string& asset, const PriceTable& table);

struct ExclusionCounter {
    std::size_t excluded = 0;
    std::size_t total = 0;
    double rate() const { return total ? static_cast<double>(excluded) / total : 0.0; }
};

struct IngestResult {
    std::vector<Incident> accepted;
    std::size_t rejected = 0;               // loss >= capital or capital <= 0
    std::vector<std::string> diagnostics;
};

// The f2 tail analysis needs loss/capital strictly inside [0,1); incidents
// violating that are dropped here with a diagnostic.
IngestResult validate_incidents(const std::vector<Incident>& raw);

// f1 = profit, f2 = loss/capital, f3 = #incidents sharing (extractor,
// extractee), f4 = #incidents sharing the extractee. Counts are over the
// given dataset window. Output is aligned with the input.
std::vector<FeatureVector> compute_features(const std::vector<Incident>& dataset);

} // namespace covertflow::features
