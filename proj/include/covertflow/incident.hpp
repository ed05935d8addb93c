#pragma once
#include <string>

namespace covertflow {

enum class ChainId { Ethereum, Arbitrum };
enum class MevType { Sandwich, Arbitrage };

std::string to_string(ChainId c);
std::string to_string(MevType m);
ChainId chain_from_string(const std::string& s);
MevType mev_type_from_string(const std::string& s);

// One extraction event, USD-valued. The unit of the feature pipeline.
struct Incident {
    std::string id;
    ChainId chain = ChainId::Ethereum;
    MevType mev_type = MevType::Sandwich;
    long block = 0;
    std::string extractor;
    std::string extractee;
    double profit_usd = 0.0;
    double capital_usd = 0.0;
    double loss_usd = 0.0;
};

// F1 extraction volume, F2 capital-extraction ratio, F3 bilateral frequency,
// F4 extractee exploitation frequency.
struct FeatureVector {
    double f1_volume_usd = 0.0;
    double f2_ratio = 0.0; // in [0,1)
    long f3_bilateral_freq = 1;
    long f4_extractee_freq = 1;

    double get(int i) const {
        switch (i) {
        case 0: return f1_volume_usd;
        case 1: return f2_ratio;
        case 2: return static_cast<double>(f3_bilateral_freq);
        default: return static_cast<double>(f4_extractee_freq);
        }
    }
};

} // namespace covertflow
