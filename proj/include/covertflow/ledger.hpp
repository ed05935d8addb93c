#pragma once
#include <string>
#include <vector>

#include "covertflow/amm.hpp"

namespace covertflow {

// One decoded swap of an on-chain transaction.
struct DecodedSwap {
    std::string pool_id;
    amm::Direction direction = amm::Direction::BaseForQuote;
    double amount_in = 0.0;
    double amount_out = 0.0;
};

// Normalized view of a confirmed transaction as the detectors consume it.
struct LedgerTx {
    std::string id;
    long block = 0;
    int position = 0; // unique within a block
    std::string from;
    std::string to;
    std::vector<DecodedSwap> swaps;
    double transfer_amount = 0.0; // plain value transfer, 0 if none
};

} // namespace covertflow
