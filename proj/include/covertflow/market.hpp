#pragma once
#include <map>
#include <string>
#include <vector>

#include "covertflow/amm.hpp"
#include "covertflow/chain_sim.hpp"
#include "covertflow/ledger.hpp"

namespace covertflow::market {

struct PoolInfo {
    std::string id;
    std::string base_asset;
    std::string quote_asset;
    amm::PoolState state;
};

// Pool book plus settlement: replays included blocks against the pools and
// emits the normalized ledger the detectors consume.
class Market {
public:
    void add_pool(PoolInfo info) { pools_[info.id] = std::move(info); }
    const PoolInfo& pool(const std::string& id) const;
    PoolInfo& pool(const std::string& id);
    const std::map<std::string, PoolInfo>& pools() const { return pools_; }

    // Executes one transaction payload in place. Chained swaps take the
    // previous leg's output as input. Guard failures leave the pool untouched.
    LedgerTx apply(const chain::SimTx& tx, long block, int position);

    std::vector<LedgerTx> settle(const std::vector<chain::SimBlock>& blocks);

private:
    std::map<std::string, PoolInfo> pools_;
};

std::map<std::string, std::pair<std::string, std::string>> asset_map(const Market& m);

} // namespace covertflow::market
