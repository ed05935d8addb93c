#include "covertflow/market.hpp"

#include "covertflow/errors.hpp"

namespace covertflow::market {

const PoolInfo& Market::pool(const std::string& id) const {
    auto it = pools_.find(id);
    if (it == pools_.end()) throw ValidationError("unknown pool: " + id);
    return it->second;
}

PoolInfo& Market::pool(const std::string& id) {
    auto it = pools_.find(id);
    if (it == pools_.end()) throw ValidationError("unknown pool: " + id);
    return it->second;
}

LedgerTx Market::apply(const chain::SimTx& tx, long block, int position) {
    LedgerTx rec;
    rec.id = tx.id;
    rec.block = block;
    rec.position = position;
    rec.from = tx.submitter;

    if (const auto* swap = std::get_if<chain::SwapPayload>(&tx.payload)) {
        double carry = 0.0;
        bool first = true;
        for (const auto& order_in : swap->swaps) {
            amm::SwapOrder order = order_in;
            if (swap->chained && !first) order.amount_in = carry;
            first = false;
            if (order.amount_in <= 0.0) continue;
            auto& p = pool(order.pool_id);
            const auto outcome = amm::swap_exact_in(p.state, order);
            if (!outcome.executed) continue; // guard failed, no state change
            p.state = outcome.pool_after;
            carry = outcome.amount_out;
            rec.swaps.push_back({order.pool_id, order.direction, outcome.amount_in,
                                 outcome.amount_out});
            rec.to = order.pool_id;
        }
    } else if (const auto* transfer = std::get_if<chain::TransferPayload>(&tx.payload)) {
        rec.to = transfer->to;
        rec.transfer_amount = transfer->amount;
    } else {
        // probes are disguised as tiny transfers to a per-submitter sink
        rec.to = "sink-" + tx.submitter;
        rec.transfer_amount = 0.0;
    }
    return rec;
}

std::vector<LedgerTx> Market::settle(const std::vector<chain::SimBlock>& blocks) {
    std::vector<LedgerTx> ledger;
    for (const auto& b : blocks) {
        int pos = 0;
        for (const auto& itx : b.txs) ledger.push_back(apply(itx.tx, b.index, pos++));
    }
    return ledger;
}

std::map<std::string, std::pair<std::string, std::string>> asset_map(const Market& m) {
    std::map<std::string, std::pair<std::string, std::string>> out;
    for (const auto& [id, info] : m.pools()) out[id] = {info.base_asset, info.quote_asset};
    return out;
}

} // namespace covertflow::market
