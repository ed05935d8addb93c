#include "covertflow/detection.hpp"

#include <algorithm>
#include <numeric>

#include "covertflow/errors.hpp"

namespace covertflow::detection {

namespace {

struct AssetDelta {
    std::map<std::string, double> by_asset;
    void add(const std::string& asset, double amount) { by_asset[asset] += amount; }
};

std::pair<std::string, std::string> swap_assets(const DecodedSwap& s, const AssetMap& assets) {
    auto it = assets.find(s.pool_id);
    if (it == assets.end()) throw ValidationError("ledger references unknown pool: " + s.pool_id);
    const auto& [base, quote] = it->second;
    if (s.direction == amm::Direction::BaseForQuote) return {base, quote};
    return {quote, base};
}

void apply_swap_delta(AssetDelta& delta, const DecodedSwap& s, const AssetMap& assets) {
    const auto [in_asset, out_asset] = swap_assets(s, assets);
    delta.add(in_asset, -s.amount_in);
    delta.add(out_asset, s.amount_out);
}

double usd_value(const AssetDelta& delta, const features::PriceTable& prices) {
    double usd = 0.0;
    for (const auto& [asset, amount] : delta.by_asset)
        usd += features::value_in_usd(amount, asset, prices);
    return usd;
}

const DecodedSwap* swap_on_pool(const LedgerTx& tx, const std::string& pool) {
    for (const auto& s : tx.swaps)
        if (s.pool_id == pool) return &s;
    return nullptr;
}

} // namespace

std::vector<DetectedIncident> detect_sandwich(const std::vector<LedgerTx>& ledger,
                                              const AssetMap& assets,
                                              const features::PriceTable& prices,
                                              features::ExclusionCounter* exclusions) {
    std::map<long, std::vector<const LedgerTx*>> by_block;
    for (const auto& tx : ledger) by_block[tx.block].push_back(&tx);

    std::vector<DetectedIncident> out;
    for (auto& [block, txs] : by_block) {
        std::sort(txs.begin(), txs.end(),
                  [](const LedgerTx* a, const LedgerTx* b) { return a->position < b->position; });
        for (size_t i = 0; i + 2 < txs.size(); ++i) {
            const LedgerTx &t1 = *txs[i], &t2 = *txs[i + 1], &t3 = *txs[i + 2];
            if (t2.position != t1.position + 1 || t3.position != t2.position + 1) continue;
            if (t1.from != t3.from) continue;
            if (t1.swaps.empty() || t2.swaps.empty() || t3.swaps.empty()) continue;
            for (const auto& s1 : t1.swaps) {
                const DecodedSwap* s2 = swap_on_pool(t2, s1.pool_id);
                const DecodedSwap* s3 = swap_on_pool(t3, s1.pool_id);
                if (!s2 || !s3) continue;
                if (s2->direction != s1.direction) continue;
                if (s3->direction != amm::reverse(s1.direction)) continue;

                AssetDelta extractor_delta, victim_in, victim_out;
                apply_swap_delta(extractor_delta, s1, assets);
                apply_swap_delta(extractor_delta, *s3, assets);
                const auto [vin_asset, vout_asset] = swap_assets(*s2, assets);
                if (exclusions) ++exclusions->total;
                try {
                    DetectedIncident inc;
                    inc.mev_type = MevType::Sandwich;
                    inc.extractor = t1.from;
                    inc.extractee = t2.from;
                    inc.tx_ids = {t1.id, t2.id, t3.id};
                    inc.block = block;
                    inc.extractor_profit_usd = usd_value(extractor_delta, prices);
                    const auto quote_asset = assets.at(s1.pool_id).second;
                    inc.extractor_profit_quote =
                        inc.extractor_profit_usd /
                        features::value_in_usd(1.0, quote_asset, prices);
                    inc.extractee_capital_usd =
                        features::value_in_usd(s2->amount_in, vin_asset, prices);
                    inc.extractee_loss_usd =
                        std::max(0.0, inc.extractee_capital_usd -
                                          features::value_in_usd(s2->amount_out, vout_asset, prices));
                    out.push_back(std::move(inc));
                } catch (const UnknownAsset&) {
                    // unpriceable pair, excluded from the incident set
                    if (exclusions) ++exclusions->excluded;
                }
                break;
            }
        }
    }
    return out;
}

std::vector<DetectedIncident> detect_arbitrage(const std::vector<LedgerTx>& ledger,
                                               const AssetMap& assets,
                                               const features::PriceTable& prices,
                                               features::ExclusionCounter* exclusions) {
    std::vector<const LedgerTx*> ordered;
    ordered.reserve(ledger.size());
    for (const auto& tx : ledger) ordered.push_back(&tx);
    std::sort(ordered.begin(), ordered.end(), [](const LedgerTx* a, const LedgerTx* b) {
        if (a->block != b->block) return a->block < b->block;
        return a->position < b->position;
    });

    std::vector<DetectedIncident> out;
    for (size_t i = 0; i < ordered.size(); ++i) {
        const LedgerTx& tx = *ordered[i];
        if (tx.swaps.size() < 2) continue;

        // closed cycle: each leg consumes the previous leg's output asset and
        // the last leg returns to the starting asset
        bool closed = true;
        for (size_t k = 0; k + 1 < tx.swaps.size() && closed; ++k)
            closed = swap_assets(tx.swaps[k], assets).second ==
                     swap_assets(tx.swaps[k + 1], assets).first;
        const auto start_asset = swap_assets(tx.swaps.front(), assets).first;
        closed = closed && start_asset == swap_assets(tx.swaps.back(), assets).second;
        if (!closed) continue;
        const double net_gain = tx.swaps.back().amount_out - tx.swaps.front().amount_in;
        if (!(net_gain > 0.0)) continue;

        // nearest earlier counterparty swap pushing an involved pool the way
        // the cycle profits from
        const LedgerTx* inflating = nullptr;
        const DecodedSwap* inflating_swap = nullptr;
        for (size_t j = i; j-- > 0;) {
            const LedgerTx& prior = *ordered[j];
            if (prior.from == tx.from) continue;
            for (const auto& leg : tx.swaps) {
                const DecodedSwap* s = swap_on_pool(prior, leg.pool_id);
                if (s && s->direction == amm::reverse(leg.direction)) {
                    inflating = &prior;
                    inflating_swap = s;
                    break;
                }
            }
            if (inflating) break;
        }
        if (!inflating) continue;

        if (exclusions) ++exclusions->total;
        try {
            DetectedIncident inc;
            inc.mev_type = MevType::Arbitrage;
            inc.extractor = tx.from;
            inc.extractee = inflating->from;
            inc.tx_ids = {inflating->id, tx.id};
            inc.block = tx.block;
            inc.co_inclusion_warning = inflating->block == tx.block;
            inc.extractor_profit_quote = net_gain;
            inc.extractor_profit_usd = features::value_in_usd(net_gain, start_asset, prices);
            const auto [in_asset, out_asset] = swap_assets(*inflating_swap, assets);
            inc.extractee_capital_usd =
                features::value_in_usd(inflating_swap->amount_in, in_asset, prices);
            inc.extractee_loss_usd =
                std::max(0.0, inc.extractee_capital_usd -
                                  features::value_in_usd(inflating_swap->amount_out, out_asset,
                                                         prices));
            out.push_back(std::move(inc));
        } catch (const UnknownAsset&) {
            if (exclusions) ++exclusions->excluded;
        }
    }
    return out;
}

TransferGraph build_transfer_graph(const std::vector<LedgerTx>& ledger) {
    TransferGraph g;
    for (const auto& tx : ledger) {
        for (const auto& s : tx.swaps) g.edges.emplace_back(tx.from, s.pool_id);
        if (tx.swaps.empty() && !tx.to.empty()) g.edges.emplace_back(tx.from, tx.to);
    }
    return g;
}

int Clustering::cluster_of(const std::string& addr) const {
    auto it = index_.find(addr);
    return it == index_.end() ? -1 : it->second;
}

Clustering cluster_addresses(const TransferGraph& graph, std::size_t degree_threshold) {
    std::map<std::string, std::size_t> degree;
    for (const auto& [a, b] : graph.edges) {
        ++degree[a];
        ++degree[b];
    }
    std::map<std::string, int> id;
    std::vector<std::string> names;
    for (const auto& [node, deg] : degree) {
        if (deg > degree_threshold) continue;
        id[node] = static_cast<int>(names.size());
        names.push_back(node);
    }

    std::vector<int> parent(names.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[static_cast<size_t>(x)] != x) {
            parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
            x = parent[static_cast<size_t>(x)];
        }
        return x;
    };

    Clustering res;
    res.removed_nodes = degree.size() - names.size();
    for (const auto& [a, b] : graph.edges) {
        auto ia = id.find(a), ib = id.find(b);
        if (ia == id.end() || ib == id.end()) {
            ++res.suppressed_edges;
            continue;
        }
        parent[static_cast<size_t>(find(ia->second))] = find(ib->second);
    }

    std::map<int, int> root_to_cluster;
    for (size_t i = 0; i < names.size(); ++i) {
        const int root = find(static_cast<int>(i));
        auto [it, inserted] = root_to_cluster.emplace(root, static_cast<int>(res.clusters.size()));
        if (inserted) res.clusters.emplace_back();
        res.clusters[static_cast<size_t>(it->second)].push_back(names[i]);
        res.index_[names[i]] = it->second;
    }
    return res;
}

} // namespace covertflow::detection
