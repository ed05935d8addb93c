#pragma once
#include <map>
#include <string>
#include <vector>

#include "covertflow/features.hpp"
#include "covertflow/incident.hpp"
#include "covertflow/ledger.hpp"

// Syntactic MEV detectors (three-transaction sandwich, closed-cycle
// arbitrage) and the degree-capped address clustering tracer.
namespace covertflow::detection {

struct DetectedIncident {
    MevType mev_type = MevType::Sandwich;
    std::string extractor;
    std::string extractee;
    std::vector<std::string> tx_ids;
    long block = 0;
    double extractor_profit_quote = 0.0;
    double extractor_profit_usd = 0.0;
    double extractee_capital_usd = 0.0;
    double extractee_loss_usd = 0.0;
    bool co_inclusion_warning = false; // arbitrage cycle shares a block with its inflating tx
};

// pool id -> (base asset, quote asset)
using AssetMap = std::map<std::string, std::pair<std::string, std::string>>;

// Flags every consecutive in-block triple where tx1/tx3 share a sender, all
// three swap the same pool, tx1 and tx2 trade in the same direction and tx3
// reverses. Candidates priced against assets missing from the table are
// excluded and counted.
std::vector<DetectedIncident> detect_sandwich(const std::vector<LedgerTx>& ledger,
                                              const AssetMap& assets,
                                              const features::PriceTable& prices,
                                              features::ExclusionCounter* exclusions = nullptr);

// Flags transactions whose swaps form a closed cycle with positive net gain
// after a rate-inflating swap on an involved pool. A cycle sharing a block
// with its inflating transaction is still flagged, with a co-inclusion
// warning attached.
std::vector<DetectedIncident> detect_arbitrage(const std::vector<LedgerTx>& ledger,
                                               const AssetMap& assets,
                                               const features::PriceTable& prices,
                                               features::ExclusionCounter* exclusions = nullptr);

struct TransferGraph {
    std::vector<std::pair<std::string, std::string>> edges;
};

// Swap transactions contribute sender<->pool edges, plain transfers
// sender<->recipient edges.
TransferGraph build_transfer_graph(const std::vector<LedgerTx>& ledger);

struct Clustering {
    std::vector<std::vector<std::string>> clusters;
    std::size_t suppressed_edges = 0;
    std::size_t removed_nodes = 0;

    // index of the cluster containing `addr`, -1 if removed/absent
    int cluster_of(const std::string& addr) const;

private:
    friend Clustering cluster_addresses(const TransferGraph&, std::size_t);
    std::map<std::string, int> index_;
};

// Connected components after removing nodes whose incident edge count
// exceeds the threshold. Pass SIZE_MAX to keep every node.
Clustering cluster_addresses(const TransferGraph& graph, std::size_t degree_threshold);

} // namespace covertflow::detection
