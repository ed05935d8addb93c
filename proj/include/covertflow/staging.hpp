#pragma once
#include <string>
#include <vector>

#include "covertflow/amm.hpp"
#include "covertflow/chain_sim.hpp"
#include "covertflow/ledger.hpp"

// Planning and execution of staged transfers: the three-transaction sandwich
// under PBS and the rate-inflate + closed-cycle pair under FCFS sequencing.
namespace covertflow::staging {

struct SandwichParams {
    double sender_capital = 0.0;  // base units the sender exposes
    double receiver_base = 0.0;   // receiver capital funding the frontrun
    double receiver_quote = 0.0;  // extra quote capital available to the backrun
    std::string sender = "S";
    std::string receiver = "R";
    std::string pool_id = "pool";
};

struct SandwichPlan {
    amm::SwapOrder frontrun;
    amm::SwapOrder victim; // permissive min_amount_out
    amm::SwapOrder backrun;
    double predicted_transfer = 0.0; // receiver net gain, base units at the pre-attack spot
    double effectiveness = 0.0;      // predicted_transfer / sender_capital (0 when capital is 0)
    double stranded = 0.0;           // base tokens left in the pool above the pre-attack reserve
    double sender_loss = 0.0;        // base units at the pre-attack spot
    double pre_spot = 0.0;           // quote per base before the frontrun
    SandwichParams params;
};

// Sizes the three legs: the frontrun spends all receiver base, the victim
// swap carries no slippage guard, and the backrun spends whatever quote is
// available up to the amount that restores the pre-frontrun quote reserve.
SandwichPlan plan_sandwich(const amm::PoolState& pool, const SandwichParams& params);

struct PbsConfig {
    bool colluding_validator = true;
    double bid = 1e6;
    double competing_bid = 0.0;
};

struct SandwichExecution {
    std::vector<amm::SwapOutcome> outcomes;
    std::vector<LedgerTx> ledger;
    chain::SimBlock block;
    amm::PoolState pool_after;
    bool bundle_included = false;
    double adversary_cost = 0.0;
    double realized_transfer = 0.0;
    double realized_effectiveness = 0.0;
    double realized_stranded = 0.0;
};

// Runs the bundle through the PBS round and replays the included swaps.
// The backrun is resized against the realized pool state with the same rule
// the planner used, so a failed victim leg unwinds to a zero transfer.
SandwichExecution execute_sandwich(const SandwichPlan& plan, const amm::PoolState& pool,
                                   const PbsConfig& pbs);

struct ArbitrageParams {
    double sender_capital = 0.0;   // base units swapped into pool A
    double receiver_capital = 0.0; // quote units available to fund the cycle
    std::string sender = "S";
    std::string receiver = "R";
    std::string pool_a_id = "pool_a";
    std::string pool_b_id = "pool_b";
    int block_gap = 2;
};

struct ArbitragePlan {
    amm::SwapOrder inflating;               // sender: base -> quote on pool A
    std::vector<amm::SwapOrder> arb_cycle;  // receiver: quote -> base on A, base -> quote on B
    int block_gap = 2;
    double predicted_transfer = 0.0; // cycle profit, quote units
    double sender_loss = 0.0;        // quote units at the pre-inflation pool-A spot
    double cycle_input = 0.0;        // quote spent on the first cycle leg
    ArbitrageParams params;
};

// Chooses the profit-maximizing cycle input for the post-inflation rate gap,
// capped by the receiver's capital.
ArbitragePlan plan_arbitrage(const amm::PoolState& pool_a, const amm::PoolState& pool_b,
                             const ArbitrageParams& params);

struct ArbitrageExecution {
    std::vector<LedgerTx> ledger;
    std::vector<chain::SimBlock> blocks;
    bool success = false;
    bool deniability_failure = false; // both legs landed in one block
    long inflating_block = -1;
    long arbitrage_block = -1;
    double realized_transfer = 0.0;
    amm::PoolState pool_a_after;
    amm::PoolState pool_b_after;
};

ArbitrageExecution execute_arbitrage(const ArbitragePlan& plan, const amm::PoolState& pool_a,
                                     const amm::PoolState& pool_b,
                                     const chain::SequencerConfig& seq, double delay_ms,
                                     const chain::TimingOptions& opts = {});

} // namespace covertflow::staging
