#pragma once
#include <string>

namespace covertflow::amm {

enum class Direction { BaseForQuote, QuoteForBase };

Direction reverse(Direction d);

// Constant-product pool. Reserves are token amounts, fee in basis points.
struct PoolState {
    double reserve_base = 0.0;
    double reserve_quote = 0.0;
    int fee_bps = 0;

    bool tradable() const { return reserve_base > 0.0 && reserve_quote > 0.0; }
    double product() const { return reserve_base * reserve_quote; }
    // quote tokens per base token at the margin
    double spot_rate() const { return reserve_quote / reserve_base; }
};

struct SwapOrder {
    std::string trader;
    Direction direction = Direction::BaseForQuote;
    double amount_in = 0.0;
    double min_amount_out = 0.0; // slippage guard
    std::string pool_id;         // binding to a named pool in multi-pool scenarios
};

struct SwapOutcome {
    double amount_in = 0.0;
    double amount_out = 0.0;
    PoolState pool_after;
    bool executed = false; // false iff the slippage guard failed; pool untouched then
};

// Output amount for an exact-input swap:
//   out = R_out * in*(1-fee) / (R_in + in*(1-fee))
double quote_exact_in(const PoolState& pool, Direction dir, double amount_in);

// Executes the swap unless amount_out would violate the order's guard.
// A failed guard is a modeled outcome, not an error.
SwapOutcome swap_exact_in(const PoolState& pool, const SwapOrder& order);

// Relative shortfall of an exact-in swap versus the pre-swap spot rate,
// in [0,1). Strictly increasing in amount_in.
double relative_shortfall(const PoolState& pool, Direction dir, double amount_in);

} // namespace covertflow::amm
