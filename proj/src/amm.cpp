#include "covertflow/amm.hpp"

#include <stdexcept>

#include "covertflow/errors.hpp"

namespace covertflow::amm {

Direction reverse(Direction d) {
    return d == Direction::BaseForQuote ? Direction::QuoteForBase : Direction::BaseForQuote;
}

double quote_exact_in(const PoolState& pool, Direction dir, double amount_in) {
    if (!pool.tradable()) throw DegeneratePool();
    if (amount_in < 0.0) throw ValidationError("swap amount_in must be non-negative");
    if (amount_in == 0.0) return 0.0;
    const double fee = static_cast<double>(pool.fee_bps) / 10000.0;
    const double eff = amount_in * (1.0 - fee);
    const double r_in = dir == Direction::BaseForQuote ? pool.reserve_base : pool.reserve_quote;
    const double r_out = dir == Direction::BaseForQuote ? pool.reserve_quote : pool.reserve_base;
    return r_out * eff / (r_in + eff);
}

SwapOutcome swap_exact_in(const PoolState& pool, const SwapOrder& order) {
    if (order.amount_in <= 0.0) throw ValidationError("swap amount_in must be positive");
    const double out = quote_exact_in(pool, order.direction, order.amount_in);
    SwapOutcome res;
    res.amount_in = order.amount_in;
    if (out < order.min_amount_out) {
        res.amount_out = 0.0;
        res.pool_after = pool;
        res.executed = false;
        return res;
    }
    res.amount_out = out;
    res.executed = true;
    PoolState next = pool;
    // the whole input (fee included) stays in the reserves
    if (order.direction == Direction::BaseForQuote) {
        next.reserve_base += order.amount_in;
        next.reserve_quote -= out;
    } else {
        next.reserve_quote += order.amount_in;
        next.reserve_base -= out;
    }
    res.pool_after = next;
    return res;
}

double relative_shortfall(const PoolState& pool, Direction dir, double amount_in) {
    if (!pool.tradable()) throw DegeneratePool();
    if (amount_in <= 0.0) return 0.0;
    const double spot = dir == Direction::BaseForQuote ? pool.spot_rate() : 1.0 / pool.spot_rate();
    const double ideal = amount_in * spot;
    const double actual = quote_exact_in(pool, dir, amount_in);
    return 1.0 - actual / ideal;
}

} // namespace covertflow::amm
