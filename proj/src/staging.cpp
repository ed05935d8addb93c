#include "covertflow/staging.hpp"

#include <algorithm>
#include <cmath>

#include "covertflow/errors.hpp"
#include "covertflow/market.hpp"

namespace covertflow::staging {

namespace {

// quote_exact_in + state step that tolerates a zero amount
std::pair<double, amm::PoolState> step(const amm::PoolState& pool, amm::Direction dir, double in) {
    if (in <= 0.0) return {0.0, pool};
    const double out = amm::quote_exact_in(pool, dir, in);
    amm::PoolState next = pool;
    if (dir == amm::Direction::BaseForQuote) {
        next.reserve_base += in;
        next.reserve_quote -= out;
    } else {
        next.reserve_quote += in;
        next.reserve_base -= out;
    }
    return {out, next};
}

double backrun_spend(const amm::PoolState& pre_frontrun, const amm::PoolState& current,
                     double quote_available) {
    const double restore = pre_frontrun.reserve_quote - current.reserve_quote;
    return std::max(0.0, std::min(quote_available, restore));
}

} // namespace

SandwichPlan plan_sandwich(const amm::PoolState& pool, const SandwichParams& p) {
    if (!pool.tradable()) throw DegeneratePool();
    if (p.sender_capital < 0.0 || p.receiver_base < 0.0 || p.receiver_quote < 0.0)
        throw ValidationError("capital amounts must be non-negative");

    const double spot = pool.spot_rate();
    auto [front_out, after_front] = step(pool, amm::Direction::BaseForQuote, p.receiver_base);
    auto [victim_out, after_victim] = step(after_front, amm::Direction::BaseForQuote, p.sender_capital);
    const double spend = backrun_spend(pool, after_victim, front_out + p.receiver_quote);
    auto [back_out, after_back] = step(after_victim, amm::Direction::QuoteForBase, spend);

    SandwichPlan plan;
    plan.params = p;
    plan.pre_spot = spot;
    plan.frontrun = {p.receiver, amm::Direction::BaseForQuote, p.receiver_base, 0.0, p.pool_id};
    plan.victim = {p.sender, amm::Direction::BaseForQuote, p.sender_capital, 0.0, p.pool_id};
    plan.backrun = {p.receiver, amm::Direction::QuoteForBase, spend, 0.0, p.pool_id};
    plan.predicted_transfer = (back_out - p.receiver_base) + (front_out - spend) / spot;
    plan.stranded = after_back.reserve_base - pool.reserve_base;
    plan.sender_loss = p.sender_capital - victim_out / spot;
    plan.effectiveness = p.sender_capital > 0.0 ? plan.predicted_transfer / p.sender_capital : 0.0;
    return plan;
}

SandwichExecution execute_sandwich(const SandwichPlan& plan, const amm::PoolState& pool,
                                   const PbsConfig& pbs) {
    const auto& p = plan.params;

    auto make_tx = [&](const std::string& id, const std::string& who, const amm::SwapOrder& order) {
        chain::SimTx tx;
        tx.id = id;
        tx.submitter = who;
        tx.payload = chain::SwapPayload{{order}, false};
        return tx;
    };
    chain::SimTx victim_tx = make_tx("victim", p.sender, plan.victim);
    chain::Bundle bundle{make_tx("frontrun", p.receiver, plan.frontrun), victim_tx,
                         make_tx("backrun", p.receiver, plan.backrun), pbs.bid};

    const auto round = chain::run_pbs_round(victim_tx, bundle, pbs.colluding_validator,
                                            pbs.competing_bid);

    SandwichExecution exec;
    exec.block = round.block;
    exec.bundle_included = round.bundle_included;
    exec.adversary_cost = round.adversary_cost;

    amm::PoolState state = pool;
    double front_out = 0.0, back_out = 0.0, spend = 0.0;
    int pos = 0;
    auto record = [&](const std::string& id, const std::string& from, const amm::SwapOutcome& oc,
                      amm::Direction dir) {
        exec.outcomes.push_back(oc);
        LedgerTx rec;
        rec.id = id;
        rec.block = exec.block.index;
        rec.position = pos++;
        rec.from = from;
        rec.to = p.pool_id;
        if (oc.executed && oc.amount_in > 0.0)
            rec.swaps.push_back({p.pool_id, dir, oc.amount_in, oc.amount_out});
        exec.ledger.push_back(std::move(rec));
    };

    if (round.bundle_included) {
        auto front = plan.frontrun.amount_in > 0.0
                         ? amm::swap_exact_in(state, plan.frontrun)
                         : amm::SwapOutcome{0.0, 0.0, state, true};
        state = front.pool_after;
        front_out = front.executed ? front.amount_out : 0.0;
        record("frontrun", p.receiver, front, plan.frontrun.direction);

        auto victim = plan.victim.amount_in > 0.0
                          ? amm::swap_exact_in(state, plan.victim)
                          : amm::SwapOutcome{0.0, 0.0, state, true};
        state = victim.pool_after;
        record("victim", p.sender, victim, plan.victim.direction);

        // resize the backrun against the realized state
        spend = backrun_spend(pool, state, front_out + p.receiver_quote);
        amm::SwapOrder back = plan.backrun;
        back.amount_in = spend;
        auto backrun = spend > 0.0 ? amm::swap_exact_in(state, back)
                                   : amm::SwapOutcome{0.0, 0.0, state, true};
        state = backrun.pool_after;
        back_out = backrun.executed ? backrun.amount_out : 0.0;
        record("backrun", p.receiver, backrun, plan.backrun.direction);
    } else {
        // losing bid: the victim swap still lands alone from the mempool
        auto victim = plan.victim.amount_in > 0.0
                          ? amm::swap_exact_in(state, plan.victim)
                          : amm::SwapOutcome{0.0, 0.0, state, true};
        state = victim.pool_after;
        record("victim", p.sender, victim, plan.victim.direction);
    }

    exec.pool_after = state;
    exec.realized_transfer =
        round.bundle_included ? (back_out - p.receiver_base) + (front_out - spend) / plan.pre_spot
                              : 0.0;
    exec.realized_stranded = state.reserve_base - pool.reserve_base;
    exec.realized_effectiveness =
        p.sender_capital > 0.0 ? exec.realized_transfer / p.sender_capital : 0.0;
    return exec;
}

ArbitragePlan plan_arbitrage(const amm::PoolState& pool_a, const amm::PoolState& pool_b,
                             const ArbitrageParams& p) {
    if (!pool_a.tradable() && !pool_b.tradable()) throw DegeneratePool();
    if (p.sender_capital < 0.0 || p.receiver_capital < 0.0)
        throw ValidationError("capital amounts must be non-negative");
    if (p.block_gap < 1) throw ValidationError("block_gap must be >= 1");

    const double spot_a = pool_a.spot_rate();
    auto [inflate_out, a_post] = step(pool_a, amm::Direction::BaseForQuote, p.sender_capital);

    // profit(b) = a*b/(c + d*b) - b for the two-leg cycle on the post-inflation
    // reserves; the maximizer is b* = (sqrt(a*c) - c)/d.
    const double g1 = 1.0 - static_cast<double>(a_post.fee_bps) / 10000.0;
    const double g2 = 1.0 - static_cast<double>(pool_b.fee_bps) / 10000.0;
    const double x1 = a_post.reserve_base, y1 = a_post.reserve_quote;
    const double x2 = pool_b.reserve_base, y2 = pool_b.reserve_quote;
    const double a = x1 * y2 * g1 * g2;
    const double c = x2 * y1;
    const double d = g1 * x2 + g1 * g2 * x1;

    ArbitragePlan plan;
    plan.params = p;
    plan.block_gap = p.block_gap;
    plan.sender_loss = p.sender_capital * spot_a - inflate_out;
    plan.inflating = {p.sender, amm::Direction::BaseForQuote, p.sender_capital, 0.0, p.pool_a_id};

    const double b_star = a > c ? (std::sqrt(a * c) - c) / d : 0.0;
    if (b_star <= 0.0) {
        plan.predicted_transfer = 0.0;
        plan.cycle_input = 0.0;
        return plan; // no rate gap to close
    }
    if (p.receiver_capital <= 0.0)
        throw InsufficientCapital("receiver capital cannot fund a profitable cycle");

    const double b = std::min(p.receiver_capital, b_star);
    const double leg1_out = amm::quote_exact_in(a_post, amm::Direction::QuoteForBase, b);
    const double leg2_out = amm::quote_exact_in(pool_b, amm::Direction::BaseForQuote, leg1_out);
    const double profit = leg2_out - b;
    if (profit <= 0.0)
        throw InsufficientCapital("receiver capital cannot fund a profitable cycle");

    plan.cycle_input = b;
    plan.predicted_transfer = profit;
    plan.arb_cycle = {
        {p.receiver, amm::Direction::QuoteForBase, b, 0.0, p.pool_a_id},
        {p.receiver, amm::Direction::BaseForQuote, leg1_out, 0.0, p.pool_b_id},
    };
    return plan;
}

ArbitrageExecution execute_arbitrage(const ArbitragePlan& plan, const amm::PoolState& pool_a,
                                     const amm::PoolState& pool_b,
                                     const chain::SequencerConfig& seq, double delay_ms,
                                     const chain::TimingOptions& opts) {
    const auto& p = plan.params;
    const auto sched = chain::schedule_two_leg(seq, opts, delay_ms);

    chain::SimTx inflating;
    inflating.id = "inflate";
    inflating.submitter = p.sender;
    inflating.submit_time_ms = sched.inflate_submit_ms;
    inflating.region = opts.adversary_region;
    inflating.payload = chain::SwapPayload{{plan.inflating}, false};

    chain::SimTx arb;
    arb.id = "arb-cycle";
    arb.submitter = p.receiver;
    arb.submit_time_ms = sched.arb_submit_ms;
    arb.region = opts.adversary_region;
    arb.payload = chain::SwapPayload{plan.arb_cycle, true};

    auto txs = sched.probes;
    if (plan.inflating.amount_in > 0.0) txs.push_back(inflating);
    if (!plan.arb_cycle.empty()) txs.push_back(arb);

    ArbitrageExecution exec;
    exec.blocks = chain::run_fcfs(seq, txs);

    market::Market mkt;
    mkt.add_pool({p.pool_a_id, "base", "quote", pool_a});
    mkt.add_pool({p.pool_b_id, "base", "quote", pool_b});
    exec.ledger = mkt.settle(exec.blocks);
    exec.pool_a_after = mkt.pool(p.pool_a_id).state;
    exec.pool_b_after = mkt.pool(p.pool_b_id).state;

    for (const auto& rec : exec.ledger) {
        if (rec.id == "inflate") exec.inflating_block = rec.block;
        if (rec.id == "arb-cycle") {
            exec.arbitrage_block = rec.block;
            if (rec.swaps.size() == plan.arb_cycle.size())
                exec.realized_transfer = rec.swaps.back().amount_out - rec.swaps.front().amount_in;
        }
    }

    const long gap = exec.arbitrage_block - exec.inflating_block;
    exec.deniability_failure =
        exec.inflating_block >= 0 && exec.arbitrage_block >= 0 && gap == 0;
    const bool profitable = exec.realized_transfer > 0.0;
    switch (opts.criterion) {
    case chain::SuccessCriterion::ExactlyTwoBlocksAfter:
        exec.success = profitable && gap == plan.block_gap;
        break;
    case chain::SuccessCriterion::LaterBlockBeforeCompetitor:
        exec.success = profitable && gap >= 1;
        break;
    }
    return exec;
}

} // namespace covertflow::staging
