#include "covertflow/chain_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "covertflow/errors.hpp"
#include "covertflow/rng.hpp"

namespace covertflow::chain {

void SequencerConfig::validate() const {
    if (!(processing_delay_ms > 0.0)) throw ValidationError("processing_delay_ms must be > 0");
    if (!(block_interval_ms > 0.0)) throw ValidationError("block_interval_ms must be > 0");
    if (regions.empty()) throw ValidationError("at least one latency region is required");
    for (const auto& r : regions) {
        if (r.mean_ms < 0.0 || r.jitter_half_width_ms < 0.0)
            throw ValidationError("latency parameters must be non-negative");
    }
}

PbsRoundResult run_pbs_round(const SimTx& mempool_victim, const Bundle& bundle,
                             bool colluding_validator, double competing_bid) {
    if (bundle.victim.id != mempool_victim.id)
        throw BundleError("bundle victim slot does not match the mempool transaction");

    PbsRoundResult res;
    res.block.index = 0;
    res.block.open_time_ms = 0.0;
    if (colluding_validator) {
        res.bundle_included = true;
        res.adversary_cost = 0.0; // the bid returns to the adversary
    } else if (bundle.bid >= competing_bid && bundle.bid > 0.0) {
        res.bundle_included = true;
        res.adversary_cost = bundle.bid;
    } else {
        res.bundle_included = false;
        res.adversary_cost = 0.0;
    }
    if (res.bundle_included) {
        double pos = 0.0;
        for (const SimTx* tx : {&bundle.frontrun, &bundle.victim, &bundle.backrun}) {
            res.block.txs.push_back({*tx, pos, pos});
            pos += 1.0;
        }
    } else {
        res.block.txs.push_back({mempool_victim, 0.0, 0.0});
    }
    return res;
}

namespace {

double sample_latency(const SequencerConfig& seq, const SimTx& tx) {
    const auto& region = seq.regions[static_cast<size_t>(tx.region) % seq.regions.size()];
    Xoshiro256pp rng(derive_seed(seq.seed, tx.id));
    const double jitter = region.jitter_half_width_ms * (2.0 * rng.uniform01() - 1.0);
    return std::max(0.0, region.mean_ms + jitter);
}

} // namespace

std::vector<SimBlock> run_fcfs(const SequencerConfig& seq, const std::vector<SimTx>& txs) {
    seq.validate();
    struct Pending {
        const SimTx* tx;
        double arrival;
        double ready;
        long block;
    };
    std::vector<Pending> pending;
    pending.reserve(txs.size());
    long max_block = -1;
    for (const auto& tx : txs) {
        if (tx.submit_time_ms < 0.0) throw ValidationError("submit_time_ms must be >= 0");
        const double arrival = tx.submit_time_ms + sample_latency(seq, tx);
        const double ready = arrival + seq.processing_delay_ms;
        // first block whose close time >= ready
        const double rel = (ready - seq.boundary_phase_ms) / seq.block_interval_ms;
        long block = static_cast<long>(std::ceil(rel)) - 1;
        if (block < 0) block = 0;
        pending.push_back({&tx, arrival, ready, block});
        max_block = std::max(max_block, block);
    }
    std::stable_sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) {
        if (a.block != b.block) return a.block < b.block;
        if (a.ready != b.ready) return a.ready < b.ready;
        if (a.arrival != b.arrival) return a.arrival < b.arrival;
        return a.tx->id < b.tx->id;
    });
    std::vector<SimBlock> blocks(static_cast<size_t>(max_block + 1));
    for (long k = 0; k <= max_block; ++k) {
        blocks[static_cast<size_t>(k)].index = k;
        blocks[static_cast<size_t>(k)].open_time_ms = seq.block_close_ms(k) - seq.block_interval_ms;
    }
    for (const auto& p : pending)
        blocks[static_cast<size_t>(p.block)].txs.push_back({*p.tx, p.arrival, p.ready});
    return blocks;
}

std::vector<SimTx> make_probe_stream(double start_ms, double cadence_ms, int count, int region,
                                     const std::string& submitter) {
    std::vector<SimTx> probes;
    probes.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        SimTx tx;
        tx.id = submitter + "-" + std::to_string(i);
        tx.submitter = submitter;
        tx.submit_time_ms = start_ms + cadence_ms * i;
        tx.region = region;
        tx.payload = ProbePayload{};
        probes.push_back(std::move(tx));
    }
    return probes;
}

double estimate_boundary(const SequencerConfig& seq, const std::vector<SimTx>& probe_stream) {
    if (probe_stream.empty()) throw EstimationFailed();
    const auto blocks = run_fcfs(seq, probe_stream);
    const double interval = seq.block_interval_ms;
    const auto& region = seq.regions[static_cast<size_t>(probe_stream.front().region) %
                                     seq.regions.size()];
    const double nominal = region.mean_ms + seq.processing_delay_ms;

    // Each probe confirmed as the final transaction of a block gives one
    // sample of the close-time phase; average them around the first sample.
    // The stream's last occupied block never confirms: its closing probe may
    // only be "final" because the stream ran out.
    long last_occupied = -1;
    for (const auto& b : blocks)
        if (!b.txs.empty()) last_occupied = b.index;
    double ref = -1.0;
    double acc = 0.0;
    int count = 0;
    for (const auto& b : blocks) {
        if (b.txs.empty() || b.index == last_occupied) continue;
        const auto& last = b.txs.back();
        if (!std::holds_alternative<ProbePayload>(last.tx.payload)) continue;
        const double est_close = last.tx.submit_time_ms + nominal;
        double phase = std::fmod(est_close, interval);
        if (phase < 0.0) phase += interval;
        if (ref < 0.0) ref = phase;
        double delta = phase - ref;
        if (delta > 0.5 * interval) delta -= interval;
        if (delta < -0.5 * interval) delta += interval;
        acc += delta;
        ++count;
    }
    if (count == 0) throw EstimationFailed();
    double est = ref + acc / count;
    est = std::fmod(est, interval);
    if (est < 0.0) est += interval;
    return est;
}

TwoLegSchedule schedule_two_leg(const SequencerConfig& seq, const TimingOptions& opts,
                                double delay_ms) {
    TwoLegSchedule sched;
    sched.probes =
        make_probe_stream(0.0, opts.probe_cadence_ms, opts.probe_count, opts.probe_region);
    const double phase = estimate_boundary(seq, sched.probes);

    const double adv_mean = seq.regions[static_cast<size_t>(opts.adversary_region) %
                                        seq.regions.size()].mean_ms;
    const double probe_end = opts.probe_cadence_ms * opts.probe_count;

    // aim the rate-inflating tx a small margin before the next estimated close
    const double interval = seq.block_interval_ms;
    double target_close = std::floor((probe_end + 2.0 * interval) / interval) * interval + phase;
    while (target_close - opts.boundary_margin_ms - seq.processing_delay_ms - adv_mean < probe_end)
        target_close += interval;
    sched.target_close_ms = target_close;
    sched.inflate_submit_ms =
        target_close - opts.boundary_margin_ms - seq.processing_delay_ms - adv_mean;
    sched.arb_submit_ms = sched.inflate_submit_ms + delay_ms;
    return sched;
}

TimingTrialOutcome run_timing_trial(const SequencerConfig& seq_in, double delay_ms,
                                    double competitor_reaction_ms, const TimingOptions& opts,
                                    std::uint64_t trial_seed) {
    SequencerConfig seq = seq_in;
    seq.seed = derive_seed(trial_seed, 0x7472u);
    {
        // unknown grid alignment per trial
        Xoshiro256pp rng(derive_seed(trial_seed, 0x70686173u));
        seq.boundary_phase_ms = rng.uniform01() * seq.block_interval_ms;
    }

    const auto sched = schedule_two_leg(seq, opts, delay_ms);
    SimTx inflating{"inflate", "sender", sched.inflate_submit_ms, opts.adversary_region,
                    TransferPayload{"pool", 0.0}};
    SimTx arb{"arb", "receiver", sched.arb_submit_ms, opts.adversary_region,
              TransferPayload{"pool", 0.0}};

    auto txs = sched.probes;
    txs.push_back(inflating);
    txs.push_back(arb);
    auto blocks = run_fcfs(seq, txs);

    auto find_block = [&](const std::string& id) -> long {
        for (const auto& b : blocks)
            for (const auto& itx : b.txs)
                if (itx.tx.id == id) return b.index;
        return -1;
    };
    const long b_inflate = find_block("inflate");

    // the competitor reacts only once the inflating block is published
    const double publish = seq.block_close_ms(b_inflate) + seq.publication_delay_ms;
    SimTx comp{"competitor", "competitor", publish + competitor_reaction_ms,
               opts.competitor_region, TransferPayload{"pool", 0.0}};
    txs.push_back(comp);
    blocks = run_fcfs(seq, txs);

    const long b_infl2 = find_block("inflate");
    const long b_arb = find_block("arb");
    const long b_comp = find_block("competitor");

    auto position = [&](const std::string& id) -> long {
        for (const auto& b : blocks)
            for (size_t i = 0; i < b.txs.size(); ++i)
                if (b.txs[i].tx.id == id)
                    return b.index * 10000 + static_cast<long>(i);
        return -1;
    };

    TimingTrialOutcome out;
    out.inflating_block = b_infl2;
    out.arbitrage_block = b_arb;
    out.adversary_wins = position("arb") < position("competitor");
    switch (opts.criterion) {
    case SuccessCriterion::ExactlyTwoBlocksAfter:
        out.success = (b_arb - b_infl2) == 2;
        break;
    case SuccessCriterion::LaterBlockBeforeCompetitor:
        out.success = b_arb > b_infl2 && (b_comp < 0 || position("arb") < position("competitor"));
        break;
    }
    return out;
}

namespace {

TimingResult run_experiment_impl(const SequencerConfig& seq, double delay_ms, int trials,
                                 double competitor_reaction_ms, const TimingOptions& opts,
                                 bool parallel) {
    if (trials < 1) throw ValidationError("trials must be >= 1");
    std::vector<unsigned char> success(static_cast<size_t>(trials)), wins(static_cast<size_t>(trials));
#pragma omp parallel for schedule(static) if (parallel)
    for (int t = 0; t < trials; ++t) {
        const auto out = run_timing_trial(seq, delay_ms, competitor_reaction_ms, opts,
                                          derive_seed(seq.seed, static_cast<std::uint64_t>(t)));
        success[static_cast<size_t>(t)] = out.success ? 1 : 0;
        wins[static_cast<size_t>(t)] = out.adversary_wins ? 1 : 0;
    }
    TimingResult res;
    res.trials = trials;
    long s = 0, w = 0;
    for (int t = 0; t < trials; ++t) {
        s += success[static_cast<size_t>(t)];
        w += wins[static_cast<size_t>(t)];
    }
    res.success_rate = static_cast<double>(s) / trials;
    res.adversary_wins_rate = static_cast<double>(w) / trials;
    return res;
}

} // namespace

TimingResult run_timing_experiment(const SequencerConfig& seq, double delay_ms, int trials,
                                   double competitor_reaction_ms, const TimingOptions& opts) {
    return run_experiment_impl(seq, delay_ms, trials, competitor_reaction_ms, opts, true);
}

TimingResult run_timing_experiment_serial(const SequencerConfig& seq, double delay_ms, int trials,
                                          double competitor_reaction_ms, const TimingOptions& opts) {
    return run_experiment_impl(seq, delay_ms, trials, competitor_reaction_ms, opts, false);
}

} // namespace covertflow::chain
