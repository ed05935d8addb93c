#pragma once
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "covertflow/amm.hpp"

// Deterministic discrete-event inclusion models: a two-bidder PBS round with
// an optionally colluding validator, and a first-come-first-served sequencer
// with a fixed processing delay and a periodic block grid.
namespace covertflow::chain {

struct SwapPayload {
    std::vector<amm::SwapOrder> swaps; // executed atomically, in order
    bool chained = false;              // feed each leg the previous leg's output
};
struct TransferPayload {
    std::string to;
    double amount = 0.0;
};
struct ProbePayload {};

using TxPayload = std::variant<SwapPayload, TransferPayload, ProbePayload>;

struct SimTx {
    std::string id;
    std::string submitter;
    double submit_time_ms = 0.0;
    int region = 0;
    TxPayload payload;
};

struct Bundle {
    SimTx frontrun;
    SimTx victim;
    SimTx backrun;
    double bid = 0.0;
};

struct RegionLatency {
    double mean_ms = 5.0;
    double jitter_half_width_ms = 8.0;
};

struct SequencerConfig {
    double processing_delay_ms = 200.0;
    double block_interval_ms = 250.0;
    // block k closes at boundary_phase_ms + (k+1) * block_interval_ms
    double boundary_phase_ms = 0.0;
    // block contents become observable this long after the close
    double publication_delay_ms = 250.0;
    std::vector<RegionLatency> regions{{5.0, 8.0}, {15.0, 8.0}};
    std::uint64_t seed = 0;

    void validate() const;
    double block_close_ms(long index) const {
        return boundary_phase_ms + static_cast<double>(index + 1) * block_interval_ms;
    }
};

struct IncludedTx {
    SimTx tx;
    double arrival_ms = 0.0;
    double ready_ms = 0.0; // arrival + processing delay
};

struct SimBlock {
    long index = 0;
    double open_time_ms = 0.0;
    std::vector<IncludedTx> txs; // sorted by ready time
};

struct PbsRoundResult {
    SimBlock block;
    bool bundle_included = false;
    double adversary_cost = 0.0;
};

// Sealed two-bidder auction. When the validator colludes the bundle is
// included regardless of bid and the bid returns to the adversary.
PbsRoundResult run_pbs_round(const SimTx& mempool_victim, const Bundle& bundle,
                             bool colluding_validator, double competing_bid = 0.0);

// FCFS sequencing: per-tx latency sampled from the submitter's region,
// ready = arrival + processing delay, inclusion in the first block whose
// close is at or after ready, position ordered by ready time.
// Latencies are derived from (seed, tx id), so results do not depend on the
// order of `txs`.
std::vector<SimBlock> run_fcfs(const SequencerConfig& seq, const std::vector<SimTx>& txs);

std::vector<SimTx> make_probe_stream(double start_ms, double cadence_ms, int count,
                                     int region, const std::string& submitter = "probe");

// Block-grid phase recovered from probes that were confirmed as the final
// transaction of a block, expressed as the close time modulo the interval.
double estimate_boundary(const SequencerConfig& seq, const std::vector<SimTx>& probe_stream);

enum class SuccessCriterion {
    ExactlyTwoBlocksAfter,     // second leg lands exactly two blocks after the first
    LaterBlockBeforeCompetitor // any later block, but ahead of every competitor
};

struct TimingOptions {
    double probe_cadence_ms = 25.0;
    int probe_count = 40;
    int probe_region = 1;
    int adversary_region = 0;
    int competitor_region = 0;
    double boundary_margin_ms = 20.0; // aim this far before the estimated close
    SuccessCriterion criterion = SuccessCriterion::ExactlyTwoBlocksAfter;
};

struct TimingResult {
    double success_rate = 0.0;
    double adversary_wins_rate = 0.0;
    int trials = 0;
};

// Probe-calibrated submission times for the rate-inflating leg and the
// delayed second leg.
struct TwoLegSchedule {
    std::vector<SimTx> probes;
    double inflate_submit_ms = 0.0;
    double arb_submit_ms = 0.0;
    double target_close_ms = 0.0;
};

TwoLegSchedule schedule_two_leg(const SequencerConfig& seq, const TimingOptions& opts,
                                double delay_ms);

struct TimingTrialOutcome {
    bool success = false;
    bool adversary_wins = false;
    long inflating_block = -1;
    long arbitrage_block = -1;
};

TimingTrialOutcome run_timing_trial(const SequencerConfig& seq, double delay_ms,
                                    double competitor_reaction_ms, const TimingOptions& opts,
                                    std::uint64_t trial_seed);

// Monte Carlo over independent trials; trial seeds are derived from the
// config seed, so the result is independent of scheduling.
TimingResult run_timing_experiment(const SequencerConfig& seq, double delay_ms, int trials,
                                   double competitor_reaction_ms,
                                   const TimingOptions& opts = {});
TimingResult run_timing_experiment_serial(const SequencerConfig& seq, double delay_ms, int trials,
                                          double competitor_reaction_ms,
                                          const TimingOptions& opts = {});

} // namespace covertflow::chain
