// Benchmark of the OpenMP-parallel kernels against their serial reference
// implementations. The outputs must match bit for bit; only the wall time may
// differ.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "covertflow/chain_sim.hpp"
#include "covertflow/copula.hpp"
#include "covertflow/rng.hpp"
#include "covertflow/tail_stats.hpp"

using namespace covertflow;

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

template <typename F>
double timed(F&& f) {
    const double t0 = now_ms();
    f();
    return now_ms() - t0;
}

void report(const char* name, double serial_ms, double parallel_ms, bool identical) {
    std::printf("%-28s serial %8.1f ms   parallel %8.1f ms   speedup %.2fx   %s\n", name,
                serial_ms, parallel_ms, serial_ms / parallel_ms,
                identical ? "outputs identical" : "OUTPUT MISMATCH");
}

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (built without OpenMP)\n");
#endif

    { // power-law fit: candidate grid scan
        Xoshiro256pp rng(1);
        std::vector<double> sample(400000);
        for (auto& v : sample) v = std::pow(rng.uniform_open(), -1.0 / 1.4);
        tail_stats::TailFit fs{}, fp{};
        const double ts = timed([&] { fs = tail_stats::fit_power_law_serial(sample); });
        const double tp = timed([&] { fp = tail_stats::fit_power_law(sample); });
        report("fit_power_law", ts, tp,
               fs.alpha == fp.alpha && fs.x_min == fp.x_min && fs.ks_stat == fp.ks_stat);
    }

    { // Kendall tau matrix over the feature columns
        Xoshiro256pp rng(2);
        std::vector<std::vector<double>> cols(4, std::vector<double>(300000));
        for (auto& col : cols)
            for (auto& v : col) v = rng.uniform01();
        std::vector<double> ms, mp;
        const double ts = timed([&] { ms = tail_stats::kendall_tau_matrix_serial(cols); });
        const double tp = timed([&] { mp = tail_stats::kendall_tau_matrix(cols); });
        report("kendall_tau_matrix", ts, tp, ms == mp);
    }

    { // joint-survival scoring across incidents
        copula::CopulaModel model;
        model.family = copula::Family::StudentT;
        model.dim = 4;
        model.nu = 13;
        model.R = {1.0, 0.2, 0.1, 0.15, 0.2, 1.0, 0.05, 0.1,
                   0.1, 0.05, 1.0, 0.8, 0.15, 0.1, 0.8, 1.0};
        const auto u = copula::sample_copula(model, 20000, 3);
        copula::UniformScores scores;
        for (size_t i = 0; i < u.size(); ++i) {
            scores.ids.push_back("inc-" + std::to_string(i));
            for (int j = 0; j < 4; ++j) scores.u[static_cast<size_t>(j)].push_back(u[i][static_cast<size_t>(j)]);
        }
        std::vector<copula::TriageScore> rs, rp;
        const double ts = timed([&] { rs = copula::rank_incidents_serial(model, scores, 9, 128); });
        const double tp = timed([&] { rp = copula::rank_incidents(model, scores, 9, 128); });
        bool same = rs.size() == rp.size();
        for (size_t i = 0; same && i < rs.size(); ++i)
            same = rs[i].incident_id == rp[i].incident_id && rs[i].p == rp[i].p;
        report("rank_incidents", ts, tp, same);
    }

    { // timing-experiment trials
        chain::SequencerConfig seq;
        seq.seed = 4;
        chain::TimingResult rs{}, rp{};
        const double ts =
            timed([&] { rs = chain::run_timing_experiment_serial(seq, 330.0, 400, 0.0); });
        const double tp = timed([&] { rp = chain::run_timing_experiment(seq, 330.0, 400, 0.0); });
        report("run_timing_experiment", ts, tp,
               rs.success_rate == rp.success_rate &&
                   rs.adversary_wins_rate == rp.adversary_wins_rate);
    }
    return 0;
}
