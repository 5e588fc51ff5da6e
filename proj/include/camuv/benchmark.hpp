#ifndef CAMUV_BENCHMARK_HPP
#define CAMUV_BENCHMARK_HPP

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "camuv/camuv.hpp"
#include "camuv/dataset.hpp"
#include "camuv/eval.hpp"
#include "camuv/simgen.hpp"
#include "camuv/tscamuv.hpp"

namespace camuv {

struct BenchmarkRow {
    int rep = 0;
    unsigned long seed = 0;
    int n = 0;
    int pk_count = -1;  // -1 for protocols without a prior-knowledge level
    Score score;
};

namespace bench_detail {

/// Runs fn(rep) for rep in [0, count) on up to `threads` workers. Results must
/// be written into pre-sized slots; the first exception is rethrown.
template <typename Fn>
void parallel_reps(int count, int threads, Fn&& fn) {
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        for (int rep = 0; rep < count; ++rep) fn(rep);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        while (true) {
            const int rep = next.fetch_add(1);
            if (rep >= count) return;
            try {
                fn(rep);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace bench_detail

struct PkSweepConfig {
    ScmConfig instance;       // per-repetition template; seed is derived per rep
    int repetitions = 20;
    int pk_levels = 4;        // k runs from 0 to pk_levels
    double alpha = 0.01;
    int max_subset_size = 2;
    unsigned long seed = 0;
    int threads = 1;
};

/// Prior-knowledge sweep: per repetition, generate an instance, pick
/// `pk_levels` true direct edges (seed-determined shuffle) as prior-knowledge
/// candidates, run discovery with k = 0..pk_levels of them, and score directed
/// edges with all candidate pairs excluded from the evaluation on both sides.
/// A known edge a->b enters the prior as the forbidden pair (b, a).
inline std::vector<BenchmarkRow> run_pk_sweep(const PkSweepConfig& cfg) {
    if (cfg.repetitions < 1) throw std::invalid_argument("pk sweep: repetitions must be >= 1");
    const int levels = cfg.pk_levels;
    std::vector<BenchmarkRow> rows(static_cast<std::size_t>(cfg.repetitions) *
                                   static_cast<std::size_t>(levels + 1));

    bench_detail::parallel_reps(cfg.repetitions, cfg.threads, [&](int rep) {
        ScmConfig inst = cfg.instance;
        inst.seed = cfg.seed + static_cast<unsigned long>(rep);
        auto [data, truth] = gen_camuv_instance(inst);

        auto edges = truth.directed_edges();
        std::mt19937_64 shuffle_rng(inst.seed ^ 0x9e3779b97f4a7c15ULL);
        std::shuffle(edges.begin(), edges.end(), shuffle_rng);
        const int k_max = std::min<int>(levels, static_cast<int>(edges.size()));

        std::set<std::array<std::string, 2>> excluded;
        for (int k = 0; k < k_max; ++k) excluded.insert(edges[static_cast<std::size_t>(k)]);

        DiscoveryCache cache;  // shared across prior levels on the same data
        for (int k = 0; k <= levels; ++k) {
            DiscoveryConfig dc;
            dc.alpha = cfg.alpha;
            dc.max_subset_size = cfg.max_subset_size;
            for (int i = 0; i < std::min(k, k_max); ++i)
                dc.prior.add(edges[static_cast<std::size_t>(i)][1],
                             edges[static_cast<std::size_t>(i)][0]);
            CausalGraph est = discover(data, dc, &cache);
            BenchmarkRow row;
            row.rep = rep;
            row.seed = inst.seed;
            row.n = inst.n_samples;
            row.pk_count = k;
            row.score = score_directed(truth, est, excluded);
            rows[static_cast<std::size_t>(rep) * static_cast<std::size_t>(levels + 1) +
                 static_cast<std::size_t>(k)] = row;
        }
    });
    return rows;
}

struct TsSweepConfig {
    TsScmConfig instance;     // per-repetition template; n_samples/seed derived
    std::vector<int> sample_sizes = {200, 2000};
    int repetitions = 20;
    double alpha = 0.01;
    int max_subset_size = 2;
    unsigned long seed = 0;
    int threads = 1;
};

/// Sample-size sweep for the time-series method: per (n, repetition) cell,
/// generate a stationary instance, run lag-graph discovery, score triples.
inline std::vector<BenchmarkRow> run_ts_sweep(const TsSweepConfig& cfg) {
    if (cfg.repetitions < 1) throw std::invalid_argument("ts sweep: repetitions must be >= 1");
    if (cfg.sample_sizes.empty()) throw std::invalid_argument("ts sweep: empty sample-size grid");
    const int cells = static_cast<int>(cfg.sample_sizes.size()) * cfg.repetitions;
    std::vector<BenchmarkRow> rows(static_cast<std::size_t>(cells));

    bench_detail::parallel_reps(cells, cfg.threads, [&](int cell) {
        const int size_idx = cell / cfg.repetitions;
        const int rep = cell % cfg.repetitions;
        TsScmConfig inst = cfg.instance;
        inst.n_samples = cfg.sample_sizes[static_cast<std::size_t>(size_idx)];
        inst.seed = cfg.seed + static_cast<unsigned long>(rep);
        auto [data, truth] = gen_ts_instance(inst);
        auto result = discover_ts(data, inst.max_lag, cfg.alpha, cfg.max_subset_size);
        BenchmarkRow row;
        row.rep = rep;
        row.seed = inst.seed;
        row.n = inst.n_samples;
        row.score = score_lag_graph(truth, result.graph);
        rows[static_cast<std::size_t>(cell)] = row;
    });
    return rows;
}

/// Deterministic CSV rendering in (n, rep, pk_count) order as produced.
inline std::string benchmark_csv(const std::vector<BenchmarkRow>& rows, bool with_pk_column) {
    std::ostringstream out;
    out << (with_pk_column ? "rep,seed,n,pk_count,tp,fp,fn,precision,recall,f_measure\n"
                           : "rep,seed,n,tp,fp,fn,precision,recall,f_measure\n");
    for (const auto& r : rows) {
        out << r.rep << ',' << r.seed << ',' << r.n << ',';
        if (with_pk_column) out << r.pk_count << ',';
        out << r.score.tp << ',' << r.score.fp << ',' << r.score.fn << ','
            << detail::format_double(r.score.precision) << ','
            << detail::format_double(r.score.recall) << ','
            << detail::format_double(r.score.f_measure) << '\n';
    }
    return out.str();
}

/// Mean of a per-row metric over the rows matching a predicate.
template <typename Pred>
double mean_metric(const std::vector<BenchmarkRow>& rows, Pred&& pred,
                   double Score::*metric) {
    double acc = 0.0;
    long count = 0;
    for (const auto& r : rows)
        if (pred(r)) {
            acc += r.score.*metric;
            ++count;
        }
    if (count == 0) throw std::invalid_argument("mean_metric: no matching rows");
    return acc / static_cast<double>(count);
}

}  // namespace camuv

#endif
