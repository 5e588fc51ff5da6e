// Acceptance suite: one criterion per command-line argument (1..9), all by
// default. Prints one [PASS]/[FAIL] line per criterion; the exit status is
// the number of failed criteria.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "camuv/benchmark.hpp"
#include "camuv/camuv.hpp"
#include "camuv/commands.hpp"
#include "camuv/eval.hpp"
#include "camuv/kernel_stats.hpp"
#include "camuv/simgen.hpp"
#include "camuv/tscamuv.hpp"

using namespace camuv;
namespace fs = std::filesystem;

namespace {

int g_threads = 1;

ScmConfig pair_config(int conf, int inter, int direct, unsigned long seed) {
    ScmConfig c;
    c.n_observed = 2;
    c.n_confounded_pairs = conf;
    c.n_intermediate_pairs = inter;
    c.n_direct_pairs = direct;
    c.n_samples = 1000;
    c.seed = seed;
    return c;
}

DiscoveryConfig default_discovery() {
    DiscoveryConfig cfg;
    cfg.alpha = 0.01;
    cfg.max_subset_size = 2;
    return cfg;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Criterion 1: prior-knowledge trend. Mean precision and F-measure at k=4
// strictly exceed k=0; mean recall stays within +/-0.1.
bool criterion1() {
    PkSweepConfig cfg;
    cfg.repetitions = 20;
    cfg.instance.n_samples = 1000;
    cfg.seed = 20250101;
    cfg.threads = g_threads;
    auto rows = run_pk_sweep(cfg);
    auto at = [&](int k, double Score::*m) {
        return mean_metric(rows, [&](const BenchmarkRow& r) { return r.pk_count == k; }, m);
    };
    const double p0 = at(0, &Score::precision), p4 = at(4, &Score::precision);
    const double f0 = at(0, &Score::f_measure), f4 = at(4, &Score::f_measure);
    const double r0 = at(0, &Score::recall), r4 = at(4, &Score::recall);
    std::printf("    k=0: precision=%.3f recall=%.3f f=%.3f\n", p0, r0, f0);
    std::printf("    k=4: precision=%.3f recall=%.3f f=%.3f\n", p4, r4, f4);
    return p4 > p0 && f4 > f0 && std::abs(r4 - r0) <= 0.1;
}

// Criterion 2: sample-size trend for the time-series method.
bool criterion2() {
    TsSweepConfig cfg;
    cfg.repetitions = 20;
    cfg.sample_sizes = {200, 2000};
    cfg.seed = 20250202;
    cfg.threads = g_threads;
    auto rows = run_ts_sweep(cfg);
    auto at = [&](int n, double Score::*m) {
        return mean_metric(rows, [&](const BenchmarkRow& r) { return r.n == n; }, m);
    };
    const double f_small = at(200, &Score::f_measure), f_large = at(2000, &Score::f_measure);
    const double p_large = at(2000, &Score::precision);
    std::printf("    n=200:  f=%.3f\n", f_small);
    std::printf("    n=2000: f=%.3f precision=%.3f\n", f_large, p_large);
    return f_large > f_small && p_large >= 0.5;
}

// Criterion 3: prior-knowledge hard safety over 50 random runs (exact).
bool criterion3() {
    std::mt19937_64 rng(333);
    long violations = 0;
    for (int trial = 0; trial < 50; ++trial) {
        ScmConfig cfg;
        cfg.n_observed = 5;
        cfg.n_confounded_pairs = 1;
        cfg.n_intermediate_pairs = 1;
        cfg.n_direct_pairs = 3;
        cfg.n_samples = 300;
        cfg.seed = 5000 + static_cast<unsigned long>(trial);
        auto [data, truth] = gen_camuv_instance(cfg);
        DiscoveryConfig dc = default_discovery();
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j)
                if (i != j && rng() % 4 == 0) dc.prior.add(data.name(i), data.name(j));
        CausalGraph g = discover(data, dc);
        for (const auto& pair : dc.prior.forbidden)
            if (g.has_directed_edge(pair[0], pair[1])) ++violations;
    }
    std::printf("    violations=%ld of 50 runs\n", violations);
    return violations == 0;
}

// Criterion 4: time-priority hard safety over 50 runs (exact).
bool criterion4() {
    long bad = 0;
    for (int trial = 0; trial < 50; ++trial) {
        TsScmConfig cfg;
        cfg.n_observed = 2;
        cfg.max_lag = 2;
        cfg.n_confounded_pairs = 1;
        cfg.n_intermediate_pairs = 0;
        cfg.n_direct_pairs = 2;
        cfg.n_samples = 200;
        cfg.seed = 6000 + static_cast<unsigned long>(trial);
        auto [data, truth] = gen_ts_instance(cfg);
        auto result = discover_ts(data, cfg.max_lag, 0.01, 2);
        for (const auto& e : result.graph.edges)
            if (e.lag < 0 || e.lag > cfg.max_lag) ++bad;
    }
    std::printf("    out-of-range lags=%ld of 50 runs\n", bad);
    return bad == 0;
}

// Criterion 5: two-variable fixtures, 20 seeds each at n=1000, alpha=0.01.
bool criterion5() {
    const int seeds = 20;
    int chain_ok = 0, chain_rev = 0, ubp_dash = 0, ubp_dir = 0, ucp_dash = 0, ind_edges = 0;
    for (int s = 0; s < seeds; ++s) {
        {
            auto [data, truth] = gen_camuv_instance(pair_config(0, 0, 1, 7100 + s));
            CausalGraph g = discover(data, default_discovery());
            const auto e = truth.directed_edges().front();
            if (g.has_directed_edge(e[0], e[1])) ++chain_ok;
            if (g.has_directed_edge(e[1], e[0])) ++chain_rev;
        }
        {
            auto [data, truth] = gen_camuv_instance(pair_config(1, 0, 0, 7300 + s));
            CausalGraph g = discover(data, default_discovery());
            if (!g.dashed.empty()) ++ubp_dash;
            if (!g.directed_edges().empty()) ++ubp_dir;
        }
        {
            auto [data, truth] = gen_camuv_instance(pair_config(0, 1, 0, 7500 + s));
            CausalGraph g = discover(data, default_discovery());
            if (!g.dashed.empty()) ++ucp_dash;
        }
        {
            auto [data, truth] = gen_camuv_instance(pair_config(0, 0, 0, 7700 + s));
            CausalGraph g = discover(data, default_discovery());
            if (!g.directed_edges().empty() || !g.dashed.empty()) ++ind_edges;
        }
    }
    const bool a = chain_ok >= seeds * 0.80 && chain_rev <= seeds * 0.05;
    const bool b = ubp_dash >= seeds * 0.70 && ubp_dir <= seeds * 0.15;
    const bool c = ucp_dash >= seeds * 0.70;
    const bool d = ind_edges <= seeds * 0.10;
    std::printf("    (a) chain: correct=%d/20 reversed=%d/20 -> %s\n", chain_ok, chain_rev,
                a ? "ok" : "FAIL");
    std::printf("    (b) latent confounder: dashed=%d/20 directed=%d/20 -> %s\n", ubp_dash,
                ubp_dir, b ? "ok" : "FAIL");
    std::printf("    (c) latent intermediate: dashed=%d/20 -> %s\n", ucp_dash, c ? "ok" : "FAIL");
    std::printf("    (d) independent: edges=%d/20 -> %s\n", ind_edges, d ? "ok" : "FAIL");
    return a && b && c && d;
}

// Criterion 6: gamma vs 1000-permutation agreement on 100 independent pairs.
bool criterion6() {
    std::mt19937_64 rng(666);
    std::normal_distribution<double> gauss;
    int close = 0;
    const int pairs = 100;
    for (int s = 0; s < pairs; ++s) {
        Eigen::VectorXd x(300), y(300);
        for (Eigen::Index i = 0; i < 300; ++i) {
            x(i) = gauss(rng);
            y(i) = gauss(rng);
        }
        const double pg = hsic_pvalue_gamma(x, y).p_value;
        const double pp = hsic_pvalue_permutation(x, y, 1000, 1000 + s).p_value;
        if (std::abs(pg - pp) <= 0.1) ++close;
    }
    std::printf("    within 0.1: %d/100 pairs\n", close);
    return close >= 95;
}

// Criterion 7: empty prior knowledge reproduces the no-prior path bit-identically.
bool criterion7() {
    for (int trial = 0; trial < 20; ++trial) {
        ScmConfig cfg;
        cfg.n_observed = 3;
        cfg.n_confounded_pairs = 1;
        cfg.n_intermediate_pairs = 0;
        cfg.n_direct_pairs = 1;
        cfg.n_samples = 200;
        cfg.seed = 8800 + static_cast<unsigned long>(trial);
        auto [data, truth] = gen_camuv_instance(cfg);
        DiscoveryConfig no_prior = default_discovery();
        DiscoveryConfig empty_prior = default_discovery();
        empty_prior.prior = PriorKnowledge{};
        const std::string a = to_json(discover(data, no_prior)).dump();
        const std::string b = to_json(discover(data, empty_prior)).dump();
        if (a != b) {
            std::printf("    mismatch at trial %d\n", trial);
            return false;
        }
    }
    std::printf("    20/20 datasets bit-identical\n");
    return true;
}

// Criterion 8: embedding arithmetic (exact).
bool criterion8() {
    std::mt19937_64 rng(888);
    std::normal_distribution<double> gauss;
    bool ok = true;
    for (int n : {100, 57, 1000}) {
        Eigen::MatrixXd m(n, 3);
        for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = gauss(rng);
        auto [embedded, emb] = embed(Dataset({"A", "B", "C"}, m), 2);
        ok = ok && embedded.cols() == 9 && embedded.rows() == n - 2;
        std::printf("    n=%d -> %ld columns, %ld rows\n", n, static_cast<long>(embedded.cols()),
                    static_cast<long>(embedded.rows()));
    }
    return ok;
}

// Criterion 9: rerunning every command with identical inputs gives
// byte-identical output files.
bool criterion9() {
    const fs::path dir = fs::temp_directory_path() / "camuv_acceptance_c9";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto file = [&](const std::string& name) { return (dir / name).string(); };

    bool ok = true;
    auto expect_same = [&](const std::string& what, const std::string& a, const std::string& b) {
        const bool same = slurp(a) == slurp(b);
        std::printf("    %s: %s\n", what.c_str(), same ? "identical" : "DIFFER");
        ok = ok && same;
    };

    {
        nlohmann::json cfg{{"n_observed", 2}, {"n_confounded_pairs", 0},
                           {"n_intermediate_pairs", 0}, {"n_direct_pairs", 1},
                           {"n_samples", 300}};
        std::ofstream(file("cfg.json")) << cfg;
        for (const char* tag : {"one", "two"}) {
            SimulateOptions opt;
            opt.kind = "iid";
            opt.config_path = file("cfg.json");
            opt.seed = 99;
            opt.out_data = file(std::string("data_") + tag + ".csv");
            opt.out_truth = file(std::string("truth_") + tag + ".json");
            if (cmd_simulate(opt) != kExitOk) return false;
        }
        expect_same("simulate csv", file("data_one.csv"), file("data_two.csv"));
        expect_same("simulate truth", file("truth_one.json"), file("truth_two.json"));
    }
    {
        for (const char* tag : {"one", "two"}) {
            SimulateOptions opt;
            opt.kind = "ts";
            opt.n_samples = 150;
            opt.seed = 42;
            opt.out_data = file(std::string("ts_") + tag + ".csv");
            opt.out_truth = file(std::string("ts_truth_") + tag + ".json");
            if (cmd_simulate(opt) != kExitOk) return false;
        }
        expect_same("simulate ts csv", file("ts_one.csv"), file("ts_two.csv"));
    }
    {
        for (const char* tag : {"one", "two"}) {
            DiscoverOptions opt;
            opt.data_path = file("data_one.csv");
            opt.out_prefix = file(std::string("graph_") + tag);
            if (cmd_discover(opt) != kExitOk) return false;
        }
        expect_same("discover json", file("graph_one.json"), file("graph_two.json"));
        expect_same("discover dot", file("graph_one.dot"), file("graph_two.dot"));
    }
    {
        for (const char* tag : {"one", "two"}) {
            DiscoverTsOptions opt;
            opt.data_path = file("ts_one.csv");
            opt.max_lag = 2;
            opt.out_prefix = file(std::string("lag_") + tag);
            if (cmd_discover_ts(opt) != kExitOk) return false;
        }
        expect_same("discover-ts json", file("lag_one.json"), file("lag_two.json"));
    }
    {
        for (const char* tag : {"one", "two"}) {
            BenchmarkOptions opt;
            opt.protocol = "ts-sweep";
            opt.repetitions = 2;
            opt.sample_sizes = {120};
            opt.seed = 5;
            opt.threads = 2;
            opt.out_csv = file(std::string("bench_") + tag + ".csv");
            if (cmd_benchmark(opt) != kExitOk) return false;
        }
        expect_same("benchmark csv", file("bench_one.csv"), file("bench_two.csv"));
    }
    fs::remove_all(dir);
    return ok;
}

struct Criterion {
    int id;
    const char* label;
    bool (*run)();
};

const Criterion kCriteria[] = {
    {1, "prior-knowledge trend (pk-sweep, 20 reps, n=1000)", criterion1},
    {2, "sample-size trend (ts-sweep, 20 reps, n in {200,2000})", criterion2},
    {3, "prior-knowledge hard safety (50 runs, exact)", criterion3},
    {4, "time-priority hard safety (50 runs, exact)", criterion4},
    {5, "two-variable fixtures (20 seeds each, n=1000, alpha=0.01)", criterion5},
    {6, "HSIC gamma vs permutation agreement (100 pairs, n=300)", criterion6},
    {7, "CAM-UV equivalence with empty prior (20 datasets)", criterion7},
    {8, "embedding arithmetic (q=3, r=2)", criterion8},
    {9, "byte-identical reruns of every command", criterion9},
};

}  // namespace

int main(int argc, char** argv) {
    g_threads = cmd_detail::worker_threads();
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
    int failures = 0;
    for (const auto& c : kCriteria) {
        if (!wanted.empty() && !wanted.count(c.id)) continue;
        std::printf("criterion %d: %s\n", c.id, c.label);
        std::fflush(stdout);
        const bool ok = c.run();
        std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", c.id, c.label);
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    return failures;
}
