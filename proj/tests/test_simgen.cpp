#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <random>

#include "camuv/kernel_stats.hpp"
#include "camuv/simgen.hpp"
#include "support/oracles.hpp"

using namespace camuv;
using Catch::Approx;

TEST_CASE("causal function vanishes at zero for symmetric parameters") {
    CausalFunction f{10, 0, 4, 10, 0, 4};
    CHECK(causal_fn_eval(f, 0.0) == Approx(0.0).margin(1e-15));
    // Both terms are odd when the shifts vanish.
    for (double x : {0.13, 0.7, 1.9}) {
        CHECK(causal_fn_eval(f, -x) == Approx(-causal_fn_eval(f, x)).margin(1e-12));
    }
}

TEST_CASE("causal function matches an independent re-implementation") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        CausalFunction f = draw_causal_fn(rng);
        const double x = 0.3;
        const double expect = oracles::causal_fn_reference(f.a1, f.b1, f.c1, f.a2, f.b2, f.c2, x);
        CHECK(causal_fn_eval(f, x) == Approx(expect).margin(1e-12));
    }
}

TEST_CASE("causal function is bounded by c1 + c2/2") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 10; ++trial) {
        CausalFunction f = draw_causal_fn(rng);
        for (double x = -10.0; x <= 10.0; x += 0.01) {
            CHECK(std::abs(causal_fn_eval(f, x)) <= f.c1 + f.c2 / 2.0 + 1e-12);
        }
    }
}

TEST_CASE("minimal instance is a two-variable chain") {
    ScmConfig cfg;
    cfg.n_observed = 2;
    cfg.n_confounded_pairs = 0;
    cfg.n_intermediate_pairs = 0;
    cfg.n_direct_pairs = 1;
    cfg.n_samples = 100;
    cfg.seed = 3;
    auto [data, truth] = gen_camuv_instance(cfg);
    CHECK(data.cols() == 2);
    CHECK(data.rows() == 100);
    CHECK(truth.directed_edges().size() == 1);
    CHECK(truth.confounded_pairs.empty());
    CHECK(truth.intermediate_pairs.empty());
}

TEST_CASE("default instance honors the experimental protocol counts") {
    ScmConfig cfg;
    cfg.seed = 11;
    auto [data, truth] = gen_camuv_instance(cfg);
    CHECK(data.cols() == 10);
    CHECK(truth.directed_edges().size() == 10);
    CHECK(truth.confounded_pairs.size() == 4);
    CHECK(truth.intermediate_pairs.size() == 2);

    // The three pair sets are mutually disjoint as unordered pairs.
    std::set<std::array<std::string, 2>> all;
    for (const auto& e : truth.directed_edges()) {
        all.insert(unordered_pair(e[0], e[1]));
    }
    CHECK(all.size() == 10);
    for (const auto& p : truth.confounded_pairs) CHECK(all.insert(p).second);
    for (const auto& p : truth.intermediate_pairs) CHECK(all.insert(p).second);
}

TEST_CASE("directed ground truth is acyclic") {
    ScmConfig cfg;
    cfg.seed = 13;
    auto [data, truth] = gen_camuv_instance(cfg);
    // Kahn over the truth edges must consume every variable.
    std::map<std::string, int> indeg;
    std::map<std::string, std::vector<std::string>> out;
    for (const auto& v : truth.variables) indeg[v] = 0;
    for (const auto& e : truth.directed_edges()) {
        out[e[0]].push_back(e[1]);
        ++indeg[e[1]];
    }
    std::vector<std::string> ready;
    for (auto& [v, d] : indeg)
        if (d == 0) ready.push_back(v);
    std::size_t seen = 0;
    while (!ready.empty()) {
        auto v = ready.back();
        ready.pop_back();
        ++seen;
        for (const auto& w : out[v])
            if (--indeg[w] == 0) ready.push_back(w);
    }
    CHECK(seen == truth.variables.size());
}

TEST_CASE("same seed reproduces the dataset bit for bit") {
    ScmConfig cfg;
    cfg.seed = 17;
    cfg.n_samples = 50;
    auto [a, ta] = gen_camuv_instance(cfg);
    auto [b, tb] = gen_camuv_instance(cfg);
    CHECK(a.values() == b.values());
    CHECK(ta.directed_edges() == tb.directed_edges());
}

TEST_CASE("generated values are bounded by the additive signal budget") {
    ScmConfig cfg;
    cfg.seed = 19;
    cfg.n_samples = 500;
    auto [data, truth] = gen_camuv_instance(cfg);
    // Each causal term is bounded by c1 + c2/2 <= 7.5; indegree <= p-1 + latents.
    long max_indegree = 2;
    for (const auto& [child, ps] : truth.parents)
        max_indegree = std::max<long>(max_indegree, static_cast<long>(ps.size()) + 2);
    const double bound = 7.5 * static_cast<double>(max_indegree) + 6.5 * cfg.noise_scale;
    CHECK(data.values().cwiseAbs().maxCoeff() <= bound);
}

TEST_CASE("infeasible budgets are rejected") {
    ScmConfig cfg;
    cfg.n_observed = 3;  // only 3 unordered pairs
    cfg.n_confounded_pairs = 2;
    cfg.n_intermediate_pairs = 1;
    cfg.n_direct_pairs = 1;
    CHECK_THROWS_AS(gen_camuv_instance(cfg), std::invalid_argument);
}

TEST_CASE("ts default instance has five distinct lag edges within range") {
    TsScmConfig cfg;
    cfg.seed = 23;
    cfg.n_samples = 200;
    auto [data, truth] = gen_ts_instance(cfg);
    CHECK(data.cols() == 3);
    CHECK(data.rows() == 200);
    CHECK(truth.edges.size() == 5);
    CHECK(truth.confounded_pairs.size() == 2);
    CHECK(truth.intermediate_pairs.size() == 2);
    for (const auto& e : truth.edges) {
        CHECK(e.lag >= 0);
        CHECK(e.lag <= cfg.max_lag);
    }
}

TEST_CASE("a single lagged edge leaves a detectable dependence") {
    // One edge (X1, lag 1) -> X2 and nothing else.
    TsScmConfig cfg;
    cfg.n_observed = 2;
    cfg.max_lag = 1;
    cfg.n_confounded_pairs = 0;
    cfg.n_intermediate_pairs = 0;
    cfg.n_direct_pairs = 1;
    cfg.n_samples = 2000;
    for (unsigned long seed = 0;; ++seed) {
        cfg.seed = seed;
        auto [data, truth] = gen_ts_instance(cfg);
        REQUIRE(truth.edges.size() == 1);
        const LagEdge e = *truth.edges.begin();
        if (e.lag != 1) continue;  // orientation draw produced a contemporaneous edge
        const Eigen::Index n = data.rows();
        Eigen::VectorXd cause = data.column(e.cause).head(n - 1);
        Eigen::VectorXd effect = data.column(e.effect).tail(n - 1);
        CHECK(hsic_pvalue_gamma(cause, effect).p_value < 0.01);
        break;
    }
}

TEST_CASE("ts generation is reproducible and stationary in scale") {
    TsScmConfig cfg;
    cfg.seed = 29;
    cfg.n_samples = 300;
    auto [a, ta] = gen_ts_instance(cfg);
    auto [b, tb] = gen_ts_instance(cfg);
    CHECK(a.values() == b.values());
    CHECK(ta.edges == tb.edges);
    CHECK(a.values().cwiseAbs().maxCoeff() < 100.0);  // bounded functions keep the series stable
}

TEST_CASE("ts rejects impossible configurations") {
    TsScmConfig cfg;
    cfg.burn_in = 1;  // below max_lag
    CHECK_THROWS_AS(gen_ts_instance(cfg), std::invalid_argument);
    TsScmConfig cfg2;
    cfg2.n_observed = 1;
    cfg2.max_lag = 1;
    cfg2.n_confounded_pairs = 5;
    cfg2.n_intermediate_pairs = 5;
    cfg2.n_direct_pairs = 5;
    CHECK_THROWS_AS(gen_ts_instance(cfg2), std::invalid_argument);
}
