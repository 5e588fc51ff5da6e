#ifndef CAMUV_SIMGEN_HPP
#define CAMUV_SIMGEN_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "camuv/dataset.hpp"
#include "camuv/errors.hpp"
#include "camuv/graph.hpp"
#include "camuv/tscamuv.hpp"

namespace camuv {

/// Per-edge nonlinearity: sin(a1 (x+b1))^3 c1 + (logistic(a2 (x+b2)) - 1/2) c2.
/// Bounded by c1 + c2/2 for all inputs.
struct CausalFunction {
    double a1 = 10.0, b1 = 0.0, c1 = 4.0;
    double a2 = 10.0, b2 = 0.0, c2 = 4.0;
};

inline double causal_fn_eval(const CausalFunction& f, double x) {
    const double s = std::sin(f.a1 * (x + f.b1));
    const double logistic = 1.0 / (1.0 + std::exp(-f.a2 * (x + f.b2)));
    return s * s * s * f.c1 + (logistic - 0.5) * f.c2;
}

inline CausalFunction draw_causal_fn(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> a(9.0, 11.0);
    std::uniform_real_distribution<double> b(-0.1, 0.1);
    std::uniform_real_distribution<double> c(3.0, 5.0);
    CausalFunction f;
    f.a1 = a(rng);
    f.b1 = b(rng);
    f.c1 = c(rng);
    f.a2 = a(rng);
    f.b2 = b(rng);
    f.c2 = c(rng);
    return f;
}

struct ScmConfig {
    int n_observed = 10;
    int n_confounded_pairs = 4;
    int n_intermediate_pairs = 2;
    int n_direct_pairs = 10;
    double noise_scale = 0.5;
    int n_samples = 1000;
    unsigned long seed = 0;
};

namespace simgen_detail {

inline std::vector<std::string> variable_names(int p) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(p));
    for (int i = 1; i <= p; ++i) names.push_back("X" + std::to_string(i));
    return names;
}

/// Deterministic Kahn topological sort with min-id tie-breaking.
inline std::vector<int> topological_order(int node_count,
                                          const std::vector<std::pair<int, int>>& edges) {
    std::vector<std::set<int>> out(static_cast<std::size_t>(node_count));
    std::vector<int> indeg(static_cast<std::size_t>(node_count), 0);
    for (const auto& [s, d] : edges)
        if (out[static_cast<std::size_t>(s)].insert(d).second) ++indeg[static_cast<std::size_t>(d)];
    std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
    for (int v = 0; v < node_count; ++v)
        if (indeg[static_cast<std::size_t>(v)] == 0) ready.push(v);
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(node_count));
    while (!ready.empty()) {
        const int v = ready.top();
        ready.pop();
        order.push_back(v);
        for (int w : out[static_cast<std::size_t>(v)])
            if (--indeg[static_cast<std::size_t>(w)] == 0) ready.push(w);
    }
    if (order.size() != static_cast<std::size_t>(node_count))
        throw internal_error("simgen: generated graph is cyclic");
    return order;
}

}  // namespace simgen_detail

/// Samples an i.i.d. CAM-UV instance: a random total order over the observed
/// variables, three mutually disjoint random pair sets (confounded /
/// latent-intermediate / direct) oriented earlier-to-later, fresh latent
/// variables realizing the confounders and relays, Gaussian external effects.
inline std::pair<Dataset, GroundTruth> gen_camuv_instance(const ScmConfig& cfg) {
    const int p = cfg.n_observed;
    if (p < 2) throw std::invalid_argument("simgen: need at least 2 observed variables");
    if (cfg.n_samples < 4) throw std::invalid_argument("simgen: need at least 4 samples");
    if (cfg.noise_scale <= 0.0) throw std::invalid_argument("simgen: noise scale must be positive");
    if (cfg.n_confounded_pairs < 0 || cfg.n_intermediate_pairs < 0 || cfg.n_direct_pairs < 0)
        throw std::invalid_argument("simgen: negative pair budget");
    const long budget =
        cfg.n_confounded_pairs + cfg.n_intermediate_pairs + cfg.n_direct_pairs;
    if (budget > static_cast<long>(p) * (p - 1) / 2)
        throw std::invalid_argument("simgen: pair budgets exceed the number of variable pairs");

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    // Random total order: position[i] is the rank of variable i.
    std::vector<int> perm(static_cast<std::size_t>(p));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> position(static_cast<std::size_t>(p));
    for (int r = 0; r < p; ++r) position[static_cast<std::size_t>(perm[static_cast<std::size_t>(r)])] = r;

    std::vector<std::pair<int, int>> all_pairs;
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) all_pairs.emplace_back(i, j);
    std::shuffle(all_pairs.begin(), all_pairs.end(), rng);

    auto oriented = [&](const std::pair<int, int>& pr) {
        return position[static_cast<std::size_t>(pr.first)] <
                       position[static_cast<std::size_t>(pr.second)]
                   ? pr
                   : std::make_pair(pr.second, pr.first);
    };

    const auto names = simgen_detail::variable_names(p);
    GroundTruth truth;
    truth.variables = names;

    struct Edge {
        int src;
        int dst;
        CausalFunction fn;
    };
    std::vector<Edge> edges;
    int node_count = p;  // latents get ids >= p
    std::size_t cursor = 0;

    for (int k = 0; k < cfg.n_confounded_pairs; ++k) {
        auto [a, b] = all_pairs[cursor++];
        const int u = node_count++;
        edges.push_back({u, a, draw_causal_fn(rng)});
        edges.push_back({u, b, draw_causal_fn(rng)});
        truth.confounded_pairs.insert(unordered_pair(names[static_cast<std::size_t>(a)],
                                                     names[static_cast<std::size_t>(b)]));
    }
    for (int k = 0; k < cfg.n_intermediate_pairs; ++k) {
        auto [a, b] = oriented(all_pairs[cursor++]);
        const int u = node_count++;
        edges.push_back({a, u, draw_causal_fn(rng)});
        edges.push_back({u, b, draw_causal_fn(rng)});
        truth.intermediate_pairs.insert(unordered_pair(names[static_cast<std::size_t>(a)],
                                                       names[static_cast<std::size_t>(b)]));
    }
    for (int k = 0; k < cfg.n_direct_pairs; ++k) {
        auto [a, b] = oriented(all_pairs[cursor++]);
        edges.push_back({a, b, draw_causal_fn(rng)});
        truth.parents[names[static_cast<std::size_t>(b)]].insert(names[static_cast<std::size_t>(a)]);
    }

    std::vector<std::pair<int, int>> plain_edges;
    plain_edges.reserve(edges.size());
    for (const auto& e : edges) plain_edges.emplace_back(e.src, e.dst);
    const auto topo = simgen_detail::topological_order(node_count, plain_edges);

    const Eigen::Index n = cfg.n_samples;
    Eigen::MatrixXd values = Eigen::MatrixXd::Zero(n, node_count);
    for (int node : topo) {
        auto col = values.col(node);
        for (Eigen::Index s = 0; s < n; ++s) col(s) = cfg.noise_scale * gauss(rng);
        for (const auto& e : edges) {
            if (e.dst != node) continue;
            const auto src = values.col(e.src);
            for (Eigen::Index s = 0; s < n; ++s) col(s) += causal_fn_eval(e.fn, src(s));
        }
    }

    return {Dataset(names, values.leftCols(p)), truth};
}

// ---------------------------------------------------------------------------
// Time-series instances
// ---------------------------------------------------------------------------

struct TsScmConfig {
    int n_observed = 3;
    int max_lag = 2;
    int n_confounded_pairs = 2;
    int n_intermediate_pairs = 2;
    int n_direct_pairs = 5;
    double noise_scale = 0.5;
    int burn_in = 200;
    int n_samples = 1000;
    unsigned long seed = 0;
};

/// Ground truth of a simulated series: stationary direct edges plus the latent
/// pair structure over (variable, lag) window nodes (lags normalized so the
/// later member sits at lag 0).
struct TsGroundTruth {
    std::vector<std::string> variables;
    int max_lag = 0;
    std::set<LagEdge> edges;
    std::set<std::array<LagNode, 2>> confounded_pairs;
    std::set<std::array<LagNode, 2>> intermediate_pairs;
};

/// Simulates the stationary recursion forward: every selected window pair is
/// realized by a fixed causal function applied at its lag offset; latent
/// confounders are white-noise series feeding both members, latent relays read
/// their source contemporaneously and feed the effect after the lag gap.
/// Contemporaneous effects are oriented by a sampled variable order, so the
/// per-step evaluation graph is acyclic by construction.
inline std::pair<Dataset, TsGroundTruth> gen_ts_instance(const TsScmConfig& cfg) {
    const int q = cfg.n_observed;
    const int r = cfg.max_lag;
    if (q < 1) throw std::invalid_argument("simgen ts: need at least 1 variable");
    if (r < 1) throw std::invalid_argument("simgen ts: max lag must be >= 1");
    if (cfg.burn_in < r) throw std::invalid_argument("simgen ts: burn-in must cover the max lag");
    if (cfg.n_samples < 4) throw std::invalid_argument("simgen ts: need at least 4 samples");
    if (cfg.noise_scale <= 0.0) throw std::invalid_argument("simgen ts: noise scale must be positive");
    const int window = q * (r + 1);
    const long budget = cfg.n_confounded_pairs + cfg.n_intermediate_pairs + cfg.n_direct_pairs;
    if (cfg.n_confounded_pairs < 0 || cfg.n_intermediate_pairs < 0 || cfg.n_direct_pairs < 0 ||
        budget > static_cast<long>(window) * (window - 1) / 2)
        throw std::invalid_argument("simgen ts: infeasible pair budgets");

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const auto names = simgen_detail::variable_names(q);

    struct WindowNode {
        int var;
        int lag;
    };
    struct DirectEdge {
        int cause_var;
        int delta;
        int effect_var;
        CausalFunction fn;
    };
    struct Relay {  // u(t) = fn_in(src(t)) + noise; dst(t) += fn_out(u(t - delta))
        int src_var;
        int dst_var;
        int delta;
        CausalFunction fn_in;
        CausalFunction fn_out;
    };
    struct Confounder {  // u(t) = noise; member_i(t) += fn_i(u(t - d_i))
        int var_a;
        int var_b;
        int delay_a;
        int delay_b;
        CausalFunction fn_a;
        CausalFunction fn_b;
    };

    std::vector<DirectEdge> direct;
    std::vector<Relay> relays;
    std::vector<Confounder> confounders;
    TsGroundTruth truth;
    truth.variables = names;
    truth.max_lag = r;

    std::vector<int> eval_order;
    const int max_retries = 50;
    bool ok = false;
    for (int attempt = 0; attempt < max_retries && !ok; ++attempt) {
        direct.clear();
        relays.clear();
        confounders.clear();
        truth.edges.clear();
        truth.confounded_pairs.clear();
        truth.intermediate_pairs.clear();

        std::vector<int> contempo(static_cast<std::size_t>(q));
        std::iota(contempo.begin(), contempo.end(), 0);
        std::shuffle(contempo.begin(), contempo.end(), rng);
        std::vector<int> rank(static_cast<std::size_t>(q));
        for (int i = 0; i < q; ++i)
            rank[static_cast<std::size_t>(contempo[static_cast<std::size_t>(i)])] = i;

        std::vector<std::pair<WindowNode, WindowNode>> pairs;
        for (int a = 0; a < window; ++a)
            for (int b = a + 1; b < window; ++b)
                pairs.push_back({{a % q, a / q}, {b % q, b / q}});
        std::shuffle(pairs.begin(), pairs.end(), rng);

        // Orientation honoring time priority: higher lag (earlier time) causes
        // lower lag; contemporaneous members follow the sampled order.
        auto orient = [&](std::pair<WindowNode, WindowNode> pr) {
            auto [a, b] = pr;
            const bool a_causes = a.lag != b.lag
                                      ? a.lag > b.lag
                                      : rank[static_cast<std::size_t>(a.var)] <
                                            rank[static_cast<std::size_t>(b.var)];
            return a_causes ? std::make_pair(a, b) : std::make_pair(b, a);
        };
        auto normalized_pair = [&](const WindowNode& a, const WindowNode& b) {
            const int m = std::min(a.lag, b.lag);
            return unordered_lag_pair({names[static_cast<std::size_t>(a.var)], a.lag - m},
                                      {names[static_cast<std::size_t>(b.var)], b.lag - m});
        };

        std::size_t cursor = 0;
        for (int k = 0; k < cfg.n_confounded_pairs; ++k) {
            auto [a, b] = pairs[cursor++];
            const int top = std::max(a.lag, b.lag);
            confounders.push_back({a.var, b.var, top - a.lag, top - b.lag, draw_causal_fn(rng),
                                   draw_causal_fn(rng)});
            truth.confounded_pairs.insert(normalized_pair(a, b));
        }
        for (int k = 0; k < cfg.n_intermediate_pairs; ++k) {
            auto [cause, effect] = orient(pairs[cursor++]);
            relays.push_back({cause.var, effect.var, cause.lag - effect.lag, draw_causal_fn(rng),
                              draw_causal_fn(rng)});
            truth.intermediate_pairs.insert(normalized_pair(cause, effect));
        }
        std::set<std::array<int, 3>> seen_triples;
        bool collision = false;
        for (int k = 0; k < cfg.n_direct_pairs; ++k) {
            auto [cause, effect] = orient(pairs[cursor++]);
            const int delta = cause.lag - effect.lag;
            if (!seen_triples.insert({cause.var, delta, effect.var}).second) {
                collision = true;  // two window pairs collapse to the same edge
                break;
            }
            direct.push_back({cause.var, delta, effect.var, draw_causal_fn(rng)});
            truth.edges.insert({names[static_cast<std::size_t>(cause.var)], delta,
                                names[static_cast<std::size_t>(effect.var)]});
        }
        if (collision) continue;

        // Per-step contemporaneous evaluation order over observed vars and relays.
        // Node ids: 0..q-1 observed, q+k relay k. Confounders are roots.
        std::vector<std::pair<int, int>> step_edges;
        for (const auto& e : direct)
            if (e.delta == 0) step_edges.emplace_back(e.cause_var, e.effect_var);
        for (std::size_t k = 0; k < relays.size(); ++k) {
            step_edges.emplace_back(relays[k].src_var, q + static_cast<int>(k));
            if (relays[k].delta == 0)
                step_edges.emplace_back(q + static_cast<int>(k), relays[k].dst_var);
        }
        try {
            eval_order = simgen_detail::topological_order(q + static_cast<int>(relays.size()),
                                                          step_edges);
            ok = true;
        } catch (const internal_error&) {
            ok = false;  // not expected given the orientation rule
        }
    }
    if (!ok) throw std::invalid_argument("simgen ts: could not realize an acyclic structure");

    // Forward simulation.
    const int total_steps = cfg.burn_in + cfg.n_samples;
    const int n_conf = static_cast<int>(confounders.size());
    Eigen::MatrixXd series = Eigen::MatrixXd::Zero(total_steps, q);
    Eigen::MatrixXd relay_series = Eigen::MatrixXd::Zero(total_steps, std::max<int>(1, static_cast<int>(relays.size())));
    Eigen::MatrixXd conf_series = Eigen::MatrixXd::Zero(total_steps, std::max<int>(1, n_conf));

    for (int t = 0; t < total_steps; ++t) {
        for (int k = 0; k < n_conf; ++k) conf_series(t, k) = cfg.noise_scale * gauss(rng);
        std::vector<double> noise(static_cast<std::size_t>(q + relays.size()));
        for (auto& v : noise) v = cfg.noise_scale * gauss(rng);

        if (t < r) {  // series start at pure noise until lags are available
            for (int v = 0; v < q; ++v) series(t, v) = noise[static_cast<std::size_t>(v)];
            for (std::size_t k = 0; k < relays.size(); ++k)
                relay_series(t, static_cast<Eigen::Index>(k)) = noise[static_cast<std::size_t>(q + k)];
            continue;
        }

        for (int node : eval_order) {
            if (node < q) {
                double v = noise[static_cast<std::size_t>(node)];
                for (const auto& e : direct)
                    if (e.effect_var == node)
                        v += causal_fn_eval(e.fn, series(t - e.delta, e.cause_var));
                for (std::size_t k = 0; k < relays.size(); ++k)
                    if (relays[k].dst_var == node)
                        v += causal_fn_eval(relays[k].fn_out,
                                            relay_series(t - relays[k].delta,
                                                         static_cast<Eigen::Index>(k)));
                for (int k = 0; k < n_conf; ++k) {
                    if (confounders[static_cast<std::size_t>(k)].var_a == node)
                        v += causal_fn_eval(confounders[static_cast<std::size_t>(k)].fn_a,
                                            conf_series(t - confounders[static_cast<std::size_t>(k)].delay_a, k));
                    if (confounders[static_cast<std::size_t>(k)].var_b == node)
                        v += causal_fn_eval(confounders[static_cast<std::size_t>(k)].fn_b,
                                            conf_series(t - confounders[static_cast<std::size_t>(k)].delay_b, k));
                }
                series(t, node) = v;
            } else {
                const std::size_t k = static_cast<std::size_t>(node - q);
                relay_series(t, static_cast<Eigen::Index>(k)) =
                    causal_fn_eval(relays[k].fn_in, series(t, relays[k].src_var)) +
                    noise[static_cast<std::size_t>(q + k)];
            }
        }
    }

    return {Dataset(names, series.bottomRows(cfg.n_samples)), truth};
}

// ---------------------------------------------------------------------------
// Config JSON (used by the CLI and run manifests)
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const ScmConfig& c) {
    return nlohmann::json{{"n_observed", c.n_observed},
                          {"n_confounded_pairs", c.n_confounded_pairs},
                          {"n_intermediate_pairs", c.n_intermediate_pairs},
                          {"n_direct_pairs", c.n_direct_pairs},
                          {"noise_scale", c.noise_scale},
                          {"n_samples", c.n_samples},
                          {"seed", c.seed}};
}

inline ScmConfig scm_config_from_json(const nlohmann::json& j) {
    ScmConfig c;
    c.n_observed = j.value("n_observed", c.n_observed);
    c.n_confounded_pairs = j.value("n_confounded_pairs", c.n_confounded_pairs);
    c.n_intermediate_pairs = j.value("n_intermediate_pairs", c.n_intermediate_pairs);
    c.n_direct_pairs = j.value("n_direct_pairs", c.n_direct_pairs);
    c.noise_scale = j.value("noise_scale", c.noise_scale);
    c.n_samples = j.value("n_samples", c.n_samples);
    c.seed = j.value("seed", c.seed);
    return c;
}

inline nlohmann::json to_json(const TsScmConfig& c) {
    return nlohmann::json{{"n_observed", c.n_observed},
                          {"max_lag", c.max_lag},
                          {"n_confounded_pairs", c.n_confounded_pairs},
                          {"n_intermediate_pairs", c.n_intermediate_pairs},
                          {"n_direct_pairs", c.n_direct_pairs},
                          {"noise_scale", c.noise_scale},
                          {"burn_in", c.burn_in},
                          {"n_samples", c.n_samples},
                          {"seed", c.seed}};
}

inline TsScmConfig ts_config_from_json(const nlohmann::json& j) {
    TsScmConfig c;
    c.n_observed = j.value("n_observed", c.n_observed);
    c.max_lag = j.value("max_lag", c.max_lag);
    c.n_confounded_pairs = j.value("n_confounded_pairs", c.n_confounded_pairs);
    c.n_intermediate_pairs = j.value("n_intermediate_pairs", c.n_intermediate_pairs);
    c.n_direct_pairs = j.value("n_direct_pairs", c.n_direct_pairs);
    c.noise_scale = j.value("noise_scale", c.noise_scale);
    c.burn_in = j.value("burn_in", c.burn_in);
    c.n_samples = j.value("n_samples", c.n_samples);
    c.seed = j.value("seed", c.seed);
    return c;
}

// ---------------------------------------------------------------------------
// JSON for the time-series ground truth
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const TsGroundTruth& t) {
    nlohmann::json j;
    j["variables"] = t.variables;
    j["max_lag"] = t.max_lag;
    j["edges"] = nlohmann::json::array();
    for (const auto& e : t.edges)
        j["edges"].push_back({{"cause", e.cause}, {"lag", e.lag}, {"effect", e.effect}});
    auto pair_array = [](const std::set<std::array<LagNode, 2>>& pairs) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& p : pairs)
            arr.push_back({{{"var", p[0].first}, {"lag", p[0].second}},
                           {{"var", p[1].first}, {"lag", p[1].second}}});
        return arr;
    };
    j["confounded"] = pair_array(t.confounded_pairs);
    j["intermediate"] = pair_array(t.intermediate_pairs);
    return j;
}

inline TsGroundTruth ts_truth_from_json(const nlohmann::json& j) {
    TsGroundTruth t;
    t.variables = j.at("variables").get<std::vector<std::string>>();
    t.max_lag = j.at("max_lag").get<int>();
    for (const auto& e : j.at("edges"))
        t.edges.insert({e.at("cause").get<std::string>(), e.at("lag").get<int>(),
                        e.at("effect").get<std::string>()});
    auto read_pairs = [](const nlohmann::json& arr, std::set<std::array<LagNode, 2>>& out) {
        for (const auto& p : arr)
            out.insert(unordered_lag_pair({p[0].at("var").get<std::string>(), p[0].at("lag").get<int>()},
                                          {p[1].at("var").get<std::string>(), p[1].at("lag").get<int>()}));
    };
    read_pairs(j.at("confounded"), t.confounded_pairs);
    read_pairs(j.at("intermediate"), t.intermediate_pairs);
    return t;
}

}  // namespace camuv

#endif
