#ifndef CAMUV_TSCAMUV_HPP
#define CAMUV_TSCAMUV_HPP

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "camuv/camuv.hpp"
#include "camuv/dataset.hpp"
#include "camuv/graph.hpp"

namespace camuv {

/// Bijection between (variable, lag) and embedded column names "<name>_lag<l>".
struct TimeEmbedding {
    std::vector<std::string> variables;  // original names, q of them
    int max_lag = 0;                     // r

    int q() const { return static_cast<int>(variables.size()); }

    std::string column_name(int var, int lag) const {
        return variables.at(static_cast<std::size_t>(var)) + "_lag" + std::to_string(lag);
    }

    /// Embedded column order: lag-0 block first, then lag 1, ..., lag r.
    std::vector<std::string> column_names() const {
        std::vector<std::string> out;
        out.reserve(static_cast<std::size_t>(q()) * (static_cast<std::size_t>(max_lag) + 1));
        for (int lag = 0; lag <= max_lag; ++lag)
            for (int v = 0; v < q(); ++v) out.push_back(column_name(v, lag));
        return out;
    }

    std::pair<int, int> parse(const std::string& column) const {
        for (int v = 0; v < q(); ++v)
            for (int lag = 0; lag <= max_lag; ++lag)
                if (column_name(v, lag) == column) return {v, lag};
        throw std::invalid_argument("time embedding: unknown column '" + column + "'");
    }
};

/// Window embedding: row s of the result holds, for variable i and lag l, the
/// original value at time s + r - l, so lag-0 columns are the latest states.
inline std::pair<Dataset, TimeEmbedding> embed(const Dataset& data, int max_lag) {
    if (max_lag < 1) throw std::invalid_argument("embed: max lag must be >= 1");
    const Eigen::Index n = data.rows();
    if (n <= max_lag) throw std::invalid_argument("embed: need more samples than the max lag");

    TimeEmbedding emb;
    emb.variables = data.names();
    emb.max_lag = max_lag;

    const int q = emb.q();
    const Eigen::Index rows = n - max_lag;
    Eigen::MatrixXd m(rows, static_cast<Eigen::Index>(q) * (max_lag + 1));
    Eigen::Index col = 0;
    for (int lag = 0; lag <= max_lag; ++lag)
        for (int v = 0; v < q; ++v, ++col)
            for (Eigen::Index s = 0; s < rows; ++s)
                m(s, col) = data.values()(s + max_lag - lag, v);
    return {Dataset(emb.column_names(), std::move(m)), emb};
}

/// Time priority: a column at lag l_c cannot cause a column at lag l_e when
/// l_c < l_e (the cause would be strictly later in time than the effect).
/// Yields q^2 * r(r+1)/2 forbidden ordered pairs.
inline PriorKnowledge build_time_prior(const TimeEmbedding& emb) {
    PriorKnowledge pk;
    for (int lc = 0; lc < emb.max_lag; ++lc)
        for (int le = lc + 1; le <= emb.max_lag; ++le)
            for (int i = 0; i < emb.q(); ++i)
                for (int j = 0; j < emb.q(); ++j)
                    pk.add(emb.column_name(i, lc), emb.column_name(j, le));
    return pk;
}

struct LagEdge {
    std::string cause;
    int lag = 0;
    std::string effect;

    auto tie() const { return std::tie(cause, lag, effect); }
    bool operator<(const LagEdge& o) const { return tie() < o.tie(); }
    bool operator==(const LagEdge& o) const { return tie() == o.tie(); }
};

using LagNode = std::pair<std::string, int>;  // (variable, lag)

inline std::array<LagNode, 2> unordered_lag_pair(const LagNode& a, const LagNode& b) {
    return a <= b ? std::array<LagNode, 2>{a, b} : std::array<LagNode, 2>{b, a};
}

/// Time-series output: stationary directed edges (cause, lag, effect) plus
/// dashed lag pairs with at least one lag-0 endpoint.
struct LagGraph {
    std::vector<std::string> variables;
    int max_lag = 0;
    std::set<LagEdge> edges;
    std::set<std::array<LagNode, 2>> dashed;

    bool operator==(const LagGraph& o) const {
        return variables == o.variables && max_lag == o.max_lag && edges == o.edges &&
               dashed == o.dashed;
    }
};

/// Keeps exactly the window edges whose child sits at lag 0 (edges between two
/// lagged copies are shifted duplicates under stationarity and are dropped,
/// reported through `notes`); dashed pairs survive when one endpoint is lag 0.
inline LagGraph collapse_to_lag_graph(const CausalGraph& window_graph, const TimeEmbedding& emb,
                                      std::vector<std::string>* notes = nullptr) {
    LagGraph g;
    g.variables = emb.variables;
    g.max_lag = emb.max_lag;
    for (const auto& e : window_graph.directed_edges()) {
        auto [cv, cl] = emb.parse(e[0]);
        auto [ev, el] = emb.parse(e[1]);
        if (el == 0) {
            g.edges.insert({emb.variables[static_cast<std::size_t>(cv)], cl,
                            emb.variables[static_cast<std::size_t>(ev)]});
        } else if (notes) {
            notes->push_back("dropped lagged-copy edge " + e[0] + " -> " + e[1]);
        }
    }
    for (const auto& p : window_graph.dashed) {
        auto [av, al] = emb.parse(p[0]);
        auto [bv, bl] = emb.parse(p[1]);
        if (al == 0 || bl == 0) {
            g.dashed.insert(unordered_lag_pair({emb.variables[static_cast<std::size_t>(av)], al},
                                               {emb.variables[static_cast<std::size_t>(bv)], bl}));
        } else if (notes) {
            notes->push_back("dropped lagged-copy dashed pair {" + p[0] + "," + p[1] + "}");
        }
    }

    // Contemporaneous cycles are passed through but flagged.
    if (notes) {
        std::map<std::string, std::set<std::string>> adj;
        for (const auto& e : g.edges)
            if (e.lag == 0) adj[e.cause].insert(e.effect);
        std::set<std::string> done, stack;
        std::function<bool(const std::string&)> cyclic = [&](const std::string& v) {
            if (stack.count(v)) return true;
            if (done.count(v)) return false;
            stack.insert(v);
            for (const auto& w : adj[v])
                if (cyclic(w)) return true;
            stack.erase(v);
            done.insert(v);
            return false;
        };
        for (const auto& [v, _] : adj)
            if (cyclic(v)) {
                notes->push_back("contemporaneous edges contain a cycle");
                break;
            }
    }
    return g;
}

struct TsDiscoveryResult {
    LagGraph graph;
    std::vector<std::string> notes;
};

/// Time-series discovery: embeds the series, adds the time-priority prior (united with any
/// extra prior expressed over embedded column names), runs discovery on the
/// window data, and collapses the window graph to a lag graph.
inline TsDiscoveryResult discover_ts(const Dataset& data, int max_lag, double alpha, int d,
                                     const PriorKnowledge& extra_prior = {},
                                     DiscoveryCache* cache = nullptr) {
    auto [embedded, emb] = embed(data, max_lag);
    DiscoveryConfig cfg;
    cfg.alpha = alpha;
    cfg.max_subset_size = d;
    cfg.prior = build_time_prior(emb);
    for (const auto& p : extra_prior.forbidden) {
        if (!embedded.has_column(p[0]) || !embedded.has_column(p[1]))
            throw std::invalid_argument("discover_ts: extra prior references unknown embedded column");
        cfg.prior.forbidden.insert(p);
    }
    CausalGraph window_graph = discover(embedded, cfg, cache);
    TsDiscoveryResult result;
    result.graph = collapse_to_lag_graph(window_graph, emb, &result.notes);
    return result;
}

// ---------------------------------------------------------------------------
// JSON + DOT
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const LagGraph& g) {
    nlohmann::json j;
    j["variables"] = g.variables;
    j["max_lag"] = g.max_lag;
    j["edges"] = nlohmann::json::array();
    for (const auto& e : g.edges)
        j["edges"].push_back({{"cause", e.cause}, {"lag", e.lag}, {"effect", e.effect}});
    j["dashed"] = nlohmann::json::array();
    for (const auto& p : g.dashed)
        j["dashed"].push_back({{{"var", p[0].first}, {"lag", p[0].second}},
                               {{"var", p[1].first}, {"lag", p[1].second}}});
    return j;
}

inline LagGraph lag_graph_from_json(const nlohmann::json& j) {
    LagGraph g;
    g.variables = j.at("variables").get<std::vector<std::string>>();
    g.max_lag = j.at("max_lag").get<int>();
    for (const auto& e : j.at("edges"))
        g.edges.insert({e.at("cause").get<std::string>(), e.at("lag").get<int>(),
                        e.at("effect").get<std::string>()});
    for (const auto& p : j.at("dashed")) {
        if (!p.is_array() || p.size() != 2) throw std::invalid_argument("lag graph json: bad dashed pair");
        g.dashed.insert(unordered_lag_pair(
            {p[0].at("var").get<std::string>(), p[0].at("lag").get<int>()},
            {p[1].at("var").get<std::string>(), p[1].at("lag").get<int>()}));
    }
    return g;
}

/// Unrolled DOT rendering: one node per (variable, lag), labeled X(t), X(t-1), ...
inline std::string to_dot(const LagGraph& g) {
    auto node_id = [](const std::string& v, int lag) {
        return "\"" + v + "(t" + (lag > 0 ? "-" + std::to_string(lag) : "") + ")\"";
    };
    std::set<LagNode> nodes;
    for (const auto& v : g.variables) nodes.insert({v, 0});
    for (const auto& e : g.edges) nodes.insert({e.cause, e.lag});
    for (const auto& p : g.dashed) {
        nodes.insert(p[0]);
        nodes.insert(p[1]);
    }
    std::string out = "digraph lag_graph {\n  rankdir=LR;\n";
    for (const auto& [v, lag] : nodes) out += "  " + node_id(v, lag) + ";\n";
    for (const auto& e : g.edges)
        out += "  " + node_id(e.cause, e.lag) + " -> " + node_id(e.effect, 0) + ";\n";
    for (const auto& p : g.dashed)
        out += "  " + node_id(p[0].first, p[0].second) + " -> " + node_id(p[1].first, p[1].second) +
               " [dir=none, style=dashed];\n";
    out += "}\n";
    return out;
}

}  // namespace camuv

#endif
