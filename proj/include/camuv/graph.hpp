#ifndef CAMUV_GRAPH_HPP
#define CAMUV_GRAPH_HPP

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "camuv/dataset.hpp"

namespace camuv {

/// Canonical unordered pair: components sorted lexicographically.
inline std::array<std::string, 2> unordered_pair(const std::string& a, const std::string& b) {
    return a <= b ? std::array<std::string, 2>{a, b} : std::array<std::string, 2>{b, a};
}

/// Forbidden-cause list: (a, b) means "a cannot be a direct or indirect cause of b".
struct PriorKnowledge {
    std::set<std::array<std::string, 2>> forbidden;  // ordered (cause, effect) pairs

    bool empty() const { return forbidden.empty(); }

    void add(const std::string& cause, const std::string& effect) {
        if (cause == effect)
            throw std::invalid_argument("prior knowledge: cause equals effect '" + cause + "'");
        forbidden.insert({cause, effect});
    }

    bool contains(const std::string& cause, const std::string& effect) const {
        return forbidden.count({cause, effect}) > 0;
    }

    /// Throws if some identifier does not resolve against the dataset columns.
    void validate_against(const Dataset& d) const {
        for (const auto& p : forbidden) {
            if (!d.has_column(p[0]))
                throw std::invalid_argument("prior knowledge: unknown variable '" + p[0] + "'");
            if (!d.has_column(p[1]))
                throw std::invalid_argument("prior knowledge: unknown variable '" + p[1] + "'");
        }
    }
};

/// True iff (cause, effect) is forbidden. Identifiers must resolve against the dataset.
inline bool is_forbidden(const PriorKnowledge& pk, const Dataset& d, const std::string& cause,
                         const std::string& effect) {
    if (!d.has_column(cause)) throw std::invalid_argument("is_forbidden: unknown variable '" + cause + "'");
    if (!d.has_column(effect)) throw std::invalid_argument("is_forbidden: unknown variable '" + effect + "'");
    return pk.contains(cause, effect);
}

/// Discovery output: directed edges (parent sets) plus unordered dashed pairs.
struct CausalGraph {
    std::vector<std::string> variables;
    std::map<std::string, std::set<std::string>> parents;  // child -> its parents
    std::set<std::array<std::string, 2>> dashed;           // canonical unordered pairs

    std::set<std::string> parent_set(const std::string& v) const {
        auto it = parents.find(v);
        return it == parents.end() ? std::set<std::string>{} : it->second;
    }

    bool has_directed_edge(const std::string& parent, const std::string& child) const {
        auto it = parents.find(child);
        return it != parents.end() && it->second.count(parent) > 0;
    }

    std::vector<std::array<std::string, 2>> directed_edges() const {
        std::vector<std::array<std::string, 2>> out;
        for (const auto& [child, ps] : parents)
            for (const auto& p : ps) out.push_back({p, child});
        std::sort(out.begin(), out.end());
        return out;
    }

    bool operator==(const CausalGraph& o) const {
        return variables == o.variables && parents == o.parents && dashed == o.dashed;
    }
};

/// Checks all CausalGraph invariants; returns every violation found (empty = ok).
inline std::vector<std::string> validate_graph(const CausalGraph& g) {
    std::vector<std::string> violations;
    std::set<std::string> universe(g.variables.begin(), g.variables.end());
    if (universe.size() != g.variables.size()) violations.push_back("duplicate variable names");

    for (const auto& [child, ps] : g.parents) {
        if (!universe.count(child)) violations.push_back("unknown child '" + child + "'");
        for (const auto& p : ps) {
            if (!universe.count(p)) violations.push_back("unknown parent '" + p + "'");
            if (p == child) violations.push_back("self-parent '" + child + "'");
        }
    }
    for (const auto& pr : g.dashed) {
        if (pr[0] == pr[1]) violations.push_back("dashed self-pair '" + pr[0] + "'");
        if (pr[0] > pr[1]) violations.push_back("dashed pair not canonical (" + pr[0] + "," + pr[1] + ")");
        for (const auto& v : pr)
            if (!universe.count(v)) violations.push_back("unknown dashed variable '" + v + "'");
        if (g.has_directed_edge(pr[0], pr[1]) || g.has_directed_edge(pr[1], pr[0]))
            violations.push_back("edge/dashed overlap (" + pr[0] + "," + pr[1] + ")");
    }
    return violations;
}

/// Ground truth of a simulated instance: observed direct causes plus the latent
/// pair structure (confounded = shared hidden cause, intermediate = hidden relay).
struct GroundTruth {
    std::vector<std::string> variables;
    std::map<std::string, std::set<std::string>> parents;
    std::set<std::array<std::string, 2>> confounded_pairs;
    std::set<std::array<std::string, 2>> intermediate_pairs;

    std::vector<std::array<std::string, 2>> directed_edges() const {
        std::vector<std::array<std::string, 2>> out;
        for (const auto& [child, ps] : parents)
            for (const auto& p : ps) out.push_back({p, child});
        std::sort(out.begin(), out.end());
        return out;
    }
};

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const CausalGraph& g) {
    nlohmann::json j;
    j["variables"] = g.variables;
    j["directed"] = nlohmann::json::array();
    for (const auto& e : g.directed_edges()) j["directed"].push_back({e[0], e[1]});
    j["dashed"] = nlohmann::json::array();
    for (const auto& p : g.dashed) j["dashed"].push_back({p[0], p[1]});
    return j;
}

inline CausalGraph graph_from_json(const nlohmann::json& j) {
    CausalGraph g;
    g.variables = j.at("variables").get<std::vector<std::string>>();
    for (const auto& e : j.at("directed")) {
        if (!e.is_array() || e.size() != 2) throw std::invalid_argument("graph json: bad directed edge");
        g.parents[e[1].get<std::string>()].insert(e[0].get<std::string>());
    }
    for (const auto& p : j.at("dashed")) {
        if (!p.is_array() || p.size() != 2) throw std::invalid_argument("graph json: bad dashed pair");
        g.dashed.insert(unordered_pair(p[0].get<std::string>(), p[1].get<std::string>()));
    }
    auto violations = validate_graph(g);
    if (!violations.empty())
        throw std::invalid_argument("graph json: invalid graph: " + violations.front());
    return g;
}

inline nlohmann::json to_json(const PriorKnowledge& pk) {
    nlohmann::json j;
    j["forbidden"] = nlohmann::json::array();
    for (const auto& p : pk.forbidden) j["forbidden"].push_back({p[0], p[1]});
    return j;
}

inline PriorKnowledge prior_from_json(const nlohmann::json& j) {
    PriorKnowledge pk;
    for (const auto& p : j.at("forbidden")) {
        if (!p.is_array() || p.size() != 2) throw std::invalid_argument("prior json: bad pair");
        pk.add(p[0].get<std::string>(), p[1].get<std::string>());
    }
    return pk;
}

inline nlohmann::json to_json(const GroundTruth& t) {
    nlohmann::json j;
    j["variables"] = t.variables;
    j["directed"] = nlohmann::json::array();
    for (const auto& e : t.directed_edges()) j["directed"].push_back({e[0], e[1]});
    j["confounded"] = nlohmann::json::array();
    for (const auto& p : t.confounded_pairs) j["confounded"].push_back({p[0], p[1]});
    j["intermediate"] = nlohmann::json::array();
    for (const auto& p : t.intermediate_pairs) j["intermediate"].push_back({p[0], p[1]});
    return j;
}

inline GroundTruth truth_from_json(const nlohmann::json& j) {
    GroundTruth t;
    t.variables = j.at("variables").get<std::vector<std::string>>();
    for (const auto& e : j.at("directed"))
        t.parents[e[1].get<std::string>()].insert(e[0].get<std::string>());
    for (const auto& p : j.at("confounded"))
        t.confounded_pairs.insert(unordered_pair(p[0].get<std::string>(), p[1].get<std::string>()));
    for (const auto& p : j.at("intermediate"))
        t.intermediate_pairs.insert(unordered_pair(p[0].get<std::string>(), p[1].get<std::string>()));
    return t;
}

// ---------------------------------------------------------------------------
// DOT export: solid arrows for directed edges, dashed undirected lines for
// latent-linked pairs.
// ---------------------------------------------------------------------------

inline std::string to_dot(const CausalGraph& g) {
    std::string out = "digraph causal {\n";
    for (const auto& v : g.variables) out += "  \"" + v + "\";\n";
    for (const auto& e : g.directed_edges()) out += "  \"" + e[0] + "\" -> \"" + e[1] + "\";\n";
    for (const auto& p : g.dashed)
        out += "  \"" + p[0] + "\" -> \"" + p[1] + "\" [dir=none, style=dashed];\n";
    out += "}\n";
    return out;
}

}  // namespace camuv

#endif
