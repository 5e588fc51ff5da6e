#ifndef CAMUV_EVAL_HPP
#define CAMUV_EVAL_HPP

#include <array>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "camuv/graph.hpp"
#include "camuv/simgen.hpp"
#include "camuv/tscamuv.hpp"

namespace camuv {

struct Score {
    long tp = 0;
    long fp = 0;
    long fn = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f_measure = 0.0;
};

namespace detail {

inline Score score_from_counts(long tp, long fp, long fn) {
    Score s;
    s.tp = tp;
    s.fp = fp;
    s.fn = fn;
    s.precision = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    s.recall = (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    s.f_measure = (s.precision + s.recall) > 0.0
                      ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
                      : 0.0;
    return s;
}

template <typename Edge>
Score score_edge_sets(const std::set<Edge>& truth, const std::set<Edge>& est) {
    long tp = 0;
    for (const auto& e : est)
        if (truth.count(e)) ++tp;
    return score_from_counts(tp, static_cast<long>(est.size()) - tp,
                             static_cast<long>(truth.size()) - tp);
}

}  // namespace detail

/// Directed-edge score: an estimate counts as a true positive only when both the
/// position and the direction match. Edges whose ordered (parent, child) pair is
/// in `excluded` are ignored on both the truth and the estimate side.
inline Score score_directed(const GroundTruth& truth, const CausalGraph& est,
                            const std::set<std::array<std::string, 2>>& excluded = {}) {
    std::set<std::string> universe(truth.variables.begin(), truth.variables.end());
    for (const auto& v : est.variables)
        if (!universe.count(v))
            throw std::invalid_argument("score_directed: unknown variable '" + v + "'");

    std::set<std::array<std::string, 2>> t, e;
    for (const auto& edge : truth.directed_edges())
        if (!excluded.count(edge)) t.insert(edge);
    for (const auto& edge : est.directed_edges())
        if (!excluded.count(edge)) e.insert(edge);
    return detail::score_edge_sets(t, e);
}

/// Lag-graph score with exact (cause, lag, effect) triple matching.
inline Score score_lag_graph(const LagGraph& truth, const LagGraph& est) {
    std::set<LagEdge> t(truth.edges.begin(), truth.edges.end());
    std::set<LagEdge> e(est.edges.begin(), est.edges.end());
    return detail::score_edge_sets(t, e);
}

inline Score score_lag_graph(const TsGroundTruth& truth, const LagGraph& est) {
    std::set<LagEdge> e(est.edges.begin(), est.edges.end());
    return detail::score_edge_sets(truth.edges, e);
}

/// Diagnostic only: dashed pairs scored against confounded + intermediate pairs.
inline Score score_dashed(const GroundTruth& truth, const CausalGraph& est) {
    std::set<std::array<std::string, 2>> t;
    for (const auto& p : truth.confounded_pairs) t.insert(p);
    for (const auto& p : truth.intermediate_pairs) t.insert(p);
    return detail::score_edge_sets(t, est.dashed);
}

inline nlohmann::json to_json(const Score& s) {
    return nlohmann::json{{"tp", s.tp},
                          {"fp", s.fp},
                          {"fn", s.fn},
                          {"precision", s.precision},
                          {"recall", s.recall},
                          {"f_measure", s.f_measure}};
}

}  // namespace camuv

#endif
