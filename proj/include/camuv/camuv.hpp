#ifndef CAMUV_CAMUV_HPP
#define CAMUV_CAMUV_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "camuv/dataset.hpp"
#include "camuv/errors.hpp"
#include "camuv/gam.hpp"
#include "camuv/graph.hpp"
#include "camuv/kernel_stats.hpp"

namespace camuv {

struct DiscoveryConfig {
    double alpha = 0.01;       // significance level for the independence tests
    int max_subset_size = 2;   // d: largest candidate subset examined per step
    PriorKnowledge prior;
    bool use_cache = true;     // memoization is pure performance; off for verification
};

/// Phase-1 working state: candidate parent sets in insertion order.
struct CandidateState {
    std::vector<std::vector<int>> candidates;  // M_i, insertion-ordered, no duplicates
    int t = 2;
    bool changed = false;
};

/// Memoizes residuals and p-values keyed on (target, regressor set). Safe to
/// share across discovery runs on the same dataset (keys are data-determined);
/// not safe to reuse across datasets.
class DiscoveryCache {
public:
    using ResidualKey = std::pair<int, std::vector<int>>;  // target, sorted regressors
    using PValueKey = std::pair<ResidualKey, std::vector<ResidualKey>>;

    std::shared_ptr<const Eigen::VectorXd> find_residual(const ResidualKey& k) const {
        auto it = residuals_.find(k);
        return it == residuals_.end() ? nullptr : it->second;
    }
    void store_residual(const ResidualKey& k, std::shared_ptr<const Eigen::VectorXd> v) {
        residuals_.emplace(k, std::move(v));
    }
    const double* find_pvalue(const PValueKey& k) const {
        auto it = pvalues_.find(k);
        return it == pvalues_.end() ? nullptr : &it->second;
    }
    void store_pvalue(const PValueKey& k, double p) { pvalues_.emplace(k, p); }
    void clear() {
        residuals_.clear();
        pvalues_.clear();
    }

private:
    std::map<ResidualKey, std::shared_ptr<const Eigen::VectorXd>> residuals_;
    std::map<PValueKey, double> pvalues_;
};

namespace detail {

class DiscoveryEngine {
public:
    DiscoveryEngine(const Dataset& data, const DiscoveryConfig& cfg, DiscoveryCache* cache)
        : data_(data), cfg_(cfg), cache_(cache) {
        p_ = static_cast<int>(data.cols());
        forbidden_.assign(static_cast<std::size_t>(p_) * static_cast<std::size_t>(p_), false);
        for (const auto& pair : cfg.prior.forbidden) {
            const int c = data.column_index(pair[0]);
            const int e = data.column_index(pair[1]);
            forbidden_[static_cast<std::size_t>(c) * static_cast<std::size_t>(p_) +
                       static_cast<std::size_t>(e)] = true;
        }
    }

    bool forbidden(int cause, int effect) const {
        return forbidden_[static_cast<std::size_t>(cause) * static_cast<std::size_t>(p_) +
                          static_cast<std::size_t>(effect)];
    }

    std::shared_ptr<const Eigen::VectorXd> residual_of(int target, std::vector<int> regressors) {
        std::sort(regressors.begin(), regressors.end());
        DiscoveryCache::ResidualKey key{target, regressors};
        if (cache_ && cfg_.use_cache)
            if (auto hit = cache_->find_residual(key)) return hit;
        std::vector<std::string> names;
        std::vector<Eigen::VectorXd> cols;
        names.reserve(regressors.size());
        for (int r : regressors) {
            names.push_back(data_.name(r));
            cols.push_back(data_.column(r));
        }
        GamFit fit = fit_gam(data_.column(target), names, cols);
        auto res = std::make_shared<const Eigen::VectorXd>(
            residual(fit, data_.column(target), cols));
        if (cache_ && cfg_.use_cache) cache_->store_residual(key, res);
        return res;
    }

    /// p-HSIC of (target regressed on `regressors`) against the set of
    /// residuals {other regressed on its current candidate set}.
    double set_pvalue(int target, const std::vector<int>& regressors,
                      const std::vector<int>& others,
                      const std::vector<std::vector<int>>& candidate_sets) {
        DiscoveryCache::ResidualKey akey{target, sorted(regressors)};
        std::vector<DiscoveryCache::ResidualKey> bkeys;
        bkeys.reserve(others.size());
        for (int j : others) bkeys.emplace_back(j, sorted(candidate_sets[static_cast<std::size_t>(j)]));
        DiscoveryCache::PValueKey key{akey, bkeys};
        if (cache_ && cfg_.use_cache)
            if (const double* hit = cache_->find_pvalue(key)) return *hit;
        auto a = residual_of(target, regressors);
        std::vector<Eigen::VectorXd> b;
        b.reserve(others.size());
        for (const auto& bk : bkeys) b.push_back(*residual_of(bk.first, bk.second));
        const double pv = p_hsic_set(*a, b);
        if (cache_ && cfg_.use_cache) cache_->store_pvalue(key, pv);
        return pv;
    }

    double pair_pvalue(int a, const std::vector<int>& a_regressors, int b,
                       const std::vector<int>& b_regressors,
                       const std::vector<std::vector<int>>& candidate_sets) {
        // Expressed as a single-element set test; keys stay uniform.
        std::vector<std::vector<int>> sets = candidate_sets;
        sets[static_cast<std::size_t>(b)] = b_regressors;
        return set_pvalue(a, a_regressors, {b}, sets);
    }

    int variable_count() const { return p_; }
    const Dataset& data() const { return data_; }
    const DiscoveryConfig& config() const { return cfg_; }

private:
    static std::vector<int> sorted(std::vector<int> v) {
        std::sort(v.begin(), v.end());
        return v;
    }

    const Dataset& data_;
    const DiscoveryConfig& cfg_;
    DiscoveryCache* cache_;
    int p_ = 0;
    std::vector<bool> forbidden_;
};

/// Lexicographic enumeration of all size-t subsets of {0..p-1}.
template <typename Fn>
void for_each_subset(int p, int t, Fn&& fn) {
    std::vector<int> idx(static_cast<std::size_t>(t));
    for (int i = 0; i < t; ++i) idx[static_cast<std::size_t>(i)] = i;
    while (true) {
        fn(idx);
        int i = t - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == p - t + i) --i;
        if (i < 0) break;
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < t; ++j)
            idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
}

inline bool contains(const std::vector<int>& v, int x) {
    return std::find(v.begin(), v.end(), x) != v.end();
}

inline std::vector<int> set_union(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out = a;
    for (int x : b)
        if (!contains(out, x)) out.push_back(x);
    return out;
}

}  // namespace detail

/// PHASE 1: extracts parent candidates. For every subset K of size t the most
/// endogenous member X_b (largest set p-HSIC between its enlarged-regression
/// residual and the other members' residuals) is selected, skipping members
/// that prior knowledge forbids some other member of K to cause; K\{X_b} is
/// accepted into M_b when the enlarged residual tests independent (e > alpha)
/// while some pairwise residual dependence remains (h < alpha). Any strict
/// growth rewinds t to 2, otherwise t advances.
inline CandidateState phase1_candidates(const Dataset& data, const DiscoveryConfig& cfg,
                                        DiscoveryCache* cache = nullptr) {
    detail::DiscoveryEngine eng(data, cfg, cache);
    const int p = eng.variable_count();
    CandidateState state;
    state.candidates.assign(static_cast<std::size_t>(p), {});
    state.t = 2;

    long resets = 0;
    const long reset_budget = 10L * p * (1L << cfg.max_subset_size);

    while (state.t <= cfg.max_subset_size) {
        bool sweep_changed = false;
        detail::for_each_subset(p, state.t, [&](const std::vector<int>& subset) {
            double max_independence = 0.0;
            int max_variable = -1;
            for (int xi : subset) {
                bool blocked = false;
                for (int xj : subset) {
                    if (xj == xi) continue;
                    if (eng.forbidden(xj, xi)) {
                        blocked = true;
                        break;
                    }
                }
                if (blocked) continue;
                std::vector<int> others;
                for (int xj : subset)
                    if (xj != xi) others.push_back(xj);
                auto regressors = detail::set_union(
                    state.candidates[static_cast<std::size_t>(xi)], others);
                const double indep = eng.set_pvalue(xi, regressors, others, state.candidates);
                if (max_independence < indep) {
                    max_independence = indep;
                    max_variable = xi;
                }
            }
            if (max_variable < 0) return;  // every member skipped or all p-values zero

            const int b = max_variable;
            std::vector<int> others;
            for (int xj : subset)
                if (xj != b) others.push_back(xj);
            const double e = max_independence;
            double h = 0.0;
            for (int xj : others) {
                const double pv = eng.pair_pvalue(
                    b, state.candidates[static_cast<std::size_t>(b)], xj,
                    state.candidates[static_cast<std::size_t>(xj)], state.candidates);
                h = std::max(h, pv);
            }
            if (cfg.alpha < e && cfg.alpha > h) {
                bool grew = false;
                for (int xj : others) {
                    if (!detail::contains(state.candidates[static_cast<std::size_t>(b)], xj)) {
                        state.candidates[static_cast<std::size_t>(b)].push_back(xj);
                        grew = true;
                    }
                }
                if (grew) {
                    sweep_changed = true;
                    state.changed = true;
                }
            }
        });
        if (sweep_changed) {
            state.t = 2;
            if (++resets > reset_budget)
                throw internal_error("phase1: iteration watchdog exceeded");
        } else {
            ++state.t;
        }
    }
    return state;
}

/// PHASE 2: prunes each candidate set. Iterates over a snapshot of M_i in
/// insertion order and removes X_j whenever the residual of X_i regressed on
/// the current M_i minus X_j is independent of X_j's residual.
inline std::vector<std::vector<int>> phase2_prune(const Dataset& data, const CandidateState& state,
                                                  const DiscoveryConfig& cfg,
                                                  DiscoveryCache* cache = nullptr) {
    detail::DiscoveryEngine eng(data, cfg, cache);
    std::vector<std::vector<int>> parents = state.candidates;
    const int p = eng.variable_count();
    for (int i = 0; i < p; ++i) {
        const std::vector<int> snapshot = parents[static_cast<std::size_t>(i)];
        for (int j : snapshot) {
            std::vector<int> without;
            for (int k : parents[static_cast<std::size_t>(i)])
                if (k != j) without.push_back(k);
            const double pv = eng.pair_pvalue(i, without, j,
                                              parents[static_cast<std::size_t>(j)], parents);
            if (pv > cfg.alpha) parents[static_cast<std::size_t>(i)] = without;
        }
    }
    return parents;
}

/// Second step: every pair with no directed edge in either direction gets a
/// dashed edge when the residuals on the final parent sets stay dependent,
/// the signature of a hidden common cause or hidden intermediate.
inline std::set<std::array<std::string, 2>> find_dashed_edges(
    const Dataset& data, const std::vector<std::vector<int>>& parents, const DiscoveryConfig& cfg,
    DiscoveryCache* cache = nullptr) {
    detail::DiscoveryEngine eng(data, cfg, cache);
    const int p = eng.variable_count();
    std::set<std::array<std::string, 2>> dashed;
    for (int i = 0; i < p; ++i) {
        for (int j = i + 1; j < p; ++j) {
            if (detail::contains(parents[static_cast<std::size_t>(i)], j) ||
                detail::contains(parents[static_cast<std::size_t>(j)], i))
                continue;
            const double pv = eng.pair_pvalue(i, parents[static_cast<std::size_t>(i)], j,
                                              parents[static_cast<std::size_t>(j)], parents);
            if (pv <= cfg.alpha) dashed.insert(unordered_pair(data.name(i), data.name(j)));
        }
    }
    return dashed;
}

/// Full discovery: phase 1, phase 2, then dashed-edge determination.
/// The output always satisfies validate_graph and never contains a directed
/// edge that the prior knowledge forbids.
inline CausalGraph discover(const Dataset& data, const DiscoveryConfig& cfg,
                            DiscoveryCache* cache = nullptr) {
    if (data.cols() < 2) throw std::invalid_argument("discover: need at least 2 variables");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
        throw std::invalid_argument("discover: alpha must be in (0,1)");
    if (cfg.max_subset_size < 2 || cfg.max_subset_size > data.cols())
        throw std::invalid_argument("discover: subset size must be in [2, p]");
    cfg.prior.validate_against(data);

    CandidateState state = phase1_candidates(data, cfg, cache);
    auto parents = phase2_prune(data, state, cfg, cache);
    auto dashed = find_dashed_edges(data, parents, cfg, cache);

    CausalGraph g;
    g.variables = data.names();
    for (int i = 0; i < static_cast<int>(data.cols()); ++i) {
        for (int j : parents[static_cast<std::size_t>(i)])
            g.parents[data.name(i)].insert(data.name(j));
    }
    g.dashed = std::move(dashed);

    for (const auto& pair : cfg.prior.forbidden)
        if (g.has_directed_edge(pair[0], pair[1]))
            throw internal_error("discover: prior knowledge violated by output");
    auto violations = validate_graph(g);
    if (!violations.empty())
        throw internal_error("discover: invalid output graph: " + violations.front());
    return g;
}

}  // namespace camuv

#endif
