#ifndef CAMUV_KERNEL_STATS_HPP
#define CAMUV_KERNEL_STATS_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/gamma.hpp>

namespace camuv {

/// Result of an HSIC independence test between two samples of equal length n.
struct HsicResult {
    double statistic = 0.0;    // (1/n^2) * trace(Kc * Lc), always >= 0
    double p_value = 1.0;
    double bandwidth_x = 0.0;
    double bandwidth_y = 0.0;
    long n = 0;
    bool degenerate = false;   // set when the null moments could not be estimated
};

namespace detail {

inline void check_sample(const Eigen::MatrixXd& x, const char* what) {
    if (x.rows() < 4) throw std::invalid_argument(std::string(what) + ": need at least 4 samples");
    if (!x.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite entry");
}

/// Squared Euclidean distance matrix between rows.
inline Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& x) {
    const Eigen::Index n = x.rows();
    Eigen::VectorXd sq = x.rowwise().squaredNorm();
    Eigen::MatrixXd d2 = sq.replicate(1, n) + sq.transpose().replicate(n, 1);
    d2.noalias() -= 2.0 * x * x.transpose();
    return d2.cwiseMax(0.0);
}

/// Doubly centers a symmetric matrix in place: K <- H K H with H = I - (1/n) 11'.
inline void center_in_place(Eigen::MatrixXd& k) {
    const double n = static_cast<double>(k.rows());
    Eigen::VectorXd row_means = k.rowwise().mean();
    const double total_mean = row_means.mean();
    k.colwise() -= row_means;
    k.rowwise() -= row_means.transpose();
    k.array() += total_mean;
}

inline Eigen::VectorXd standardize(const Eigen::VectorXd& v) {
    const double mean = v.mean();
    const double sd = std::sqrt((v.array() - mean).square().mean());
    if (sd <= 0.0) return Eigen::VectorXd::Zero(v.size());
    return (v.array() - mean) / sd;
}

inline bool is_constant(const Eigen::VectorXd& v) {
    return v.maxCoeff() - v.minCoeff() == 0.0;
}

}  // namespace detail

/// Median of pairwise Euclidean distances between distinct rows (zero distances
/// from duplicate rows are skipped, so the result is strictly positive).
inline double median_heuristic_bandwidth(const Eigen::MatrixXd& x) {
    if (x.rows() < 2) throw std::invalid_argument("median bandwidth: need at least 2 rows");
    const Eigen::Index n = x.rows();
    std::vector<double> dist;
    dist.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d2 = (x.row(i) - x.row(j)).squaredNorm();
            if (d2 > 0.0) dist.push_back(std::sqrt(d2));
        }
    if (dist.empty()) throw std::invalid_argument("median bandwidth: degenerate sample");
    const std::size_t m = dist.size();
    auto mid = dist.begin() + static_cast<std::ptrdiff_t>(m / 2);
    std::nth_element(dist.begin(), mid, dist.end());
    if (m % 2 == 1) return *mid;
    const double hi = *mid;
    const double lo = *std::max_element(dist.begin(), mid);
    return 0.5 * (lo + hi);
}

/// RBF Gram matrix K_ij = exp(-|x_i - x_j|^2 / (2 bw^2)).
inline Eigen::MatrixXd rbf_gram(const Eigen::MatrixXd& x, double bandwidth) {
    if (!(bandwidth > 0.0)) throw std::invalid_argument("rbf gram: bandwidth must be positive");
    Eigen::MatrixXd k = detail::squared_distances(x);
    k = (-k / (2.0 * bandwidth * bandwidth)).array().exp();
    return k;
}

/// Doubly centered RBF Gram matrix H K H.
inline Eigen::MatrixXd centered_gram(const Eigen::MatrixXd& x, double bandwidth) {
    Eigen::MatrixXd k = rbf_gram(x, bandwidth);
    detail::center_in_place(k);
    return k;
}

/// Biased HSIC statistic (1/n^2) sum_ij Kc_ij Lc_ij. Symmetric in its arguments.
inline double hsic_statistic(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    detail::check_sample(x, "hsic");
    detail::check_sample(y, "hsic");
    if (x.rows() != y.rows()) throw std::invalid_argument("hsic: sample sizes differ");
    const double n = static_cast<double>(x.rows());
    Eigen::MatrixXd kc = centered_gram(x, median_heuristic_bandwidth(x));
    Eigen::MatrixXd lc = centered_gram(y, median_heuristic_bandwidth(y));
    return (kc.array() * lc.array()).sum() / (n * n);
}

namespace detail {

struct GammaNull {
    double mean = 0.0;   // E[n * HSIC_b] under the null
    double var = 0.0;    // Var[n * HSIC_b] under the null (before the n scaling)
    bool valid = false;
};

/// Two-moment fit of the null distribution of n*HSIC_b (Gretton et al. style):
/// mean from the off-diagonal Gram means, variance from the centered Grams.
inline double gamma_pvalue_from_grams(const Eigen::MatrixXd& k, const Eigen::MatrixXd& l,
                                      const Eigen::MatrixXd& kc, const Eigen::MatrixXd& lc,
                                      double stat_n, bool* degenerate) {
    const double n = static_cast<double>(k.rows());
    const double mu_x = (k.sum() - k.trace()) / (n * (n - 1.0));
    const double mu_y = (l.sum() - l.trace()) / (n * (n - 1.0));
    const double mean = (1.0 + mu_x * mu_y - mu_x - mu_y) / n;

    Eigen::ArrayXXd prod = (kc.array() * lc.array() / 6.0).square();
    const double off_diag = prod.sum() - prod.matrix().trace();
    double var = off_diag / (n * (n - 1.0));
    var *= 72.0 * (n - 4.0) * (n - 5.0) / (n * (n - 1.0) * (n - 2.0) * (n - 3.0));

    if (!(mean > 0.0) || !(var > 0.0)) {
        *degenerate = true;
        return 1.0;
    }
    const double shape = mean * mean / var;
    const double scale = var * n / mean;
    if (!(stat_n > 0.0)) return 1.0;
    boost::math::gamma_distribution<double> dist(shape, scale);
    return boost::math::cdf(boost::math::complement(dist, stat_n));
}

}  // namespace detail

/// Gamma-approximation p-value for independence of x and y. Deterministic.
/// A numerically non-positive estimated mean or variance of the null yields
/// p = 1 with the degenerate flag set.
inline HsicResult hsic_pvalue_gamma(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    detail::check_sample(x, "hsic");
    detail::check_sample(y, "hsic");
    if (x.rows() != y.rows()) throw std::invalid_argument("hsic: sample sizes differ");
    HsicResult r;
    r.n = x.rows();
    r.bandwidth_x = median_heuristic_bandwidth(x);
    r.bandwidth_y = median_heuristic_bandwidth(y);
    Eigen::MatrixXd k = rbf_gram(x, r.bandwidth_x);
    Eigen::MatrixXd l = rbf_gram(y, r.bandwidth_y);
    Eigen::MatrixXd kc = k;
    Eigen::MatrixXd lc = l;
    detail::center_in_place(kc);
    detail::center_in_place(lc);
    const double n = static_cast<double>(r.n);
    r.statistic = (kc.array() * lc.array()).sum() / (n * n);
    r.p_value = detail::gamma_pvalue_from_grams(k, l, kc, lc, n * r.statistic, &r.degenerate);
    return r;
}

/// Permutation p-value: p = (1 + #{permuted stat >= observed}) / (1 + permutations).
/// Grams and bandwidths are computed once; permutations reindex the y Gram.
inline HsicResult hsic_pvalue_permutation(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                          int num_permutations, unsigned long seed) {
    if (num_permutations < 100)
        throw std::invalid_argument("hsic permutation: need at least 100 permutations");
    detail::check_sample(x, "hsic");
    detail::check_sample(y, "hsic");
    if (x.rows() != y.rows()) throw std::invalid_argument("hsic: sample sizes differ");

    HsicResult r;
    r.n = x.rows();
    r.bandwidth_x = median_heuristic_bandwidth(x);
    r.bandwidth_y = median_heuristic_bandwidth(y);
    const Eigen::Index n = x.rows();
    Eigen::MatrixXd kc = centered_gram(x, r.bandwidth_x);
    Eigen::MatrixXd lc = centered_gram(y, r.bandwidth_y);
    const double nn = static_cast<double>(n) * static_cast<double>(n);
    r.statistic = (kc.array() * lc.array()).sum() / nn;

    std::mt19937_64 rng(seed);
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    long exceed = 0;
    for (int b = 0; b < num_permutations; ++b) {
        std::shuffle(perm.begin(), perm.end(), rng);
        double acc = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double* krow = kc.data() + i * n;      // column i == row i (symmetric)
            const Eigen::Index pi = perm[static_cast<std::size_t>(i)];
            for (Eigen::Index j = 0; j < n; ++j)
                acc += krow[j] * lc(pi, perm[static_cast<std::size_t>(j)]);
        }
        if (acc / nn >= r.statistic) ++exceed;
    }
    r.p_value = static_cast<double>(1 + exceed) / static_cast<double>(1 + num_permutations);
    return r;
}

/// p-HSIC between a residual and a set of residuals: the set members are
/// z-scored and stacked into one multivariate sample with a joint RBF kernel.
/// Constant vectors carry no dependence and test as independent (p = 1).
inline double p_hsic_set(const Eigen::VectorXd& a, const std::vector<Eigen::VectorXd>& b) {
    if (b.empty()) throw std::invalid_argument("p_hsic_set: empty set");
    const Eigen::Index n = a.size();
    for (const auto& col : b)
        if (col.size() != n) throw std::invalid_argument("p_hsic_set: length mismatch");

    if (detail::is_constant(a)) return 1.0;
    Eigen::MatrixXd stacked(n, static_cast<Eigen::Index>(b.size()));
    bool any_signal = false;
    for (std::size_t j = 0; j < b.size(); ++j) {
        Eigen::VectorXd z = detail::standardize(b[j]);
        if (!detail::is_constant(z)) any_signal = true;
        stacked.col(static_cast<Eigen::Index>(j)) = z;
    }
    if (!any_signal) return 1.0;
    return hsic_pvalue_gamma(a, stacked).p_value;
}

}  // namespace camuv

#endif
