#ifndef CAMUV_GAM_HPP
#define CAMUV_GAM_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "camuv/dataset.hpp"

namespace camuv {

namespace gam_detail {

inline constexpr int kSplineOrder = 4;  // cubic

// Smoother capacity and penalty, overridable at compile time for tuning runs.
#ifndef CAMUV_GAM_MAX_BASIS
#define CAMUV_GAM_MAX_BASIS 96
#endif
#ifndef CAMUV_GAM_RIDGE_LAMBDA
#define CAMUV_GAM_RIDGE_LAMBDA 0.1
#endif
inline constexpr int kMaxBasis = CAMUV_GAM_MAX_BASIS;
inline constexpr int kMinBasis = 10;
inline constexpr double kRidgeLambda = CAMUV_GAM_RIDGE_LAMBDA;
inline constexpr double kBackfitTol = 1e-6;
inline constexpr int kMaxBackfitSweeps = 100;

inline int basis_count(Eigen::Index n) {
    return static_cast<int>(std::min<Eigen::Index>(kMaxBasis, std::max<Eigen::Index>(kMinBasis, n / 8)));
}

/// Open uniform knot vector for `nb` cubic basis functions on [lo, hi]:
/// boundary knots repeated kSplineOrder times, interior knots equally spaced.
inline std::vector<double> uniform_knots(double lo, double hi, int nb) {
    const int interior = nb - kSplineOrder;
    std::vector<double> t;
    t.reserve(static_cast<std::size_t>(nb + kSplineOrder));
    for (int i = 0; i < kSplineOrder; ++i) t.push_back(lo);
    for (int i = 1; i <= interior; ++i)
        t.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(interior + 1));
    for (int i = 0; i < kSplineOrder; ++i) t.push_back(hi);
    return t;
}

/// Cox–de Boor evaluation of all nonzero cubic B-splines at u (clamped to the
/// knot span). Fills row `row` of the design matrix.
inline void eval_basis_row(const std::vector<double>& t, int nb, double u,
                           Eigen::MatrixXd& design, Eigen::Index row) {
    const int k = kSplineOrder;
    const double lo = t.front();
    const double hi = t.back();
    u = std::clamp(u, lo, hi);

    // Find the knot interval i with t[i] <= u < t[i+1]; the last interval is closed.
    int i = k - 1;
    int last = nb - 1;  // index of the last basis function's interval start
    if (u >= hi) {
        i = last;
        while (i > 0 && t[static_cast<std::size_t>(i)] == t[static_cast<std::size_t>(i) + 1]) --i;
    } else {
        while (i < last && u >= t[static_cast<std::size_t>(i) + 1]) ++i;
    }

    double nvals[kSplineOrder];
    nvals[0] = 1.0;
    double left[kSplineOrder], right[kSplineOrder];
    for (int j = 1; j < k; ++j) {
        left[j] = u - t[static_cast<std::size_t>(i + 1 - j)];
        right[j] = t[static_cast<std::size_t>(i + j)] - u;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double denom = right[r + 1] + left[j - r];
            const double temp = denom > 0.0 ? nvals[r] / denom : 0.0;
            nvals[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        nvals[j] = saved;
    }
    for (int j = 0; j < k; ++j) {
        const int col = i - k + 1 + j;
        if (col >= 0 && col < nb) design(row, col) = nvals[j];
    }
}

inline Eigen::MatrixXd design_matrix(const Eigen::VectorXd& u, const std::vector<double>& knots, int nb) {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(u.size(), nb);
    for (Eigen::Index i = 0; i < u.size(); ++i) eval_basis_row(knots, nb, u(i), b, i);
    return b;
}

/// Second-difference penalty D2' * D2 for a coefficient vector of length nb.
inline Eigen::MatrixXd second_difference_penalty(int nb) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(nb - 2, nb);
    for (int i = 0; i < nb - 2; ++i) {
        d(i, i) = 1.0;
        d(i, i + 1) = -2.0;
        d(i, i + 2) = 1.0;
    }
    return d.transpose() * d;
}

}  // namespace gam_detail

/// One additive term: a penalized cubic B-spline smoother of a standardized
/// predictor. Inputs outside the training range are clamped before evaluation.
struct GamTerm {
    std::string predictor;
    double x_mean = 0.0;
    double x_scale = 1.0;          // 0 marks a constant predictor (term is zero)
    double u_min = 0.0, u_max = 0.0;
    std::vector<double> knots;     // on the standardized scale
    Eigen::VectorXd coefficients;  // on the standardized-response scale
    double offset = 0.0;           // training mean of the raw spline values

    /// Term contribution on the standardized-response scale.
    double evaluate(double x_raw) const {
        if (x_scale == 0.0) return 0.0;
        const double u = std::clamp((x_raw - x_mean) / x_scale, u_min, u_max);
        Eigen::MatrixXd row = Eigen::MatrixXd::Zero(1, coefficients.size());
        gam_detail::eval_basis_row(knots, static_cast<int>(coefficients.size()), u, row, 0);
        return row.row(0).dot(coefficients) - offset;
    }

    Eigen::VectorXd evaluate(const Eigen::VectorXd& x_raw) const {
        Eigen::VectorXd out(x_raw.size());
        if (x_scale == 0.0) return Eigen::VectorXd::Zero(x_raw.size());
        Eigen::VectorXd u = ((x_raw.array() - x_mean) / x_scale)
                                .cwiseMax(u_min).cwiseMin(u_max).matrix();
        Eigen::MatrixXd b = gam_detail::design_matrix(u, knots, static_cast<int>(coefficients.size()));
        return (b * coefficients).array() - offset;
    }
};

/// Backfitted additive model y ~ intercept + sum_m g_m(x_m).
/// With no predictors the prediction is the training mean of y.
struct GamFit {
    double intercept = 0.0;  // training mean of y
    double y_scale = 1.0;
    std::vector<GamTerm> terms;
    std::vector<std::string> warnings;

    std::vector<std::string> predictor_ids() const {
        std::vector<std::string> out;
        out.reserve(terms.size());
        for (const auto& t : terms) out.push_back(t.predictor);
        return out;
    }

    Eigen::VectorXd predict(const std::vector<Eigen::VectorXd>& predictor_columns,
                            Eigen::Index n) const {
        if (predictor_columns.size() != terms.size())
            throw std::invalid_argument("gam predict: column count mismatch");
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
        for (std::size_t m = 0; m < terms.size(); ++m) acc += terms[m].evaluate(predictor_columns[m]);
        return (acc.array() * y_scale + intercept).matrix();
    }

    Eigen::VectorXd predict(const Dataset& data) const {
        std::vector<Eigen::VectorXd> cols;
        cols.reserve(terms.size());
        for (const auto& t : terms) cols.push_back(data.column(t.predictor));
        return predict(cols, data.rows());
    }
};

/// Fits y on the given predictor columns by backfitting penalized cubic
/// B-spline smoothers (uniform knots on the standardized training range,
/// fixed second-difference ridge). Deterministic: predictors are processed
/// in the order given, sweeps stop when the largest coefficient change
/// drops below tolerance.
inline GamFit fit_gam(const Eigen::VectorXd& y, const std::vector<std::string>& predictor_names,
                      const std::vector<Eigen::VectorXd>& predictors) {
    using namespace gam_detail;
    if (predictor_names.size() != predictors.size())
        throw std::invalid_argument("fit_gam: name/column count mismatch");
    const Eigen::Index n = y.size();
    if (n < 4) throw std::invalid_argument("fit_gam: need at least 4 samples");
    if (!y.allFinite()) throw std::invalid_argument("fit_gam: non-finite response");
    for (const auto& c : predictors) {
        if (c.size() != n) throw std::invalid_argument("fit_gam: column length mismatch");
        if (!c.allFinite()) throw std::invalid_argument("fit_gam: non-finite predictor");
    }

    GamFit fit;
    fit.intercept = y.mean();
    const double y_sd = std::sqrt((y.array() - fit.intercept).square().mean());
    fit.y_scale = y_sd > 0.0 ? y_sd : 1.0;
    if (predictors.empty()) return fit;

    if (n < static_cast<Eigen::Index>(10 * (1 + predictors.size())))
        fit.warnings.push_back("sample size below 10*(1+predictors); fit may be unstable");

    const int nb = basis_count(n);
    const Eigen::VectorXd z = (y.array() - fit.intercept) / fit.y_scale;

    // Per-term design matrices on standardized predictors.
    std::vector<Eigen::MatrixXd> designs;
    std::vector<Eigen::LDLT<Eigen::MatrixXd>> solvers;
    double lambda = kRidgeLambda;
    const Eigen::Index total_coefs = static_cast<Eigen::Index>(nb) * static_cast<Eigen::Index>(predictors.size());
    if (n < total_coefs) {
        lambda *= 10.0;
        fit.warnings.push_back("fewer samples than basis coefficients; penalty increased");
    }

    for (std::size_t m = 0; m < predictors.size(); ++m) {
        GamTerm term;
        term.predictor = predictor_names[m];
        term.x_mean = predictors[m].mean();
        term.x_scale = std::sqrt((predictors[m].array() - term.x_mean).square().mean());
        if (term.x_scale == 0.0) {
            term.coefficients = Eigen::VectorXd::Zero(nb);
            term.knots = uniform_knots(0.0, 1.0, nb);
            fit.terms.push_back(std::move(term));
            designs.emplace_back(Eigen::MatrixXd::Zero(n, nb));
            solvers.emplace_back();
            continue;
        }
        Eigen::VectorXd u = (predictors[m].array() - term.x_mean) / term.x_scale;
        term.u_min = u.minCoeff();
        term.u_max = u.maxCoeff();
        term.knots = uniform_knots(term.u_min, term.u_max, nb);
        term.coefficients = Eigen::VectorXd::Zero(nb);
        Eigen::MatrixXd b = design_matrix(u, term.knots, nb);
        Eigen::MatrixXd normal = b.transpose() * b + lambda * second_difference_penalty(nb);
        normal.diagonal().array() += 1e-10 * static_cast<double>(n);
        solvers.emplace_back(normal.ldlt());
        designs.push_back(std::move(b));
        fit.terms.push_back(std::move(term));
    }

    std::vector<Eigen::VectorXd> contributions(fit.terms.size(), Eigen::VectorXd::Zero(n));
    for (int sweep = 0; sweep < kMaxBackfitSweeps; ++sweep) {
        double max_change = 0.0;
        for (std::size_t m = 0; m < fit.terms.size(); ++m) {
            if (fit.terms[m].x_scale == 0.0) continue;
            Eigen::VectorXd partial = z;
            for (std::size_t k2 = 0; k2 < fit.terms.size(); ++k2)
                if (k2 != m) partial -= contributions[k2];
            Eigen::VectorXd coef = solvers[m].solve(designs[m].transpose() * partial);
            max_change = std::max(max_change, (coef - fit.terms[m].coefficients).cwiseAbs().maxCoeff());
            fit.terms[m].coefficients = coef;
            Eigen::VectorXd raw = designs[m] * coef;
            fit.terms[m].offset = raw.mean();
            contributions[m] = raw.array() - fit.terms[m].offset;
        }
        if (max_change < kBackfitTol) break;
    }
    return fit;
}

inline GamFit fit_gam(const Dataset& data, const std::string& target,
                      const std::vector<std::string>& predictor_names) {
    std::vector<Eigen::VectorXd> cols;
    cols.reserve(predictor_names.size());
    for (const auto& p : predictor_names) cols.push_back(data.column(p));
    return fit_gam(data.column(target), predictor_names, cols);
}

/// y minus the fitted prediction; predictor values outside the training range
/// are clamped before basis evaluation.
inline Eigen::VectorXd residual(const GamFit& fit, const Eigen::VectorXd& y,
                                const std::vector<Eigen::VectorXd>& predictor_columns) {
    return y - fit.predict(predictor_columns, y.size());
}

inline Eigen::VectorXd residual(const GamFit& fit, const Dataset& data, const std::string& target) {
    return data.column(target) - fit.predict(data);
}

}  // namespace camuv

#endif
