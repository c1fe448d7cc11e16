#pragma once
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>
#include <pclasso/core.hpp>
#include <pclasso/data.hpp>
#include <pclasso/layout.hpp>
#include <pclasso/penalty.hpp>

namespace pclasso {

struct FitConfig
{
    std::optional<double> theta;
    std::optional<double> rat;
    std::vector<double> lambda_grid;          // empty: generate from n_lambda
    Index n_lambda = 100;
    std::optional<double> lambda_min_ratio;   // default 1e-2 if p > n else 1e-4
    double tol = 1e-7;
    Index max_iter = 100000;
    bool standardize = true;
    bool intercept = true;
    bool use_strong_rules = true;
    bool sqrt_pk_scaling = false;
    std::optional<Index> max_rank;
    bool compute_df = true;
    Index irls_max_iter = 25;
    double irls_tol = 1e-8;

    void validate() const
    {
        if (theta && rat) throw UsageError("give either theta or rat, not both");
        if (theta && !(*theta >= 0.0 && std::isfinite(*theta))) {
            throw UsageError("theta must be finite and non-negative");
        }
        if (rat && !(*rat > 0.0 && *rat <= 1.0)) throw UsageError("rat must lie in (0, 1]");
        if (!(tol > 0.0)) throw UsageError("tol must be positive");
        if (max_iter < 1) throw UsageError("max_iter must be at least 1");
        if (lambda_grid.empty() && n_lambda < 1) throw UsageError("n_lambda must be at least 1");
        if (lambda_min_ratio && !(*lambda_min_ratio > 0.0 && *lambda_min_ratio < 1.0)) {
            throw UsageError("lambda_min_ratio must lie in (0, 1)");
        }
        for (size_t i = 0; i < lambda_grid.size(); ++i) {
            if (!(lambda_grid[i] >= 0.0) || !std::isfinite(lambda_grid[i])) {
                throw UsageError("lambda values must be finite and non-negative");
            }
            if (i > 0 && !(lambda_grid[i] < lambda_grid[i - 1])) {
                throw UsageError("lambda grid must be strictly decreasing");
            }
        }
        if (max_rank && *max_rank < 1) throw UsageError("max_rank must be at least 1");
        if (irls_max_iter < 1 || !(irls_tol > 0.0)) throw UsageError("invalid IRLS settings");
    }
};

/// Coefficient path. Public coefficients are on the original column scale
/// and space; internal_* hold the standardized expanded solution.
struct PathFit
{
    Family family = Family::gaussian;
    Matrix betas;                 // p_original x L
    Matrix expanded_betas;        // p_expanded x L, original scale
    Vector intercepts;            // L
    std::vector<double> lambda_grid;
    double theta = 0.0;
    std::optional<double> rat;
    bool theta_indistinguishable = false;
    Vector df_estimates;          // NaN when not computed
    bool df_heuristic = false;
    std::vector<IndexList> active_sets;   // expanded indices, exact nonzeros
    std::vector<Index> n_sweeps;
    std::vector<bool> converged;
    std::vector<Index> screened_sizes;    // initial working-set size per lambda
    std::vector<double> objective;        // internal-space penalized objective
    std::vector<std::vector<double>> irls_deviance;   // binomial: deviance per outer iteration
    Matrix internal_betas;
    Vector internal_intercepts;

    Index n_lambda() const { return static_cast<Index>(lambda_grid.size()); }

    bool all_converged() const
    {
        for (bool c : converged) {
            if (!c) return false;
        }
        return true;
    }

    /// Linear predictor on original-scale data for path point l.
    Vector predict(const Matrix& X, Index l) const
    {
        if (X.cols() != betas.rows()) throw DataError("prediction data has the wrong column count");
        Vector eta = X * betas.col(l);
        eta.array() += intercepts(l);
        return eta;
    }
};

/**
 * Smallest lambda with an all-zero solution: max_j |sum_i w_i x_ij r0_i|,
 * with r0 the null-model residual (centered y, or y - ybar for binomial).
 */
inline double lambda_max(const PreparedProblem& prep)
{
    Vector r0;
    if (prep.family == Family::gaussian) {
        r0 = prep.y;
    } else {
        const double nd = static_cast<double>(prep.n());
        const double pbar = prep.intercept ? prep.w.dot(prep.y) / nd : 0.5;
        r0 = prep.y.array() - pbar;
    }
    const Vector wr = prep.w.cwiseProduct(r0);
    double lmax = 0.0;
    bool any_column = false;
    for (Index j = 0; j < prep.p(); ++j) {
        if (prep.excluded[j]) continue;
        any_column = true;
        lmax = std::max(lmax, std::abs(prep.X.col(j).dot(wr)));
    }
    if (!any_column) throw DataError("design has no non-constant column");
    return lmax;
}

/**
 * Scale of the convergence test: sqrt(sum_i w_i (y_i - ybar)^2) with ybar
 * the weighted mean (0 without intercept). The coordinate-change bound is
 * tol times this, so tol is free of the response's units.
 */
inline double convergence_scale(const PreparedProblem& prep)
{
    const double nd = static_cast<double>(prep.n());
    const double ybar = prep.intercept ? prep.w.dot(prep.y) / nd : 0.0;
    const double ss = prep.w.dot((prep.y.array() - ybar).square().matrix());
    return ss > 0.0 ? std::sqrt(ss) : 1.0;
}

inline double default_lambda_min_ratio(Index n, Index p) { return p > n ? 1e-2 : 1e-4; }

/// n_lambda log-spaced values from lmax down to ratio * lmax.
inline std::vector<double> make_lambda_grid(double lmax, Index n_lambda, double ratio)
{
    if (!(lmax > 0.0)) {
        throw DataError("lambda_max is zero: the response is orthogonal to every column");
    }
    std::vector<double> grid(n_lambda);
    if (n_lambda == 1) {
        grid[0] = lmax;
        return grid;
    }
    const double step = std::log(ratio) / static_cast<double>(n_lambda - 1);
    for (Index i = 0; i < n_lambda; ++i) grid[i] = lmax * std::exp(step * static_cast<double>(i));
    grid[0] = lmax;
    return grid;
}

inline std::vector<double> resolve_lambda_grid(const PreparedProblem& prep, const FitConfig& cfg)
{
    if (!cfg.lambda_grid.empty()) return cfg.lambda_grid;
    const double ratio = cfg.lambda_min_ratio.value_or(default_lambda_min_ratio(prep.n(), prep.p()));
    return make_lambda_grid(lambda_max(prep), cfg.n_lambda, ratio);
}

struct ResolvedTheta
{
    double theta = 0.0;
    std::optional<double> rat;
    bool indistinguishable = false;
};

/// theta from the config: explicit theta, else rat (default 1) via the spectrum.
inline ResolvedTheta resolve_theta(const FitConfig& cfg, const GroupPenalty& penalty)
{
    ResolvedTheta out;
    if (cfg.theta) {
        out.theta = *cfg.theta;
        return out;
    }
    out.rat = cfg.rat.value_or(1.0);
    auto r = rat_to_theta(*out.rat, penalty.d1_sq, penalty.d2_sq);
    out.theta = r.theta;
    out.indistinguishable = r.indistinguishable;
    return out;
}

/// Penalty for a prepared problem, honoring the config's rank and scaling options.
inline GroupPenalty build_penalty_for(const PreparedProblem& prep, const GroupLayout& layout,
                                      const FitConfig& cfg)
{
    return build_group_penalty(prep.X, layout, cfg.max_rank, cfg.sqrt_pk_scaling);
}

namespace detail {

inline PathFit allocate_path(const PreparedProblem& prep, const GroupLayout& layout,
                             const std::vector<double>& grid, const ResolvedTheta& th)
{
    PathFit fit;
    const Index L = static_cast<Index>(grid.size());
    fit.family = prep.family;
    fit.lambda_grid = grid;
    fit.theta = th.theta;
    fit.rat = th.rat;
    fit.theta_indistinguishable = th.indistinguishable;
    fit.betas = Matrix::Zero(layout.n_original(), L);
    fit.expanded_betas = Matrix::Zero(prep.p(), L);
    fit.internal_betas = Matrix::Zero(prep.p(), L);
    fit.intercepts = Vector::Zero(L);
    fit.internal_intercepts = Vector::Zero(L);
    fit.df_estimates = Vector::Constant(L, std::numeric_limits<double>::quiet_NaN());
    fit.active_sets.resize(L);
    fit.n_sweeps.assign(L, 0);
    fit.converged.assign(L, false);
    fit.screened_sizes.assign(L, 0);
    fit.objective.assign(L, 0.0);
    return fit;
}

/// Store an internal solution at path point l, mapping back to original columns.
inline void record_solution(PathFit& fit, Index l, const PreparedProblem& prep,
                            const GroupLayout& layout, const Vector& beta_internal,
                            double intercept_internal)
{
    fit.internal_betas.col(l) = beta_internal;
    fit.internal_intercepts(l) = intercept_internal;
    Vector b = beta_internal.cwiseQuotient(prep.x_scale);
    fit.expanded_betas.col(l) = b;
    fit.betas.col(l) = layout.collapse(b);
    fit.intercepts(l) = prep.y_mean + intercept_internal - prep.x_mean.dot(b);
    IndexList act;
    for (Index j = 0; j < beta_internal.size(); ++j) {
        if (beta_internal(j) != 0.0) act.push_back(j);
    }
    fit.active_sets[l] = std::move(act);
}

} // namespace detail
} // namespace pclasso
