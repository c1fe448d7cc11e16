#pragma once
#include <algorithm>
#include <vector>
#include <pclasso/dof.hpp>
#include <pclasso/solver/coordinate_descent.hpp>
#include <pclasso/solver/path_types.hpp>

namespace pclasso {

/**
 * Sequential strong rule: coordinates with
 * |x_j^T W r - theta (A beta)_j| >= 2 lambda - lambda_prev at the current
 * (previous-lambda) solution, plus every coordinate in `keep`.
 */
inline IndexList strong_rule_screen(const CoordinateDescent& cd, double lambda,
                                    double lambda_prev, const std::vector<bool>& keep)
{
    const double cut = 2.0 * lambda - lambda_prev;
    IndexList out;
    for (Index j = 0; j < cd.p(); ++j) {
        if (cd.is_excluded(j)) continue;
        if (keep[j] || cd.beta()(j) != 0.0 || std::abs(cd.smooth_gradient(j)) >= cut) {
            out.push_back(j);
        }
    }
    return out;
}

namespace detail {

/// Coordinates outside the working set whose zero value violates KKT.
inline IndexList kkt_violators(const CoordinateDescent& cd, double lambda,
                               const std::vector<bool>& in_working)
{
    IndexList out;
    for (Index j = 0; j < cd.p(); ++j) {
        if (in_working[j] || cd.is_excluded(j)) continue;
        if (std::abs(cd.smooth_gradient(j)) > lambda) out.push_back(j);
    }
    return out;
}

/**
 * Solve at one lambda with strong-rule screening and KKT closure: fit the
 * working set, then admit violators and refit until none remain.
 */
inline SolveStats solve_screened(CoordinateDescent& cd, double lambda, double lambda_prev,
                                 bool screen, std::vector<bool>& ever_active, double tol,
                                 Index max_sweeps, Index* screened_size)
{
    const Index p = cd.p();
    IndexList working;
    if (screen) {
        working = strong_rule_screen(cd, lambda, lambda_prev, ever_active);
    } else {
        for (Index j = 0; j < p; ++j) {
            if (!cd.is_excluded(j)) working.push_back(j);
        }
    }
    if (screened_size) *screened_size = static_cast<Index>(working.size());
    std::vector<bool> in_working(p, false);
    for (auto j : working) in_working[j] = true;

    SolveStats total;
    while (true) {
        auto st = cd.solve(lambda, working, tol, std::max<Index>(1, max_sweeps - total.sweeps));
        total.sweeps += st.sweeps;
        total.converged = st.converged;
        if (!screen || !st.converged) break;
        auto viol = kkt_violators(cd, lambda, in_working);
        if (viol.empty()) break;
        for (auto j : viol) {
            in_working[j] = true;
            working.push_back(j);
        }
        std::sort(working.begin(), working.end());
        if (total.sweeps >= max_sweeps) {
            total.converged = false;
            break;
        }
    }
    for (Index j = 0; j < p; ++j) {
        if (cd.beta()(j) != 0.0) ever_active[j] = true;
    }
    return total;
}

} // namespace detail

/// Gaussian pcLasso path on a prepared problem with a precomputed penalty.
inline PathFit fit_gaussian_path(const PreparedProblem& prep, const GroupLayout& layout,
                                 const GroupPenalty& penalty, const FitConfig& cfg)
{
    cfg.validate();
    if (prep.family != Family::gaussian) throw UsageError("fit_gaussian_path needs gaussian data");
    const auto th = resolve_theta(cfg, penalty);
    const auto grid = resolve_lambda_grid(prep, cfg);
    PathFit fit = detail::allocate_path(prep, layout, grid, th);
    fit.df_heuristic = penalty.n_groups() > 1;

    const Index p = prep.p();
    CoordinateDescent cd(prep.X, prep.w, prep.y, prep.intercept, penalty, layout, th.theta,
                         Vector::Zero(p), &prep.excluded);
    std::vector<bool> ever_active(p, false);
    Matrix gram;
    const bool df_gram = cfg.compute_df && p <= 2000;
    if (df_gram) gram = prep.X.transpose() * prep.w.asDiagonal() * prep.X;

    const double tol = cfg.tol * convergence_scale(prep);
    double lambda_prev = grid.front();
    for (Index l = 0; l < fit.n_lambda(); ++l) {
        const double lam = grid[l];
        auto st = detail::solve_screened(cd, lam, lambda_prev, cfg.use_strong_rules, ever_active,
                                         tol, cfg.max_iter, &fit.screened_sizes[l]);
        fit.n_sweeps[l] = st.sweeps;
        fit.converged[l] = st.converged;
        fit.objective[l] = cd.objective(lam);
        detail::record_solution(fit, l, prep, layout, cd.beta(), cd.intercept());
        if (cfg.compute_df) {
            fit.df_estimates(l) = df_gram
                ? df_estimate_from_gram(gram, penalty, th.theta, fit.active_sets[l]).df_hat
                : df_estimate(prep.X, penalty, th.theta, fit.active_sets[l], prep.w).df_hat;
        }
        lambda_prev = lam;
    }
    return fit;
}

} // namespace pclasso
