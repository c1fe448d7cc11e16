#pragma once
#include <algorithm>
#include <cmath>
#include <vector>
#include <pclasso/solver/coordinate_descent.hpp>
#include <pclasso/solver/gaussian.hpp>
#include <pclasso/solver/path_types.hpp>

namespace pclasso {

inline constexpr double prob_clamp = 1e-5;

/// log(1 + e^eta), overflow-safe.
inline double log1p_exp(double eta)
{
    return eta > 0.0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
}

/// Weighted binomial deviance 2 sum_i w_i [log(1 + e^eta_i) - y_i eta_i].
inline double binomial_deviance(const Vector& y, const Vector& eta, const Vector& w)
{
    double s = 0.0;
    for (Index i = 0; i < y.size(); ++i) s += w(i) * (log1p_exp(eta(i)) - y(i) * eta(i));
    return 2.0 * s;
}

/// Penalized negative log-likelihood in internal space.
inline double logistic_objective(const PreparedProblem& prep, const GroupPenalty& penalty,
                                 double theta, double lambda, const Vector& beta, double b0)
{
    Vector eta = prep.X * beta;
    eta.array() += b0;
    double val = 0.5 * binomial_deviance(prep.y, eta, prep.w) + lambda * beta.lpNorm<1>();
    if (theta > 0.0) val += 0.5 * theta * penalty.quadratic_form(beta);
    return val;
}

/**
 * Binomial pcLasso path by iteratively reweighted least squares. Each outer
 * step builds the quadratic approximation at the current fit (working
 * response z, weights w p (1 - p)) and solves it with the weighted
 * coordinate-descent engine, screened the same way as the gaussian path.
 * Steps that increase the penalized objective are halved.
 */
inline PathFit fit_logistic_path(const PreparedProblem& prep, const GroupLayout& layout,
                                 const GroupPenalty& penalty, const FitConfig& cfg)
{
    cfg.validate();
    if (prep.family != Family::binomial) throw UsageError("fit_logistic_path needs binomial data");
    const auto th = resolve_theta(cfg, penalty);
    const auto grid = resolve_lambda_grid(prep, cfg);
    PathFit fit = detail::allocate_path(prep, layout, grid, th);
    fit.irls_deviance.resize(grid.size());

    const Index n = prep.n(), p = prep.p();
    const double nd = static_cast<double>(n);
    Vector beta = Vector::Zero(p);
    double b0 = 0.0;
    if (prep.intercept) {
        const double ybar = std::clamp(prep.w.dot(prep.y) / nd, prob_clamp, 1.0 - prob_clamp);
        b0 = std::log(ybar / (1.0 - ybar));
    }
    std::vector<bool> ever_active(p, false);
    const double tol = cfg.tol * convergence_scale(prep);
    double lambda_prev = grid.front();

    for (Index l = 0; l < fit.n_lambda(); ++l) {
        const double lam = grid[l];
        Vector eta = prep.X * beta;
        eta.array() += b0;
        double dev = binomial_deviance(prep.y, eta, prep.w);
        double obj = logistic_objective(prep, penalty, th.theta, lam, beta, b0);
        auto& trace = fit.irls_deviance[l];
        trace.push_back(dev);
        Index sweeps = 0;
        bool converged = false;
        bool inner_ok = true;

        for (Index it = 0; it < cfg.irls_max_iter; ++it) {
            Vector omega(n), z(n);
            for (Index i = 0; i < n; ++i) {
                double pr = 1.0 / (1.0 + std::exp(-eta(i)));
                pr = std::clamp(pr, prob_clamp, 1.0 - prob_clamp);
                const double v = pr * (1.0 - pr);
                omega(i) = prep.w(i) * v;
                z(i) = eta(i) + (prep.y(i) - pr) / v;
            }
            if (!(omega.sum() > 0.0)) throw NumericalError("IRLS weights vanished");
            CoordinateDescent cd(prep.X, omega, z, prep.intercept, penalty, layout, th.theta,
                                 beta, &prep.excluded);
            Index screened = 0;
            auto st = detail::solve_screened(cd, lam, it == 0 ? lambda_prev : lam,
                                             cfg.use_strong_rules, ever_active, tol,
                                             std::max<Index>(1, cfg.max_iter - sweeps), &screened);
            if (it == 0) fit.screened_sizes[l] = screened;
            sweeps += st.sweeps;
            inner_ok = inner_ok && st.converged;

            Vector beta_new = cd.beta();
            double b0_new = prep.intercept ? cd.intercept() : 0.0;
            double obj_new = logistic_objective(prep, penalty, th.theta, lam, beta_new, b0_new);
            for (int h = 0; h < 30 && obj_new > obj + 1e-12 * std::abs(obj); ++h) {
                beta_new = 0.5 * (beta_new + beta);
                b0_new = 0.5 * (b0_new + b0);
                obj_new = logistic_objective(prep, penalty, th.theta, lam, beta_new, b0_new);
            }
            beta = beta_new;
            b0 = b0_new;
            obj = obj_new;
            eta = prep.X * beta;
            eta.array() += b0;
            const double dev_new = binomial_deviance(prep.y, eta, prep.w);
            trace.push_back(dev_new);
            const double rel = std::abs(dev_new - dev) / (std::abs(dev_new) + 0.1);
            dev = dev_new;
            if (rel < cfg.irls_tol) {
                converged = true;
                break;
            }
            if (sweeps >= cfg.max_iter) break;
        }
        for (Index j = 0; j < p; ++j) {
            if (beta(j) != 0.0) ever_active[j] = true;
        }
        fit.n_sweeps[l] = sweeps;
        fit.converged[l] = converged && inner_ok;
        fit.objective[l] = obj;
        detail::record_solution(fit, l, prep, layout, beta, b0);
        lambda_prev = lam;
    }
    return fit;
}

} // namespace pclasso
