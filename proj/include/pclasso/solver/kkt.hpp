#pragma once
#include <algorithm>
#include <cmath>
#include <pclasso/data.hpp>
#include <pclasso/penalty.hpp>
#include <pclasso/solver/path_types.hpp>

namespace pclasso {

/// Worst subgradient residuals of one solution.
struct KktReport
{
    double max_active_violation = 0.0;    // |-g_j + theta (A b)_j + lambda sign b_j|, b_j != 0
    double max_inactive_excess = 0.0;     // max(|-g_j + theta (A b)_j| - lambda, 0), b_j = 0

    double worst() const { return std::max(max_active_violation, max_inactive_excess); }
};

/**
 * Subgradient check in the internal (standardized, expanded) space, with
 * g_j = sum_i w_i x_ij (y_i - mu_i) the negative loss gradient and mu the
 * fitted mean (linear for gaussian, logistic for binomial).
 */
inline KktReport kkt_check(const PreparedProblem& prep, const GroupPenalty& penalty, double theta,
                           double lambda, const Vector& beta, double intercept)
{
    Vector eta = prep.X * beta;
    eta.array() += intercept;
    Vector resid(prep.n());
    if (prep.family == Family::gaussian) {
        resid = prep.y - eta;
    } else {
        for (Index i = 0; i < prep.n(); ++i) resid(i) = prep.y(i) - 1.0 / (1.0 + std::exp(-eta(i)));
    }
    const Vector grad = prep.X.transpose() * prep.w.cwiseProduct(resid);
    const Vector Ab = theta > 0.0 ? penalty.apply(beta) : Vector::Zero(beta.size());
    KktReport rep;
    for (Index j = 0; j < beta.size(); ++j) {
        if (prep.excluded[j]) continue;
        const double s = -grad(j) + theta * Ab(j);
        if (beta(j) != 0.0) {
            const double sg = beta(j) > 0.0 ? 1.0 : -1.0;
            rep.max_active_violation = std::max(rep.max_active_violation, std::abs(s + lambda * sg));
        } else {
            rep.max_inactive_excess = std::max(rep.max_inactive_excess, std::abs(s) - lambda);
        }
    }
    rep.max_inactive_excess = std::max(rep.max_inactive_excess, 0.0);
    return rep;
}

/// KKT report at path point l of a fit made on prep.
inline KktReport kkt_check(const PreparedProblem& prep, const GroupPenalty& penalty,
                           const PathFit& fit, Index l)
{
    return kkt_check(prep, penalty, fit.theta, fit.lambda_grid[l], fit.internal_betas.col(l),
                     fit.internal_intercepts(l));
}

/// Gaussian objective 1/2 sum w r^2 + penalty in internal space.
inline double gaussian_objective(const PreparedProblem& prep, const GroupPenalty& penalty,
                                 double theta, double lambda, const Vector& beta, double intercept)
{
    Vector r = prep.y - prep.X * beta;
    r.array() -= intercept;
    double val = 0.5 * prep.w.dot(r.cwiseProduct(r)) + lambda * beta.lpNorm<1>();
    if (theta > 0.0) val += 0.5 * theta * penalty.quadratic_form(beta);
    return val;
}

} // namespace pclasso
