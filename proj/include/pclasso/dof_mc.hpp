#pragma once
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>
#include <pclasso/dof.hpp>
#include <pclasso/parallel.hpp>
#include <pclasso/rng.hpp>
#include <pclasso/solver/path.hpp>

namespace pclasso {

struct McDfConfig
{
    Index B = 500;
    double sigma = 1.0;
    Vector beta_star;          // empty: all zero
    std::uint64_t seed = 1;
    unsigned threads = 1;

    void validate(Index p) const
    {
        if (B < 2) throw UsageError("Monte Carlo df needs B >= 2");
        if (!(sigma > 0.0) || !std::isfinite(sigma)) throw UsageError("sigma must be positive");
        if (beta_star.size() != 0 && beta_star.size() != p) {
            throw UsageError("beta_star length does not match the design");
        }
    }
};

/// Per-lambda Monte Carlo summary. bias = mean_df_hat - df_mc with a 95% CI.
struct McDfPoint
{
    double lambda = 0.0;
    double df_mc = 0.0;
    double mean_df_hat = 0.0;
    double bias = 0.0;
    double ci_halfwidth = 0.0;

    double ci_lo() const { return bias - ci_halfwidth; }
    double ci_hi() const { return bias + ci_halfwidth; }
    bool covers_zero() const { return ci_lo() <= 0.0 && 0.0 <= ci_hi(); }
};

struct McDfResult
{
    double theta = 0.0;
    std::vector<McDfPoint> points;

    double coverage() const
    {
        if (points.empty()) return 0.0;
        Index c = 0;
        for (const auto& pt : points) c += pt.covers_zero() ? 1 : 0;
        return static_cast<double>(c) / static_cast<double>(points.size());
    }
};

/**
 * Covariance estimate of the degrees of freedom for a fixed design:
 * y_b = X beta* + sigma eps_b, df_mc = sum_i cov(yhat_i, y_i) / sigma^2
 * with the centering constant a_i = 0. Each replication also yields the
 * trace estimate df_hat, and the bias CI uses the replication-level
 * differences df_hat_b - sum_i yhat_bi (y_bi - mu_i) / sigma^2.
 *
 * Fits run without intercept or standardization so the fitted values are
 * X beta_hat on the given X. The lambda grid comes from fit_cfg or, when
 * empty, from replication 0; it is then held fixed.
 */
inline McDfResult monte_carlo_df(const Matrix& X, const GroupLayout& layout, const McDfConfig& mc,
                                 FitConfig fit_cfg)
{
    const Index n = X.rows(), p = X.cols();
    mc.validate(p);
    fit_cfg.intercept = false;
    fit_cfg.standardize = false;
    fit_cfg.compute_df = true;
    const Vector mu = mc.beta_star.size() == 0 ? Vector::Zero(n) : Vector(X * mc.beta_star);

    auto draw = [&](Index b) {
        CounterRng rng(mc.seed, Stream::monte_carlo, static_cast<std::uint64_t>(b));
        std::normal_distribution<double> nd(0.0, 1.0);
        Vector y(n);
        for (Index i = 0; i < n; ++i) y(i) = mu(i) + mc.sigma * nd(rng);
        return y;
    };

    Dataset base;
    base.X = X;
    base.family = Family::gaussian;
    const PreparedProblem prep0 = [&] {
        base.y = draw(0);
        return prepare(base, layout, false, false);
    }();
    const GroupPenalty penalty = build_penalty_for(prep0, layout, fit_cfg);
    if (fit_cfg.lambda_grid.empty()) fit_cfg.lambda_grid = resolve_lambda_grid(prep0, fit_cfg);
    fit_cfg.n_lambda = static_cast<Index>(fit_cfg.lambda_grid.size());
    const Index L = fit_cfg.n_lambda;

    Matrix cov_term(L, mc.B), df_hat(L, mc.B);
    double theta = 0.0;
    parallel_for(static_cast<std::size_t>(mc.B), mc.threads, [&](std::size_t bi) {
        const Index b = static_cast<Index>(bi);
        Dataset d = base;
        d.y = draw(b);
        const PreparedProblem prep = prepare(d, layout, false, false);
        const PathFit f = fit_path(prep, layout, penalty, fit_cfg);
        if (b == 0) theta = f.theta;
        const Vector dev = d.y - mu;
        for (Index l = 0; l < L; ++l) {
            const Vector yhat = X * f.betas.col(l);
            cov_term(l, b) = yhat.dot(dev) / (mc.sigma * mc.sigma);
            df_hat(l, b) = f.df_estimates(l);
        }
    });

    McDfResult out;
    out.theta = theta;
    const double Bd = static_cast<double>(mc.B);
    for (Index l = 0; l < L; ++l) {
        McDfPoint pt;
        pt.lambda = fit_cfg.lambda_grid[l];
        pt.df_mc = cov_term.row(l).mean();
        pt.mean_df_hat = df_hat.row(l).mean();
        const Vector diff = (df_hat.row(l) - cov_term.row(l)).transpose();
        pt.bias = diff.mean();
        const double var = (diff.array() - pt.bias).square().sum() / (Bd - 1.0);
        pt.ci_halfwidth = 1.96 * std::sqrt(var / Bd);
        out.points.push_back(pt);
    }
    return out;
}

} // namespace pclasso
