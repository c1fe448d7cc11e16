#include <cmath>
#include <gtest/gtest.h>
#include <pclasso/rng.hpp>
#include <pclasso/solver/kkt.hpp>
#include <pclasso/solver/path.hpp>
#include "support/oracles.hpp"

using namespace pclasso;

namespace {

Dataset binary_problem(Index n, Index p, std::uint64_t seed)
{
    Dataset d;
    d.family = Family::binomial;
    d.X = Matrix(n, p);
    CounterRng rx(seed, Stream::design);
    fill_standard_normal(d.X, rx);
    Vector beta = Vector::Zero(p);
    beta(0) = 1.2;
    if (p > 1) beta(1) = -0.8;
    CounterRng ru(seed, Stream::noise);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    d.y.resize(n);
    for (Index i = 0; i < n; ++i) {
        const double pr = 1.0 / (1.0 + std::exp(-(d.X.row(i).dot(beta) + 0.3)));
        d.y(i) = unif(ru) < pr ? 1.0 : 0.0;
    }
    return d;
}

} // namespace

TEST(Logistic, NullModelInterceptIsLogitOfMean)
{
    auto d = binary_problem(60, 5, 3);
    FitConfig c;
    c.n_lambda = 3;
    auto f = fit(d, GroupLayout::single_group(5), c);
    const double ybar = d.y.mean();
    EXPECT_TRUE(f.active_sets[0].empty());
    EXPECT_NEAR(f.intercepts(0), std::log(ybar / (1.0 - ybar)), 1e-6);
}

TEST(Logistic, MatchesProximalGradientOracle)
{
    auto d = binary_problem(80, 6, 7);
    auto L = GroupLayout::contiguous({3, 3});
    auto prep = prepare(d, L, true, true);
    auto pen = build_group_penalty(prep.X, L);
    const Matrix A = oracle::grouped_penalty(prep.X, {3, 3});
    for (double theta : {0.0, 0.05, 1.0}) {
        FitConfig c;
        c.theta = theta;
        c.tol = 1e-12;
        c.irls_tol = 1e-12;
        c.irls_max_iter = 100;
        c.n_lambda = 8;
        c.lambda_min_ratio = 0.05;
        auto f = fit_path(prep, L, pen, c);
        for (Index l = 1; l < f.n_lambda(); ++l) {
            const double lam = f.lambda_grid[l];
            auto o = oracle::logistic_fista(prep.X, prep.y, A, theta, lam);
            const double obj_o = oracle::logistic_smooth(prep.X, prep.y, A, theta, o.beta, o.b0)
                                 + lam * o.beta.lpNorm<1>();
            const double obj_f = oracle::logistic_smooth(prep.X, prep.y, A, theta,
                                                         f.internal_betas.col(l),
                                                         f.internal_intercepts(l))
                                 + lam * f.internal_betas.col(l).lpNorm<1>();
            EXPECT_LE(obj_f, obj_o * (1.0 + 1e-6)) << "theta " << theta << " l " << l;
            EXPECT_NEAR(f.objective[l], obj_f, 1e-9 * obj_f);
        }
    }
}

TEST(Logistic, KktHoldsAlongThePath)
{
    auto d = binary_problem(100, 30, 11);
    auto L = GroupLayout::contiguous({10, 10, 10});
    auto prep = prepare(d, L, true, true);
    auto pen = build_group_penalty(prep.X, L);
    FitConfig c;
    c.rat = 0.6;
    c.n_lambda = 30;
    auto f = fit_path(prep, L, pen, c);
    for (Index l = 0; l < f.n_lambda(); ++l) {
        EXPECT_LT(kkt_check(prep, pen, f, l).worst(), 1e-4 * f.lambda_grid.front()) << l;
    }
}

TEST(Logistic, SeparableDataStaysFinite)
{
    Dataset d;
    d.family = Family::binomial;
    d.X = Matrix(2, 1);
    d.X << -1, 1;
    d.y = Vector(2);
    d.y << 0, 1;
    FitConfig c;
    c.theta = 0.0;
    c.n_lambda = 20;
    c.lambda_min_ratio = 1e-3;
    auto f = fit(d, GroupLayout::single_group(1), c);
    EXPECT_TRUE(f.betas.allFinite());
    EXPECT_TRUE(f.intercepts.allFinite());
    for (const auto& trace : f.irls_deviance) {
        for (size_t i = 1; i < trace.size(); ++i) EXPECT_LE(trace[i], trace[i - 1] * (1.0 + 1e-10));
    }
    EXPECT_GT(f.betas(0, f.n_lambda() - 1), 0.0);
}

TEST(Logistic, ScreeningDoesNotChangeTheSolution)
{
    auto d = binary_problem(70, 90, 13);
    auto L = GroupLayout::contiguous({30, 30, 30});
    FitConfig on;
    on.rat = 0.8;
    on.n_lambda = 20;
    on.tol = 1e-12;
    on.irls_tol = 1e-12;
    FitConfig off = on;
    off.use_strong_rules = false;
    auto a = fit(d, L, on), b = fit(d, L, off);
    EXPECT_LT((a.betas - b.betas).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Logistic, DfIsNotReported)
{
    auto d = binary_problem(40, 4, 17);
    FitConfig c;
    c.n_lambda = 4;
    auto f = fit(d, GroupLayout::single_group(4), c);
    for (Index l = 0; l < f.n_lambda(); ++l) EXPECT_TRUE(std::isnan(f.df_estimates(l)));
}

TEST(Logistic, RejectsNonBinaryResponse)
{
    auto d = binary_problem(10, 2, 19);
    d.y(0) = 0.5;
    FitConfig c;
    EXPECT_THROW(fit(d, GroupLayout::single_group(2), c), DataError);
}
