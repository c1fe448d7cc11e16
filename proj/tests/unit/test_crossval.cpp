#include <algorithm>
#include <gtest/gtest.h>
#include <pclasso/crossval.hpp>
#include <pclasso/rng.hpp>

using namespace pclasso;

namespace {

Dataset gaussian_problem(Index n, Index p, std::uint64_t seed)
{
    Dataset d;
    d.X = Matrix(n, p);
    CounterRng rx(seed, Stream::design);
    fill_standard_normal(d.X, rx);
    Vector e(n);
    CounterRng re(seed, Stream::noise);
    fill_standard_normal(e, re);
    d.y = d.X.col(0) * 2.0 - d.X.col(1) + e;
    return d;
}

} // namespace

TEST(Folds, BalancedAndDeterministic)
{
    Vector y = Vector::LinSpaced(23, 0.0, 1.0);
    auto a = make_folds(y, Family::gaussian, 5, 9);
    auto b = make_folds(y, Family::gaussian, 5, 9);
    EXPECT_EQ(a, b);
    std::vector<Index> count(5, 0);
    for (auto f : a) ++count[f];
    EXPECT_EQ(*std::max_element(count.begin(), count.end())
                  - *std::min_element(count.begin(), count.end()),
              1);
    EXPECT_NE(a, make_folds(y, Family::gaussian, 5, 10));
}

TEST(Folds, StratifiedForBinaryResponse)
{
    Vector y = Vector::Zero(40);
    y.head(10).setOnes();
    auto f = make_folds(y, Family::binomial, 5, 3);
    for (Index k = 0; k < 5; ++k) {
        Index pos = 0;
        for (Index i = 0; i < 40; ++i) pos += (f[i] == k && y(i) == 1.0);
        EXPECT_EQ(pos, 2);
    }
}

TEST(Folds, RejectsBadFoldCounts)
{
    Vector y = Vector::Zero(4);
    EXPECT_THROW(make_folds(y, Family::gaussian, 1, 0), UsageError);
    EXPECT_THROW(make_folds(y, Family::gaussian, 5, 0), UsageError);
}

TEST(Auc, HandValues)
{
    Vector labels(4), s(4);
    labels << 0, 0, 1, 1;
    s << 0.1, 0.2, 0.3, 0.4;
    EXPECT_DOUBLE_EQ(auc(s, labels), 1.0);
    s << 0.4, 0.3, 0.2, 0.1;
    EXPECT_DOUBLE_EQ(auc(s, labels), 0.0);
    s << 0.5, 0.5, 0.5, 0.5;
    EXPECT_DOUBLE_EQ(auc(s, labels), 0.5);
    s << 0.1, 0.3, 0.2, 0.4;
    EXPECT_DOUBLE_EQ(auc(s, labels), 0.75);
}

TEST(LambdaSelection, MinAndOneStandardError)
{
    Vector m(5), se(5);
    m << 5.0, 3.0, 2.2, 2.0, 2.1;
    se << 0.1, 0.1, 0.3, 0.25, 0.1;
    auto [imin, i1se] = detail::select_lambda(m, se);
    EXPECT_EQ(imin, 3);
    EXPECT_EQ(i1se, 2);
    m << 1.0, 1.0, 1.0, 1.0, 1.0;
    std::tie(imin, i1se) = detail::select_lambda(m, se);
    EXPECT_EQ(imin, 0);
    EXPECT_EQ(i1se, 0);
}

TEST(KFold, CurvesAndSelectionAreConsistent)
{
    auto d = gaussian_problem(60, 10, 21);
    auto L = GroupLayout::contiguous({5, 5});
    CVConfig cv;
    cv.n_folds = 5;
    cv.rat_grid = {0.5, 1.0, 0.8};
    FitConfig base;
    base.n_lambda = 20;
    auto r = kfold_cv(d, L, cv, base);
    ASSERT_EQ(r.curves.size(), 3u);
    EXPECT_EQ(r.curves[0].rat, 1.0);
    EXPECT_EQ(r.curves[2].rat, 0.5);
    EXPECT_EQ(r.curves[0].theta, 0.0);
    for (const auto& c : r.curves) {
        EXPECT_EQ(c.mean_error.size(), 20);
        EXPECT_LE(c.idx_1se, c.idx_min);
        EXPECT_TRUE((c.se.array() >= 0.0).all());
    }
    for (size_t c = 0; c < r.curves.size(); ++c) {
        EXPECT_GE(r.curves[c].mean_error(r.curves[c].idx_min),
                  r.best_curve().mean_error(r.best_curve().idx_min));
    }
    EXPECT_EQ(r.full_fits.size(), 3u);
    EXPECT_EQ(r.full_fits[r.best].lambda_grid, r.lambda_grid);
    EXPECT_GE(r.chosen_lambda_1se, r.chosen_lambda_min);
}

TEST(KFold, TiesGoToTheLargerRat)
{
    // A single column has no second singular value: every rat maps to
    // theta = 0 and all curves coincide.
    auto d = gaussian_problem(30, 1, 5);
    CVConfig cv;
    cv.n_folds = 3;
    cv.rat_grid = {0.3, 0.6, 1.0};
    FitConfig base;
    base.n_lambda = 10;
    auto r = kfold_cv(d, GroupLayout::single_group(1), cv, base);
    EXPECT_EQ(r.chosen_rat, 1.0);
    EXPECT_TRUE(r.curves[2].theta_indistinguishable);
}

TEST(KFold, ThreadCountDoesNotChangeResults)
{
    auto d = gaussian_problem(50, 12, 31);
    auto L = GroupLayout::contiguous({6, 6});
    CVConfig cv;
    cv.n_folds = 5;
    cv.rat_grid = {0.5, 1.0};
    cv.keep_full_fits = false;
    FitConfig base;
    base.n_lambda = 15;
    auto a = kfold_cv(d, L, cv, base);
    cv.threads = 4;
    auto b = kfold_cv(d, L, cv, base);
    for (size_t c = 0; c < a.curves.size(); ++c) {
        EXPECT_EQ(a.curves[c].fold_errors, b.curves[c].fold_errors);
    }
}

TEST(KFold, FoldSvdModeRuns)
{
    auto d = gaussian_problem(40, 8, 37);
    CVConfig cv;
    cv.n_folds = 4;
    cv.rat_grid = {0.5};
    cv.shared_svd = false;
    FitConfig base;
    base.n_lambda = 10;
    auto r = kfold_cv(d, GroupLayout::single_group(8), cv, base);
    EXPECT_FALSE(r.shared_svd);
    EXPECT_TRUE(r.curves[0].mean_error.allFinite());
}

TEST(KFold, BinomialReportsAuc)
{
    Dataset d = gaussian_problem(80, 4, 41);
    d.family = Family::binomial;
    for (Index i = 0; i < d.n(); ++i) d.y(i) = d.y(i) > 0.0 ? 1.0 : 0.0;
    CVConfig cv;
    cv.n_folds = 4;
    cv.rat_grid = {1.0};
    FitConfig base;
    base.n_lambda = 10;
    auto r = kfold_cv(d, GroupLayout::single_group(4), cv, base);
    const auto& c = r.best_curve();
    ASSERT_EQ(c.mean_auc.size(), 10);
    EXPECT_GT(c.mean_auc(c.idx_min), 0.7);
}

TEST(KFold, DegenerateFoldIsADataError)
{
    Dataset d = gaussian_problem(10, 2, 43);
    d.y.setConstant(1.0);
    CVConfig cv;
    cv.n_folds = 2;
    cv.rat_grid = {1.0};
    EXPECT_THROW(kfold_cv(d, GroupLayout::single_group(2), cv, FitConfig{}), DataError);
}

TEST(Pcr, RecoversLowRankSignal)
{
    Dataset d;
    const Index n = 80;
    Matrix Z(n, 2), Wt(2, 10), E(n, 10), e(n, 1);
    CounterRng r1(3, Stream::design), r2(3, Stream::column_choice), r3(3, Stream::noise),
        r4(3, Stream::monte_carlo);
    fill_standard_normal(Z, r1);
    fill_standard_normal(Wt, r2);
    fill_standard_normal(E, r3);
    fill_standard_normal(e, r4);
    d.X = Z * Wt * 3.0 + 0.1 * E;
    d.y = 2.0 * Z.col(0) + 0.05 * e.col(0);
    auto folds = make_folds(d.y, Family::gaussian, 5, 1);
    auto p = pcr_cv(d, folds, 5);
    EXPECT_GE(p.rank, 2);
    EXPECT_LT((p.predict(d.X) - d.y).norm() / d.y.norm(), 0.1);
    EXPECT_EQ(p.cv_error.size(), 11);
}
