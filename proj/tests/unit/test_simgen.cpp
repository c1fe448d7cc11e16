#include <set>
#include <gtest/gtest.h>
#include <pclasso/experiment.hpp>
#include <pclasso/simgen.hpp>

using namespace pclasso;

namespace {

double sample_var(const Vector& v)
{
    const double m = v.mean();
    return (v.array() - m).square().sum() / static_cast<double>(v.size() - 1);
}

} // namespace

TEST(Simulate, RealizedSnrIsNearTarget)
{
    SimSpec s;
    s.n = 2000;
    s.sizes = {20, 20};
    s.rho = 0.4;
    s.n_ev = 2;
    s.snr = 2.0;
    s.n_test = 0;
    s.seed = 4;
    auto d = simulate(s);
    const double realized = sample_var(d.signal_train) / sample_var(d.y_train - d.signal_train);
    EXPECT_GT(realized, 0.7 * s.snr);
    EXPECT_LT(realized, 1.3 * s.snr);
}

TEST(Simulate, EquicorrelatedBlocks)
{
    SimSpec s;
    s.n = 5000;
    s.sizes = {4};
    s.rho = 0.6;
    s.n_test = 0;
    auto d = simulate(s);
    Matrix Xc = d.X_train.rowwise() - d.X_train.colwise().mean();
    const Matrix S = Xc.transpose() * Xc / static_cast<double>(s.n - 1);
    EXPECT_NEAR(S(0, 1), 0.6, 0.05);
    EXPECT_NEAR(S(2, 2), 1.0, 0.06);
}

TEST(Simulate, CourtsPickTheRightComponents)
{
    SimSpec s;
    s.n = 100;
    s.sizes = {10, 10};
    s.n_ev = 2;
    s.n_test = 0;
    s.court = Court::home;
    EXPECT_EQ(simulate(s).chosen_columns[0], (IndexList{0, 1}));
    s.court = Court::hostile;
    EXPECT_EQ(simulate(s).chosen_columns[0], (IndexList{8, 9}));
    s.court = Court::neutral;
    auto n1 = simulate(s).chosen_columns;
    EXPECT_EQ(n1[0].size(), 2u);
    EXPECT_EQ(n1, simulate(s).chosen_columns);
}

TEST(Simulate, InactiveGroupsCarryNoSignal)
{
    SimSpec s;
    s.n = 80;
    s.sizes = {5, 5, 5};
    s.active_groups = {1};
    s.n_test = 100;
    auto d = simulate(s);
    const Vector from_group1 = d.X_train.middleCols(5, 5) * (d.W[1] * d.b[1]);
    EXPECT_LT((d.signal_train - from_group1).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_EQ(d.X_test.rows(), 100);
    EXPECT_EQ(d.layout.n_groups(), 3);
}

TEST(Simulate, DeterministicPerSeed)
{
    SimSpec s;
    s.n = 30;
    s.sizes = {6, 4};
    s.n_test = 10;
    s.seed = 12;
    auto a = simulate(s), b = simulate(s);
    EXPECT_EQ(a.X_train, b.X_train);
    EXPECT_EQ(a.y_train, b.y_train);
    EXPECT_EQ(a.X_test, b.X_test);
    s.seed = 13;
    EXPECT_NE(a.y_train, simulate(s).y_train);
}

TEST(Simulate, TestDesignIsIndependentOfTraining)
{
    SimSpec s;
    s.n = 20;
    s.sizes = {3};
    s.n_test = 20;
    auto d = simulate(s);
    EXPECT_NE(d.X_train, d.X_test);
}

TEST(Simulate, RejectsBadSpecs)
{
    SimSpec s;
    s.rho = 1.0;
    EXPECT_THROW(simulate(s), UsageError);
    SimSpec t;
    t.sizes = {3};
    t.n = 10;
    t.n_ev = 4;
    EXPECT_THROW(simulate(t), UsageError);
    SimSpec u;
    u.active_groups = {};
    u.sizes = {3};
    EXPECT_THROW(simulate(u), UsageError);
    EXPECT_THROW(court_from_string("away"), UsageError);
}

TEST(Experiment, OneSeedProducesEveryMethod)
{
    SimSpec s;
    s.n = 60;
    s.sizes = {8, 8};
    s.n_ev = 1;
    s.snr = 2.0;
    s.n_test = 200;
    CVConfig cv;
    cv.rat_grid = {0.5};
    cv.n_folds = 3;
    FitConfig fc;
    fc.n_lambda = 20;
    fc.tol = 1e-4;
    auto rows = run_experiment_seed(s, 3, cv, fc);
    std::set<std::string> methods;
    for (const auto& r : rows) {
        methods.insert(r.method);
        EXPECT_TRUE(std::isfinite(r.mse));
        EXPECT_GE(r.mse, 0.0);
        if (r.method == "lasso-min") EXPECT_EQ(r.chosen_rat, 1.0);
    }
    EXPECT_EQ(methods.size(), experiment_methods().size());
}
