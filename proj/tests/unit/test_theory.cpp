#include <gtest/gtest.h>
#include <pclasso/theory.hpp>

using namespace pclasso;

namespace {

Matrix gaussian_design(Index n, Index p, std::uint64_t seed)
{
    Matrix X(n, p);
    CounterRng r(seed, Stream::design);
    fill_standard_normal(X, r);
    return X;
}

} // namespace

TEST(Theory, AugmentedGramIdentity)
{
    Matrix X = gaussian_design(15, 7, 1);
    const Matrix A = theory_penalty(X);
    const double theta = 0.3;
    auto aug = augment(X, Vector::Ones(15), A, theta);
    const Matrix want = X.transpose() * X + 15.0 * theta * A;
    EXPECT_LT((aug.X.transpose() * aug.X - want).cwiseAbs().maxCoeff(), 1e-10 * want.norm());
    EXPECT_EQ(aug.y.tail(7), Vector::Zero(7));
}

TEST(Theory, PenaltyMatchesGramComplement)
{
    // Full column rank: A = d1^2 I - X^T X.
    Matrix X = gaussian_design(20, 5, 2);
    double d1 = 0.0, d2 = 0.0;
    const Matrix A = theory_penalty(X, &d1, &d2);
    const Matrix want = d1 * Matrix::Identity(5, 5) - X.transpose() * X;
    EXPECT_LT((A - want).cwiseAbs().maxCoeff(), 1e-9 * d1);
    EXPECT_GT(d1, d2);
}

TEST(Theory, UnrestrictedEigenBoundHolds)
{
    for (std::uint64_t s = 0; s < 10; ++s) {
        Matrix X = gaussian_design(8 + static_cast<Index>(s), 12, 10 + s);
        for (double nt : {0.1, 1.0, 5.0}) {
            auto c = check_unrestricted_bound(X, nt / static_cast<double>(X.rows()));
            EXPECT_TRUE(c.pass) << "seed " << s << " n*theta " << nt << " margin " << c.margin;
        }
    }
}

TEST(Theory, BoundFormulas)
{
    EXPECT_DOUBLE_EQ(unrestricted_bound(0.5, 4.0), 2.0);
    EXPECT_DOUBLE_EQ(unrestricted_bound(3.0, 4.0), 4.0);
    EXPECT_DOUBLE_EQ(restricted_bound(0.25, 2.0, 4.0), 0.75 * 2.0 + 1.0);
    EXPECT_DOUBLE_EQ(restricted_bound(2.0, 2.0, 4.0), 4.0);
}

TEST(Theory, ConeProbesStayInTheCone)
{
    CounterRng rng(3, Stream::probes);
    const IndexList S{1, 4};
    auto probes = cone_probes(10, S, 3.0, 200, rng);
    ASSERT_FALSE(probes.empty());
    for (const auto& v : probes) {
        const double in = std::abs(v(1)) + std::abs(v(4));
        const double out = v.lpNorm<1>() - in;
        EXPECT_LE(out, 3.0 * in * (1.0 + 1e-12));
        EXPECT_NEAR(v.norm(), 1.0, 1e-12);
    }
}

TEST(Theory, SmallSuitePasses)
{
    TheoryConfig cfg;
    cfg.n_instances = 8;
    cfg.n_eigen_instances = 12;
    cfg.n_probe = 200;
    cfg.seed = 5;
    auto rep = run_theory_suite(cfg);
    EXPECT_GE(rep.instances_attempted, 8);
    EXPECT_LT(rep.max_gram_error, 1e-10);
    for (const auto& c : rep.checks) {
        EXPECT_GT(c.instances, 0) << c.name;
        EXPECT_TRUE(c.pass()) << c.name << " violations " << c.violations << " worst "
                              << c.worst_margin;
    }
    ASSERT_NE(rep.find("prediction_fast"), nullptr);
    EXPECT_EQ(rep.find("nonexistent"), nullptr);
}

TEST(Theory, InstancesAreReproducible)
{
    TheoryConfig cfg;
    auto a = make_theory_instance(cfg, 3), b = make_theory_instance(cfg, 3);
    EXPECT_EQ(a.X, b.X);
    EXPECT_EQ(a.beta_star, b.beta_star);
    EXPECT_EQ(a.lambda, b.lambda);
    EXPECT_NE(a.X, make_theory_instance(cfg, 4).X);
}

TEST(Theory, CheckTallyCountsViolations)
{
    CheckTally t{"t"};
    t.add(1.0, 2.0);
    t.add(2.0, 2.0);
    EXPECT_TRUE(t.pass());
    t.add(2.1, 2.0);
    EXPECT_FALSE(t.pass());
    EXPECT_EQ(t.instances, 3);
    EXPECT_NEAR(t.worst_margin, -0.05, 1e-12);
}
