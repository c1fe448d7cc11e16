#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>
#include <Eigen/Eigenvalues>
#include <pclasso/core.hpp>
#include <pclasso/data.hpp>
#include <pclasso/layout.hpp>
#include <pclasso/parallel.hpp>
#include <pclasso/penalty.hpp>
#include <pclasso/rng.hpp>
#include <pclasso/solver/path.hpp>

namespace pclasso {

/**
 * Finite-sample theory for a single group, in the 1/(2n) scaling:
 *
 *   minimize 1/(2n) ||y - X b||^2 + theta/2 b^T A b + lambda ||b||_1
 *
 * with A = V diag(d_1^2 - d_j^2) V^T built at full p x p size (directions
 * outside the row space weigh d_1^2). This equals the lasso on the
 * augmented design (X; sqrt(n theta) A^{1/2}) with response (y; 0).
 */
struct TheoryInstance
{
    Matrix X;
    Vector beta_star;
    IndexList support;
    Vector noise;
    double theta = 0.0;
    double lambda = 0.0;
    Matrix A;
    double d1_sq = 0.0;
    double d2_sq = 0.0;

    Index n() const { return X.rows(); }
    Index p() const { return X.cols(); }
    Vector y() const { return X * beta_star + noise; }
};

/// Full-size penalty matrix of a single-group design (no centering or scaling).
inline Matrix theory_penalty(const Matrix& X, double* d1_sq = nullptr, double* d2_sq = nullptr)
{
    auto svd = compute_group_svd(X);
    auto block = build_penalty(svd, X.cols(), false);
    if (d1_sq) *d1_sq = svd.d(0) * svd.d(0);
    if (d2_sq) *d2_sq = svd.rank() > 1 ? svd.d(1) * svd.d(1) : 0.0;
    return block.A;
}

/// Symmetric PSD square root via eigen-decomposition (negative rounding clipped).
inline Matrix psd_sqrt(const Matrix& A)
{
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (A + A.transpose()));
    Vector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

struct AugmentedDesign
{
    Matrix X;   // (n + p) x p
    Vector y;   // (y; 0)
};

/// Stack sqrt(n theta) A^{1/2} under X and zeros under y.
inline AugmentedDesign augment(const Matrix& X, const Vector& y, const Matrix& A, double theta)
{
    const Index n = X.rows(), p = X.cols();
    AugmentedDesign out;
    out.X.resize(n + p, p);
    out.X.topRows(n) = X;
    out.X.bottomRows(p) = std::sqrt(static_cast<double>(n) * theta) * psd_sqrt(A);
    out.y = Vector::Zero(n + p);
    out.y.head(n) = y;
    return out;
}

/// Lower bound on the augmented quadratic form over a restricted cone.
inline double restricted_bound(double n_theta, double n_gamma, double d1_sq)
{
    if (n_theta <= 1.0) return (1.0 - n_theta) * n_gamma + n_theta * d1_sq;
    return d1_sq;
}

/// Lower bound on the augmented quadratic form over all directions.
inline double unrestricted_bound(double n_theta, double d1_sq)
{
    return std::min(n_theta, 1.0) * d1_sq;
}

struct EigenBoundCheck
{
    bool pass = false;
    double lambda_min = 0.0;
    double bound = 0.0;
    double margin = 0.0;   // (lambda_min - bound) / d1^2
};

/// lambda_min(X^T X + n theta A) against min(n theta, 1) d_1^2.
inline EigenBoundCheck check_unrestricted_bound(const Matrix& X, double theta)
{
    double d1_sq = 0.0;
    const Matrix A = theory_penalty(X, &d1_sq);
    const double nt = static_cast<double>(X.rows()) * theta;
    Matrix G = X.transpose() * X + nt * A;
    G = 0.5 * (G + G.transpose()).eval();
    EigenBoundCheck out;
    out.lambda_min = Eigen::SelfAdjointEigenSolver<Matrix>(G, Eigen::EigenvaluesOnly).eigenvalues()(0);
    out.bound = unrestricted_bound(nt, d1_sq);
    out.margin = (out.lambda_min - out.bound) / d1_sq;
    out.pass = out.lambda_min >= out.bound - 1e-8 * d1_sq;
    return out;
}

/// Random directions in {nu : ||nu_{S^c}||_1 <= c ||nu_S||_1}.
inline std::vector<Vector> cone_probes(Index p, const IndexList& support, double c, Index n_probe,
                                       CounterRng& rng)
{
    std::normal_distribution<double> nd(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<bool> in_s(p, false);
    for (auto j : support) in_s[j] = true;
    std::vector<Vector> out;
    out.reserve(n_probe);
    for (Index t = 0; t < n_probe; ++t) {
        Vector v = Vector::Zero(p);
        double l1_s = 0.0, l1_c = 0.0;
        for (Index j = 0; j < p; ++j) {
            v(j) = nd(rng);
            (in_s[j] ? l1_s : l1_c) += std::abs(v(j));
        }
        if (l1_s == 0.0) continue;
        if (l1_c > 0.0) {
            const double target = c * l1_s * unif(rng);
            for (Index j = 0; j < p; ++j) {
                if (!in_s[j]) v(j) *= target / l1_c;
            }
        }
        out.push_back(v / v.norm());
    }
    return out;
}

/// min over probes of nu^T X^T X nu / (n ||nu||^2): an upper envelope of the true constant.
inline double probe_gamma(const Matrix& X, const std::vector<Vector>& probes)
{
    double g = std::numeric_limits<double>::infinity();
    for (const auto& v : probes) g = std::min(g, (X * v).squaredNorm() / v.squaredNorm());
    return g / static_cast<double>(X.rows());
}

struct RestrictedBoundCheck
{
    bool pass = true;
    double gamma = 0.0;
    Index violations = 0;
    double worst_margin = std::numeric_limits<double>::infinity();   // relative to d1^2
};

/**
 * Restricted bound on cone probes: with gamma taken from the probes
 * (plus any extra directions supplied), every probe must satisfy
 * nu^T (X^T X + n theta A) nu >= bound(gamma) ||nu||^2.
 */
inline RestrictedBoundCheck check_restricted_bound(const TheoryInstance& inst, double cone_factor,
                                                   Index n_probe, std::uint64_t seed,
                                                   const std::vector<Vector>& extra = {})
{
    CounterRng rng(seed, Stream::probes);
    auto probes = cone_probes(inst.p(), inst.support, cone_factor, n_probe, rng);
    for (const auto& e : extra) {
        if (e.norm() > 0.0) probes.push_back(e / e.norm());
    }
    RestrictedBoundCheck out;
    out.gamma = probe_gamma(inst.X, probes);
    const double nd = static_cast<double>(inst.n());
    const double nt = nd * inst.theta;
    const double bound = restricted_bound(nt, nd * out.gamma, inst.d1_sq);
    for (const auto& v : probes) {
        const double q = (inst.X * v).squaredNorm() + nt * v.dot(inst.A * v);
        const double margin = (q - bound * v.squaredNorm()) / inst.d1_sq;
        out.worst_margin = std::min(out.worst_margin, margin);
        if (margin < -1e-8) {
            ++out.violations;
            out.pass = false;
        }
    }
    return out;
}

namespace detail {

inline FitConfig theory_fit_config(double solver_theta, double solver_lambda)
{
    FitConfig cfg;
    cfg.theta = solver_theta;
    cfg.lambda_grid = {solver_lambda};
    cfg.standardize = false;
    cfg.intercept = false;
    cfg.use_strong_rules = false;
    cfg.compute_df = false;
    cfg.tol = 1e-12;
    cfg.max_iter = 1000000;
    return cfg;
}

} // namespace detail

/// Theory-scaled Lagrangian fit: the solver runs with n lambda and n theta.
class TheorySolver
{
public:
    TheorySolver(const Matrix& X, const Vector& y, double theta)
        : layout_(GroupLayout::single_group(X.cols())), theta_(theta)
    {
        Dataset d;
        d.X = X;
        d.y = y;
        prep_ = prepare(d, layout_, false, false);
        penalty_ = build_group_penalty(prep_.X, layout_);
        nd_ = static_cast<double>(X.rows());
        lambda_max_ = pclasso::lambda_max(prep_) / nd_;
    }

    /// Smallest lambda (theory scale) with a zero solution.
    double lambda_max() const { return lambda_max_; }

    Vector solve(double lambda) const
    {
        auto fit = fit_path(prep_, layout_, penalty_, detail::theory_fit_config(nd_ * theta_, nd_ * lambda));
        return fit.internal_betas.col(0);
    }

    /**
     * Constrained form min ||y~ - X~ b||^2 s.t. ||b||_1 <= R, by bisection on
     * lambda; the returned point is always feasible.
     */
    Vector solve_constrained(double R) const
    {
        Vector b0 = solve(0.0);
        if (b0.lpNorm<1>() <= R) return b0;
        double lo = 0.0, hi = lambda_max_;
        Vector best = Vector::Zero(prep_.p());
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            Vector b = solve(mid);
            const double nrm = b.lpNorm<1>();
            if (nrm <= R) {
                hi = mid;
                best = b;
                if (R - nrm <= 1e-9 * R) break;
            } else {
                lo = mid;
            }
            if (hi - lo <= 1e-15 * lambda_max_) break;
        }
        return best;
    }

private:
    GroupLayout layout_;
    PreparedProblem prep_;
    GroupPenalty penalty_;
    double theta_;
    double nd_ = 1.0;
    double lambda_max_ = 0.0;
};

/// Outcome tally of one inequality across instances.
struct CheckTally
{
    std::string name;
    Index instances = 0;
    Index violations = 0;
    double worst_margin = std::numeric_limits<double>::infinity();   // min (rhs - lhs) / |rhs|

    void add(double lhs, double rhs, double slack = 1e-8)
    {
        ++instances;
        const double scale = rhs != 0.0 ? std::abs(rhs) : 1.0;
        const double m = (rhs - lhs) / scale;
        worst_margin = std::min(worst_margin, m);
        if (lhs > rhs + slack * std::max(1.0, std::abs(rhs))) ++violations;
    }

    bool pass() const { return violations == 0; }
};

/// Left- and right-hand sides of the error bounds for one instance.
struct ErrorBoundEvaluation
{
    bool skipped = false;
    std::string skip_reason;
    double l2_constrained = 0.0;
    double l2_lagrangian = 0.0;
    double prediction = 0.0;          // ||X (b - b*)||^2 / n, Lagrangian fit
    double rhs_l2_constrained_re = 0.0;
    double rhs_l2_constrained_unrestricted = 0.0;
    double rhs_l2_lagrangian_re = 0.0;
    double rhs_l2_lagrangian_unrestricted = 0.0;
    double rhs_prediction_slow = 0.0;
    double rhs_prediction_slow_sharp = 0.0;
    double rhs_prediction_slow_sharp_rescaled = 0.0;   // same form with kappa / (2n)
    double rhs_prediction_fast = 0.0;
    double cone_constrained_excess = 0.0;   // ||nu_Sc||_1 - ||nu_S||_1
    double cone_lagrangian_excess = 0.0;    // ||nu_Sc||_1 - 3 ||nu_S||_1
    double gamma_c1 = 0.0;
    double gamma_c3 = 0.0;
};

namespace detail {

inline std::pair<double, double> split_l1(const Vector& v, const IndexList& support)
{
    std::vector<bool> in_s(v.size(), false);
    for (auto j : support) in_s[j] = true;
    double s = 0.0, c = 0.0;
    for (Index j = 0; j < v.size(); ++j) (in_s[j] ? s : c) += std::abs(v(j));
    return {s, c};
}

} // namespace detail

/**
 * Fit the constrained (R = ||b*||_1) and Lagrangian forms and evaluate every
 * error bound. gamma for each cone comes from probes plus the realized
 * error direction, which lies in the cone by construction.
 */
inline ErrorBoundEvaluation check_error_bounds(const TheoryInstance& inst, Index n_probe,
                                               std::uint64_t probe_seed)
{
    ErrorBoundEvaluation ev;
    const double nd = static_cast<double>(inst.n());
    const double pd = static_cast<double>(inst.p());
    const double nt = nd * inst.theta;
    const double s = static_cast<double>(inst.support.size());
    const Vector y = inst.y();
    TheorySolver solver(inst.X, y, inst.theta);
    if (inst.lambda >= solver.lambda_max()) {
        ev.skipped = true;
        ev.skip_reason = "required lambda exceeds lambda_max";
        return ev;
    }
    const double R = inst.beta_star.lpNorm<1>();
    const Vector nu_c = solver.solve_constrained(R) - inst.beta_star;
    const Vector nu_l = solver.solve(inst.lambda) - inst.beta_star;

    auto [cs, cc] = detail::split_l1(nu_c, inst.support);
    auto [ls, lc] = detail::split_l1(nu_l, inst.support);
    ev.cone_constrained_excess = cc - cs;
    ev.cone_lagrangian_excess = lc - 3.0 * ls;

    ev.gamma_c1 = check_restricted_bound(inst, 1.0, n_probe, probe_seed, {nu_c}).gamma;
    ev.gamma_c3 = check_restricted_bound(inst, 3.0, n_probe, probe_seed + 1, {nu_l}).gamma;

    const double eff = (inst.X.transpose() * inst.noise - nt * (inst.A * inst.beta_star)).lpNorm<Eigen::Infinity>();
    const double re1 = restricted_bound(nt, nd * ev.gamma_c1, inst.d1_sq);
    const double re3 = restricted_bound(nt, nd * ev.gamma_c3, inst.d1_sq);
    const double ub = unrestricted_bound(nt, inst.d1_sq);
    const double lam = inst.lambda;

    ev.l2_constrained = nu_c.norm();
    ev.l2_lagrangian = nu_l.norm();
    ev.prediction = (inst.X * nu_l).squaredNorm() / nd;
    ev.rhs_l2_constrained_re = 4.0 * std::sqrt(s) * eff / re1;
    ev.rhs_l2_constrained_unrestricted = 4.0 * std::sqrt(s) * eff / ub;
    ev.rhs_l2_lagrangian_re = 3.0 * lam * std::sqrt(s) / (re3 / nd);
    ev.rhs_l2_lagrangian_unrestricted = 3.0 * lam * std::sqrt(s) / (ub / nd);
    ev.rhs_prediction_slow = 12.0 * lam * R;
    auto sharp = [&](double kappa) {
        return 3.0 * lam * (-lam * pd + std::sqrt(lam * lam * pd * pd + 32.0 * lam * R * kappa * pd))
            / (4.0 * kappa);
    };
    ev.rhs_prediction_slow_sharp = sharp(ub);
    ev.rhs_prediction_slow_sharp_rescaled = sharp(ub / (2.0 * nd));
    ev.rhs_prediction_fast = 9.0 * s * lam * lam / (re3 / nd);
    return ev;
}

struct TheoryConfig
{
    Index n = 60;
    Index p = 20;
    Index support_size = 3;
    double sigma = 1.0;
    double beta_min = 3.0;
    double beta_max = 5.0;
    std::vector<double> n_theta{0.02, 0.05, 0.1, 0.2};
    double lambda_factor = 1.0;      // lambda = factor * (2/n) ||X^T w - n theta A b*||_inf
    Index n_instances = 50;          // error-bound instances that satisfy the hypotheses
    Index n_eigen_instances = 100;   // random designs for the eigenvalue checks
    Index n_probe = 2000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

struct TheoryReport
{
    std::vector<CheckTally> checks;
    Index instances_attempted = 0;
    Index instances_skipped = 0;
    double max_gram_error = 0.0;

    const CheckTally* find(const std::string& name) const
    {
        for (const auto& c : checks) {
            if (c.name == name) return &c;
        }
        return nullptr;
    }
};

/// Random error-bound instance number `index` of a config.
inline TheoryInstance make_theory_instance(const TheoryConfig& cfg, Index index)
{
    CounterRng rng(cfg.seed, Stream::theory, static_cast<std::uint64_t>(index));
    std::normal_distribution<double> nd(0.0, 1.0);
    std::uniform_real_distribution<double> mag(cfg.beta_min, cfg.beta_max);
    TheoryInstance inst;
    inst.X.resize(cfg.n, cfg.p);
    fill_standard_normal(inst.X, rng);
    IndexList perm(cfg.p);
    for (Index j = 0; j < cfg.p; ++j) perm[j] = j;
    for (Index j = 0; j < cfg.support_size; ++j) {
        std::uniform_int_distribution<Index> pick(j, cfg.p - 1);
        std::swap(perm[j], perm[pick(rng)]);
    }
    inst.support.assign(perm.begin(), perm.begin() + cfg.support_size);
    std::sort(inst.support.begin(), inst.support.end());
    inst.beta_star = Vector::Zero(cfg.p);
    for (auto j : inst.support) inst.beta_star(j) = (rng() & 1 ? 1.0 : -1.0) * mag(rng);
    inst.noise.resize(cfg.n);
    for (Index i = 0; i < cfg.n; ++i) inst.noise(i) = cfg.sigma * nd(rng);
    const double nt = cfg.n_theta[static_cast<size_t>(index) % cfg.n_theta.size()];
    inst.theta = nt / static_cast<double>(cfg.n);
    inst.A = theory_penalty(inst.X, &inst.d1_sq, &inst.d2_sq);
    const double eff = (inst.X.transpose() * inst.noise
                        - nt * (inst.A * inst.beta_star)).lpNorm<Eigen::Infinity>();
    inst.lambda = cfg.lambda_factor * 2.0 * eff / static_cast<double>(cfg.n);
    return inst;
}

/**
 * Eigenvalue checks on random small designs, then the error bounds on
 * instances that satisfy the hypotheses (instances whose required lambda
 * exceeds lambda_max are skipped and replaced).
 */
inline TheoryReport run_theory_suite(const TheoryConfig& cfg)
{
    if (cfg.n_theta.empty()) throw UsageError("theory suite needs at least one n*theta value");
    if (cfg.support_size < 1 || cfg.support_size > cfg.p) throw UsageError("invalid support size");
    TheoryReport rep;
    CheckTally gram{"gram_identity"}, unres{"unrestricted_eigen_bound"}, res1{"restricted_eigen_bound_c1"},
        res3{"restricted_eigen_bound_c3"};

    // Eigenvalue statements on random designs of varying shape.
    struct EigenOutcome
    {
        double gram_err = 0.0, gram_scale = 1.0;
        EigenBoundCheck unres;
        RestrictedBoundCheck r1, r3;
    };
    std::vector<EigenOutcome> eig(cfg.n_eigen_instances);
    parallel_for(eig.size(), cfg.threads, [&](std::size_t t) {
        CounterRng rng(cfg.seed + 7919, Stream::theory, t);
        std::uniform_int_distribution<Index> nn(5, 50), pp(2, 30);
        const Index n = nn(rng), p = pp(rng);
        const double factors[3] = {0.1, 1.0, 10.0};
        TheoryInstance inst;
        inst.X.resize(n, p);
        fill_standard_normal(inst.X, rng);
        inst.theta = factors[t % 3] / static_cast<double>(n);
        inst.A = theory_penalty(inst.X, &inst.d1_sq, &inst.d2_sq);
        const Index s = std::max<Index>(1, std::min<Index>(3, p / 2));
        for (Index j = 0; j < s; ++j) inst.support.push_back(j);
        const Vector y = Vector::Zero(n);
        const auto aug = augment(inst.X, y, inst.A, inst.theta);
        const Matrix lhs = aug.X.transpose() * aug.X;
        const Matrix rhs = inst.X.transpose() * inst.X + static_cast<double>(n) * inst.theta * inst.A;
        eig[t].gram_err = (lhs - rhs).cwiseAbs().maxCoeff();
        eig[t].gram_scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
        eig[t].unres = check_unrestricted_bound(inst.X, inst.theta);
        eig[t].r1 = check_restricted_bound(inst, 1.0, cfg.n_probe / 4, cfg.seed + t);
        eig[t].r3 = check_restricted_bound(inst, 3.0, cfg.n_probe / 4, cfg.seed + t + 1);
    });
    for (const auto& e : eig) {
        rep.max_gram_error = std::max(rep.max_gram_error, e.gram_err / e.gram_scale);
        gram.add(e.gram_err / e.gram_scale, 1e-10, 0.0);
        ++unres.instances;
        unres.worst_margin = std::min(unres.worst_margin, e.unres.margin);
        if (!e.unres.pass) ++unres.violations;
        res1.instances++;
        res1.violations += e.r1.violations;
        res1.worst_margin = std::min(res1.worst_margin, e.r1.worst_margin);
        res3.instances++;
        res3.violations += e.r3.violations;
        res3.worst_margin = std::min(res3.worst_margin, e.r3.worst_margin);
    }

    // Error bounds on hypothesis-satisfying instances.
    CheckTally l2c_re{"l2_constrained_re"}, l2c_un{"l2_constrained_unrestricted"},
        l2l_re{"l2_lagrangian_re"}, l2l_un{"l2_lagrangian_unrestricted"},
        pslow{"prediction_slow"}, psharp{"prediction_slow_sharp"},
        psharp_r{"prediction_slow_sharp_rescaled"}, pfast{"prediction_fast"},
        order{"sharp_le_slow"}, cone1{"cone_constrained"}, cone3{"cone_lagrangian"};
    const Index max_attempts = 20 * cfg.n_instances + 20;
    Index valid = 0, next = 0;
    while (valid < cfg.n_instances && next < max_attempts) {
        const Index batch = std::min<Index>(cfg.n_instances - valid, max_attempts - next);
        std::vector<ErrorBoundEvaluation> evs(batch);
        parallel_for(static_cast<std::size_t>(batch), cfg.threads, [&](std::size_t b) {
            const Index idx = next + static_cast<Index>(b);
            evs[b] = check_error_bounds(make_theory_instance(cfg, idx), cfg.n_probe,
                                        cfg.seed * 1000003 + static_cast<std::uint64_t>(idx));
        });
        next += batch;
        rep.instances_attempted += batch;
        for (const auto& ev : evs) {
            if (ev.skipped) {
                ++rep.instances_skipped;
                continue;
            }
            ++valid;
            l2c_re.add(ev.l2_constrained, ev.rhs_l2_constrained_re);
            l2c_un.add(ev.l2_constrained, ev.rhs_l2_constrained_unrestricted);
            l2l_re.add(ev.l2_lagrangian, ev.rhs_l2_lagrangian_re);
            l2l_un.add(ev.l2_lagrangian, ev.rhs_l2_lagrangian_unrestricted);
            pslow.add(ev.prediction, ev.rhs_prediction_slow);
            psharp.add(ev.prediction, ev.rhs_prediction_slow_sharp);
            psharp_r.add(ev.prediction, ev.rhs_prediction_slow_sharp_rescaled);
            pfast.add(ev.prediction, ev.rhs_prediction_fast);
            order.add(ev.rhs_prediction_slow_sharp, ev.rhs_prediction_slow);
            cone1.add(ev.cone_constrained_excess, 0.0, 1e-8);
            cone3.add(ev.cone_lagrangian_excess, 0.0, 1e-8);
        }
    }
    rep.checks = {gram, unres, res1, res3, l2c_re, l2c_un, l2l_re, l2l_un,
                  pslow, psharp, psharp_r, pfast, order, cone1, cone3};
    return rep;
}

} // namespace pclasso
