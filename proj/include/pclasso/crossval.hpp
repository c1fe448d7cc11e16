#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <vector>
#include <Eigen/SVD>
#include <pclasso/core.hpp>
#include <pclasso/data.hpp>
#include <pclasso/layout.hpp>
#include <pclasso/parallel.hpp>
#include <pclasso/penalty.hpp>
#include <pclasso/rng.hpp>
#include <pclasso/solver/logistic.hpp>
#include <pclasso/solver/path.hpp>

namespace pclasso {

struct CVConfig
{
    Index n_folds = 10;
    std::vector<double> rat_grid{0.25, 0.5, 0.75, 0.9, 0.95, 1.0};
    std::uint64_t fold_seed = 0;
    bool shared_svd = true;
    bool keep_full_fits = true;
    unsigned threads = 1;
};

/// Mann-Whitney AUC: P(score of a positive > score of a negative), ties 1/2.
inline double auc(const Vector& scores, const Vector& labels)
{
    if (scores.size() != labels.size()) throw UsageError("scores and labels differ in length");
    const Index n = scores.size();
    std::vector<Index> order(n);
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) { return scores(a) < scores(b); });
    double rank_sum_pos = 0.0, n_pos = 0.0, n_neg = 0.0;
    for (Index i = 0; i < n;) {
        Index j = i;
        while (j < n && scores(order[j]) == scores(order[i])) ++j;
        const double mid = 0.5 * static_cast<double>(i + j + 1);   // average 1-based rank
        for (Index t = i; t < j; ++t) {
            if (labels(order[t]) == 1.0) {
                rank_sum_pos += mid;
                n_pos += 1.0;
            } else if (labels(order[t]) == 0.0) {
                n_neg += 1.0;
            } else {
                throw DataError("auc labels must be 0 or 1");
            }
        }
        i = j;
    }
    if (n_pos == 0.0 || n_neg == 0.0) throw DataError("auc needs both classes present");
    return (rank_sum_pos - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

/**
 * Fold id per observation. Observations are shuffled and dealt round-robin;
 * for binomial data each class is dealt separately so folds are stratified.
 */
inline std::vector<Index> make_folds(const Vector& y, Family family, Index n_folds,
                                     std::uint64_t seed)
{
    const Index n = y.size();
    if (n_folds < 2 || n_folds > n) {
        throw UsageError("n_folds must lie in [2, n]; got " + std::to_string(n_folds));
    }
    CounterRng rng(seed, Stream::folds);
    std::vector<Index> fold(n, 0);
    std::vector<IndexList> strata;
    if (family == Family::binomial) {
        strata.resize(2);
        for (Index i = 0; i < n; ++i) strata[y(i) == 1.0 ? 1 : 0].push_back(i);
    } else {
        strata.resize(1);
        strata[0].resize(n);
        std::iota(strata[0].begin(), strata[0].end(), Index{0});
    }
    Index next = 0;
    for (auto& s : strata) {
        for (Index i = static_cast<Index>(s.size()) - 1; i > 0; --i) {
            std::uniform_int_distribution<Index> pick(0, i);
            std::swap(s[i], s[pick(rng)]);
        }
        for (auto i : s) fold[i] = (next++) % n_folds;
    }
    return fold;
}

/// CV curve for one rat value.
struct CVCurve
{
    double rat = 1.0;
    double theta = 0.0;
    bool theta_indistinguishable = false;
    Vector mean_error;        // per lambda
    Vector se;
    Matrix fold_errors;       // n_folds x L
    Vector mean_auc;          // binomial only
    Index idx_min = 0;
    Index idx_1se = 0;
};

struct CVResult
{
    Family family = Family::gaussian;
    bool shared_svd = true;
    std::vector<double> lambda_grid;
    std::vector<CVCurve> curves;          // sorted by decreasing rat
    std::vector<Index> fold_ids;
    Index best = 0;                       // index into curves
    double chosen_rat = 1.0;
    double chosen_theta = 0.0;
    double chosen_lambda_min = 0.0;
    double chosen_lambda_1se = 0.0;
    std::vector<PathFit> full_fits;       // parallel to curves when kept

    const CVCurve& best_curve() const { return curves[best]; }

    std::optional<Index> curve_for_rat(double rat) const
    {
        for (size_t c = 0; c < curves.size(); ++c) {
            if (curves[c].rat == rat) return static_cast<Index>(c);
        }
        return std::nullopt;
    }
};

namespace detail {

/// lambda.min (first minimum, i.e. largest lambda) and lambda.1se indices.
inline std::pair<Index, Index> select_lambda(const Vector& mean, const Vector& se)
{
    Index imin = 0;
    for (Index l = 1; l < mean.size(); ++l) {
        if (mean(l) < mean(imin)) imin = l;
    }
    const double bound = mean(imin) + se(imin);
    Index i1se = imin;
    for (Index l = 0; l <= imin; ++l) {
        if (mean(l) <= bound) {
            i1se = l;
            break;
        }
    }
    return {imin, i1se};
}

inline void check_fold(const Dataset& train)
{
    const Vector w = train.effective_weights();
    const double mean = w.dot(train.y) / w.sum();
    const double var = w.dot((train.y.array() - mean).square().matrix());
    if (!(var > 0.0)) throw DataError("degenerate fold: training response has zero variance");
}

} // namespace detail

/**
 * K-fold cross-validation over a rat grid on one shared lambda grid and one
 * fold partition. Each rat's curve gets lambda.min and lambda.1se; the rat
 * with the smallest minimum error wins (ties go to the larger rat) and the
 * 1se rule is applied within the winning curve.
 */
inline CVResult kfold_cv(const Dataset& data, const GroupLayout& layout, const CVConfig& cv,
                         const FitConfig& base)
{
    base.validate();
    data.validate();
    if (data.p() != layout.n_original()) throw DataError("layout does not match the design columns");
    if (cv.rat_grid.empty()) throw UsageError("rat grid is empty");
    std::vector<double> rats = cv.rat_grid;
    for (double r : rats) {
        if (!(r > 0.0 && r <= 1.0)) throw UsageError("rat values must lie in (0, 1]");
    }
    std::sort(rats.begin(), rats.end(), std::greater<double>());
    rats.erase(std::unique(rats.begin(), rats.end()), rats.end());

    CVResult res;
    res.family = data.family;
    res.shared_svd = cv.shared_svd;
    res.fold_ids = make_folds(data.y, data.family, cv.n_folds, cv.fold_seed);

    const auto prep_full = prepare(data, layout, base.standardize, base.intercept);
    const auto pen_full = build_penalty_for(prep_full, layout, base);
    res.lambda_grid = resolve_lambda_grid(prep_full, base);
    const Index L = static_cast<Index>(res.lambda_grid.size());
    const Index K = cv.n_folds;
    const Index R = static_cast<Index>(rats.size());

    FitConfig fc = base;
    fc.lambda_grid = res.lambda_grid;
    fc.compute_df = false;
    fc.theta.reset();
    fc.rat.reset();

    std::vector<Dataset> train(K), valid(K);
    for (Index k = 0; k < K; ++k) {
        IndexList tr, va;
        for (Index i = 0; i < data.n(); ++i) (res.fold_ids[i] == k ? va : tr).push_back(i);
        train[k] = data.subset(tr);
        valid[k] = data.subset(va);
        detail::check_fold(train[k]);
    }

    res.curves.resize(R);
    for (Index r = 0; r < R; ++r) {
        auto& c = res.curves[r];
        c.rat = rats[r];
        auto th = rat_to_theta(rats[r], pen_full.d1_sq, pen_full.d2_sq);
        c.theta = th.theta;
        c.theta_indistinguishable = th.indistinguishable;
        c.fold_errors = Matrix::Zero(K, L);
    }
    Matrix fold_auc = Matrix::Constant(R * K, L, std::numeric_limits<double>::quiet_NaN());

    parallel_for(static_cast<std::size_t>(R * K), cv.threads, [&](std::size_t task) {
        const Index r = static_cast<Index>(task) / K, k = static_cast<Index>(task) % K;
        auto prep = prepare(train[k], layout, fc.standardize, fc.intercept);
        FitConfig f = fc;
        std::optional<GroupPenalty> own;
        if (cv.shared_svd) {
            f.theta = res.curves[r].theta;
        } else {
            own = build_penalty_for(prep, layout, fc);
            f.rat = rats[r];
        }
        PathFit pf = fit_path(prep, layout, cv.shared_svd ? pen_full : *own, f);
        const Dataset& va = valid[k];
        const Vector w = va.effective_weights();
        const double wsum = w.sum();
        for (Index l = 0; l < L; ++l) {
            const Vector eta = pf.predict(va.X, l);
            double err = 0.0;
            if (data.family == Family::gaussian) {
                err = w.dot((va.y - eta).array().square().matrix()) / wsum;
            } else {
                err = binomial_deviance(va.y, eta, w) / wsum;
                const bool both = (va.y.array() == 1.0).any() && (va.y.array() == 0.0).any();
                if (both) fold_auc(r * K + k, l) = auc(eta, va.y);
            }
            res.curves[r].fold_errors(k, l) = err;
        }
    });

    const double kd = static_cast<double>(K);
    for (Index r = 0; r < R; ++r) {
        auto& c = res.curves[r];
        c.mean_error = c.fold_errors.colwise().mean().transpose();
        c.se.resize(L);
        for (Index l = 0; l < L; ++l) {
            const double m = c.mean_error(l);
            const double ss = (c.fold_errors.col(l).array() - m).square().sum();
            c.se(l) = std::sqrt(ss / (kd - 1.0)) / std::sqrt(kd);
        }
        if (data.family == Family::binomial) {
            c.mean_auc.resize(L);
            for (Index l = 0; l < L; ++l) {
                double s = 0.0, cnt = 0.0;
                for (Index k = 0; k < K; ++k) {
                    const double a = fold_auc(r * K + k, l);
                    if (!std::isnan(a)) {
                        s += a;
                        cnt += 1.0;
                    }
                }
                c.mean_auc(l) = cnt > 0 ? s / cnt : std::numeric_limits<double>::quiet_NaN();
            }
        }
        std::tie(c.idx_min, c.idx_1se) = detail::select_lambda(c.mean_error, c.se);
    }
    res.best = 0;
    for (Index r = 1; r < R; ++r) {
        if (res.curves[r].mean_error(res.curves[r].idx_min)
            < res.curves[res.best].mean_error(res.curves[res.best].idx_min)) {
            res.best = r;
        }
    }
    const auto& bc = res.curves[res.best];
    res.chosen_rat = bc.rat;
    res.chosen_theta = bc.theta;
    res.chosen_lambda_min = res.lambda_grid[bc.idx_min];
    res.chosen_lambda_1se = res.lambda_grid[bc.idx_1se];

    if (cv.keep_full_fits) {
        res.full_fits.resize(R);
        parallel_for(static_cast<std::size_t>(R), cv.threads, [&](std::size_t r) {
            FitConfig f = fc;
            f.theta = res.curves[r].theta;
            f.compute_df = base.compute_df;
            res.full_fits[r] = fit_path(prep_full, layout, pen_full, f);
            res.full_fits[r].rat = res.curves[r].rat;
        });
    }
    return res;
}

/// Principal components regression with the rank chosen by cross-validation.
struct PcrResult
{
    Index rank = 0;
    Vector cv_error;          // per rank 0..max_rank
    Vector beta;              // original columns
    double intercept = 0.0;

    Vector predict(const Matrix& X) const
    {
        Vector eta = X * beta;
        eta.array() += intercept;
        return eta;
    }
};

namespace detail {

/// Coefficients of rank-0..max_rank PC regressions on centered data, as columns.
inline Matrix pcr_coefficients(const Matrix& Xc, const Vector& yc, Index max_rank)
{
    Eigen::BDCSVD<Matrix> svd(Xc, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& d = svd.singularValues();
    Index rank = 0;
    for (Index j = 0; j < d.size(); ++j) {
        if (d(j) > 1e-10 * d(0)) ++rank;
    }
    const Index top = std::min(max_rank, rank);
    Matrix B = Matrix::Zero(Xc.cols(), max_rank + 1);
    const Vector uty = svd.matrixU().leftCols(top).transpose() * yc;
    for (Index r = 1; r <= max_rank; ++r) {
        B.col(r) = B.col(r - 1);
        if (r <= top) B.col(r) += svd.matrixV().col(r - 1) * (uty(r - 1) / d(r - 1));
    }
    return B;
}

} // namespace detail

/**
 * Gaussian PC regression on centered (unscaled) columns; ranks 0..max_rank
 * are compared by mean squared validation error over the given folds.
 */
inline PcrResult pcr_cv(const Dataset& data, const std::vector<Index>& fold_ids, Index n_folds,
                        std::optional<Index> max_rank = std::nullopt)
{
    data.validate();
    if (data.family != Family::gaussian) throw UsageError("PC regression supports gaussian data");
    if (data.weights.size()) throw UsageError("PC regression does not take observation weights");
    const Index n = data.n(), p = data.p();
    Index min_train = n;
    for (Index k = 0; k < n_folds; ++k) {
        Index cnt = 0;
        for (auto f : fold_ids) cnt += (f != k);
        min_train = std::min(min_train, cnt);
    }
    const Index R = std::min({max_rank.value_or(p), p, min_train - 1});
    if (R < 0) throw DataError("too few observations for PC regression");
    PcrResult out;
    out.cv_error = Vector::Zero(R + 1);
    for (Index k = 0; k < n_folds; ++k) {
        IndexList tr, va;
        for (Index i = 0; i < n; ++i) (fold_ids[i] == k ? va : tr).push_back(i);
        auto dtr = data.subset(tr), dva = data.subset(va);
        const Vector xm = dtr.X.colwise().mean().transpose();
        const double ym = dtr.y.mean();
        Matrix Xc = dtr.X.rowwise() - xm.transpose();
        Vector yc = dtr.y.array() - ym;
        Matrix B = detail::pcr_coefficients(Xc, yc, R);
        Matrix Xv = dva.X.rowwise() - xm.transpose();
        Matrix pred = Xv * B;
        pred.array() += ym;
        for (Index r = 0; r <= R; ++r) {
            out.cv_error(r) += (dva.y - pred.col(r)).squaredNorm() / static_cast<double>(va.size());
        }
    }
    out.cv_error /= static_cast<double>(n_folds);
    out.cv_error.minCoeff(&out.rank);
    const Vector xm = data.X.colwise().mean().transpose();
    const double ym = data.y.mean();
    Matrix Xc = data.X.rowwise() - xm.transpose();
    Vector yc = data.y.array() - ym;
    Matrix B = detail::pcr_coefficients(Xc, yc, out.rank);
    out.beta = B.col(out.rank);
    out.intercept = ym - xm.dot(out.beta);
    return out;
}

} // namespace pclasso
