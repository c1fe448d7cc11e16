#pragma once
#include <algorithm>
#include <cmath>
#include <vector>
#include <Eigen/Cholesky>
#include <pclasso/core.hpp>
#include <pclasso/layout.hpp>
#include <pclasso/penalty.hpp>

namespace pclasso {

struct SolveStats
{
    Index sweeps = 0;
    bool converged = false;
};

/**
 * Weighted pcLasso coordinate descent on a fixed quadratic problem
 *
 *   1/2 sum_i w_i (z_i - b0 - x_i^T beta)^2 + lambda ||beta||_1
 *       + theta/2 sum_k beta_k^T A_k beta_k
 *
 * with an unpenalized intercept b0 (optional). Centering by the weighted
 * column means is implicit: the residual always satisfies sum_i w_i r_i = 0,
 * so each coordinate step is the exact joint minimizer over (beta_j, b0).
 *
 * The residual and the per-group products A_k beta_k are cached and
 * updated in O(n) and O(p_k) per coordinate change.
 */
class CoordinateDescent
{
public:
    CoordinateDescent(const Matrix& X, const Vector& w, const Vector& z, bool intercept,
                      const GroupPenalty& penalty, const GroupLayout& layout, double theta,
                      const Vector& beta_init, const std::vector<bool>* excluded = nullptr)
        : X_(X), w_(w), penalty_(penalty), theta_(theta), intercept_(intercept)
    {
        const Index n = X.rows(), p = X.cols();
        if (penalty.dim() != p || layout.n_expanded() != p) {
            throw UsageError("penalty and layout must match the design columns");
        }
        if (w.size() != n || z.size() != n || beta_init.size() != p) {
            throw UsageError("coordinate descent inputs have inconsistent sizes");
        }
        if (theta < 0.0) throw UsageError("theta must be non-negative");
        unit_weights_ = (w.array() == 1.0).all();
        w_sum_ = w.sum();
        if (!(w_sum_ > 0.0)) throw NumericalError("weights sum to zero");

        group_of_ = layout.column_groups();
        local_.resize(p);
        for (Index k = 0; k < layout.n_groups(); ++k) {
            for (Index l = 0; l < layout.group_size(k); ++l) local_[layout.group_start(k) + l] = l;
        }
        a_diag_ = penalty.diagonal();

        x_mean_ = Vector::Zero(p);
        v_.resize(p);
        for (Index j = 0; j < p; ++j) {
            auto col = X.col(j);
            const double sw = unit_weights_ ? col.sum() : w.dot(col);
            const double s2 = unit_weights_ ? col.squaredNorm() : w.dot(col.cwiseProduct(col));
            if (intercept) {
                x_mean_(j) = sw / w_sum_;
                v_(j) = std::max(0.0, s2 - w_sum_ * x_mean_(j) * x_mean_(j));
            } else {
                v_(j) = s2;
            }
        }
        excluded_.assign(p, false);
        if (excluded) excluded_ = *excluded;
        for (Index j = 0; j < p; ++j) {
            if (v_(j) == 0.0 && theta_ * a_diag_(j) == 0.0) excluded_[j] = true;
        }

        beta_ = beta_init;
        for (Index j = 0; j < p; ++j) {
            if (excluded_[j]) beta_(j) = 0.0;
        }
        const double z_mean = intercept ? (unit_weights_ ? z.sum() : w.dot(z)) / w_sum_ : 0.0;
        intercept_value_ = intercept ? z_mean - x_mean_.dot(beta_) : 0.0;
        r_ = z;
        r_.array() -= intercept_value_;
        for (Index j = 0; j < p; ++j) {
            if (beta_(j) != 0.0) r_.noalias() -= beta_(j) * X.col(j);
        }
        if (!unit_weights_) wr_ = w.cwiseProduct(r_);
        q_ = theta_ > 0.0 ? penalty.apply(beta_) : Vector::Zero(p);
    }

    Index p() const { return X_.cols(); }
    const Vector& beta() const { return beta_; }
    double intercept() const { return intercept_value_; }
    const Vector& residual() const { return r_; }
    const Vector& v() const { return v_; }
    const Vector& x_mean() const { return x_mean_; }
    double theta() const { return theta_; }
    bool is_excluded(Index j) const { return excluded_[j]; }

    /// (A beta)_j from the cache; zero when theta = 0.
    double penalty_product(Index j) const { return q_(j); }

    /// sum_i w_i (x_ij - xbar_j) r_i : negative partial derivative of the loss.
    double gradient(Index j) const
    {
        return unit_weights_ ? X_.col(j).dot(r_) : X_.col(j).dot(wr_);
    }

    /// Negative partial derivative of loss + quadratic penalty at beta.
    double smooth_gradient(Index j) const { return gradient(j) - theta_ * q_(j); }

    /// One cyclic pass over coords; returns max |delta beta_j| sqrt(v_j).
    double sweep(const IndexList& coords, double lambda)
    {
        double max_change = 0.0;
        for (auto j : coords) max_change = std::max(max_change, update(j, lambda));
        return max_change;
    }

    /**
     * Cycle to convergence over a working set: full passes alternate with
     * passes restricted to the nonzero coordinates until a full pass moves
     * no coordinate by more than tol (scaled). Slow active-set phases get a
     * sign-preserving Newton step (see newton_step).
     */
    SolveStats solve(double lambda, const IndexList& working, double tol, Index max_sweeps)
    {
        SolveStats st;
        IndexList active;
        while (true) {
            double m = sweep(working, lambda);
            ++st.sweeps;
            if (m < tol) {
                st.converged = true;
                return st;
            }
            if (st.sweeps >= max_sweeps) return st;
            active.clear();
            for (auto j : working) {
                if (beta_(j) != 0.0) active.push_back(j);
            }
            Index since_newton = 0;
            const Index newton_every = std::max<Index>(25, static_cast<Index>(active.size()));
            while (true) {
                m = sweep(active, lambda);
                ++st.sweeps;
                if (m < tol) break;
                if (st.sweeps >= max_sweeps) return st;
                if (++since_newton >= newton_every) {
                    since_newton = 0;
                    newton_step(active, lambda);
                    active.erase(std::remove_if(active.begin(), active.end(),
                                                [&](Index j) { return beta_(j) == 0.0; }),
                                 active.end());
                }
            }
        }
    }

    /**
     * Exact minimizer of the objective on the current sign face of `act`
     * (all coordinates nonzero): solve H delta = g - lambda s with
     * H = X~_A^T W X~_A + theta A_AA, then step as far toward it as signs
     * allow. The objective is a convex quadratic along the step, so it never
     * increases. Returns false when the system is too large or singular.
     */
    bool newton_step(const IndexList& act, double lambda)
    {
        const Index m = static_cast<Index>(act.size());
        if (m == 0 || m > max_newton_size) return false;
        Matrix Xa(X_.rows(), m);
        for (Index a = 0; a < m; ++a) {
            Xa.col(a) = X_.col(act[a]);
            if (intercept_) Xa.col(a).array() -= x_mean_(act[a]);
        }
        Matrix H = unit_weights_ ? Matrix(Xa.transpose() * Xa)
                                 : Matrix(Xa.transpose() * w_.asDiagonal() * Xa);
        if (theta_ > 0.0) H += theta_ * penalty_submatrix(penalty_, act);
        Vector rhs(m);
        for (Index a = 0; a < m; ++a) {
            const Index j = act[a];
            if (beta_(j) == 0.0) return false;
            rhs(a) = smooth_gradient(j) - lambda * (beta_(j) > 0.0 ? 1.0 : -1.0);
        }
        Eigen::LDLT<Matrix> ldlt(H);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return false;
        const Vector delta = ldlt.solve(rhs);
        if (!delta.allFinite() || (H * delta - rhs).norm() > 1e-8 * std::max(rhs.norm(), 1e-300)) {
            return false;
        }
        double t = 1.0;
        for (Index a = 0; a < m; ++a) {
            const double b = beta_(act[a]);
            if (b * (b + delta(a)) <= 0.0) t = std::min(t, -b / delta(a));
        }
        for (Index a = 0; a < m; ++a) {
            const Index j = act[a];
            const double b = beta_(j);
            const bool crosses = b * (b + delta(a)) <= 0.0 && -b / delta(a) <= t;
            const double nb = crosses ? 0.0 : b + t * delta(a);
            if (nb != b) apply_delta(j, nb - b);
        }
        return true;
    }

    /// Largest active set handled by newton_step.
    static constexpr Index max_newton_size = 1500;

    /// Weighted residual sum of squares, sum_i w_i r_i^2.
    double weighted_rss() const
    {
        return unit_weights_ ? r_.squaredNorm() : wr_.dot(r_);
    }

    double objective(double lambda) const
    {
        double val = 0.5 * weighted_rss() + lambda * beta_.lpNorm<1>();
        if (theta_ > 0.0) val += 0.5 * theta_ * beta_.dot(q_);
        return val;
    }

private:
    double update(Index j, double lambda)
    {
        if (excluded_[j]) return 0.0;
        const double bj = beta_(j);
        const double a = a_diag_(j);
        const double num_ls = gradient(j) + v_(j) * bj;
        double num = num_ls;
        double den = v_(j);
        if (theta_ > 0.0) {
            num -= theta_ * (q_(j) - a * bj);
            den += theta_ * a;
        }
        double nb;
        if (den <= 0.0) {
            if (std::abs(num) > lambda) throw NumericalError("degenerate coordinate");
            nb = 0.0;
        } else {
            nb = soft_threshold(num, lambda) / den;
        }
        const double delta = nb - bj;
        if (delta == 0.0) return 0.0;
        apply_delta(j, delta);
        const double scale = v_(j) > 0.0 ? v_(j) : den;
        return std::abs(delta) * std::sqrt(scale);
    }

    /// Move beta_j by delta, keeping residual, intercept and A beta in sync.
    void apply_delta(Index j, double delta)
    {
        beta_(j) += delta;
        auto col = X_.col(j);
        r_.noalias() -= delta * col;
        if (intercept_ && x_mean_(j) != 0.0) {
            r_.array() += delta * x_mean_(j);
            intercept_value_ -= delta * x_mean_(j);
        }
        if (!unit_weights_) {
            if (intercept_ && x_mean_(j) != 0.0) {
                wr_.array() -= delta * w_.array() * (col.array() - x_mean_(j));
            } else {
                wr_.array() -= delta * w_.array() * col.array();
            }
        }
        if (theta_ > 0.0) {
            const Index k = group_of_[j];
            const auto& A = penalty_.blocks[k].A;
            q_.segment(penalty_.starts[k], A.rows()).noalias() += delta * A.col(local_[j]);
        }
    }

    const Matrix& X_;
    const Vector& w_;
    const GroupPenalty& penalty_;
    double theta_;
    bool intercept_;
    bool unit_weights_ = true;
    double w_sum_ = 0.0;
    std::vector<Index> group_of_;
    std::vector<Index> local_;
    std::vector<bool> excluded_;
    Vector a_diag_;
    Vector x_mean_;
    Vector v_;
    Vector beta_;
    double intercept_value_ = 0.0;
    Vector r_;
    Vector wr_;
    Vector q_;
};

} // namespace pclasso
