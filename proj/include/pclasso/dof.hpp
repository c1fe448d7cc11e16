#pragma once
#include <algorithm>
#include <cmath>
#include <vector>
#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <pclasso/core.hpp>
#include <pclasso/penalty.hpp>

namespace pclasso {

/// Degrees-of-freedom estimate at one path point.
struct DfEstimate
{
    double lambda = 0.0;
    double theta = 0.0;
    IndexList active_set;
    double df_hat = 0.0;
    /// More than one group: the formula is applied to the block-diagonal A
    /// without the single-group guarantee.
    bool heuristic = false;
};

/**
 * tr[(G + theta A)^+ G] for symmetric PSD G, A. Uses a Cholesky solve when
 * the regularized matrix is well conditioned and an eigen-decomposition
 * pseudo-inverse otherwise.
 */
inline double regularized_hat_trace(const Matrix& G, const Matrix& A, double theta)
{
    const Index m = G.rows();
    if (m == 0) return 0.0;
    Matrix M = G + theta * A;
    M = 0.5 * (M + M.transpose()).eval();
    const double scale = std::max(M.diagonal().maxCoeff(), 0.0);
    if (!(scale > 0.0)) return 0.0;

    Eigen::LLT<Matrix> llt(M);
    if (llt.info() == Eigen::Success) {
        const Vector ld = Matrix(llt.matrixL()).diagonal();
        const double lmin = ld.minCoeff(), lmax = ld.maxCoeff();
        if (lmin * lmin > 1e-12 * lmax * lmax) {
            return llt.solve(G).trace();
        }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(M);
    const Vector& ev = es.eigenvalues();
    const Matrix& Q = es.eigenvectors();
    const double tol = 1e-12 * std::max(ev.maxCoeff(), 0.0) * static_cast<double>(m);
    double tr = 0.0;
    for (Index i = 0; i < m; ++i) {
        if (ev(i) > tol) tr += Q.col(i).dot(G * Q.col(i)) / ev(i);
    }
    return tr;
}

/**
 * Unbiased degrees of freedom of the pcLasso fit,
 * tr[X_A (X_A^T W X_A + theta A_AA)^+ X_A^T W], from a precomputed weighted
 * Gram matrix X^T W X.
 */
inline DfEstimate df_estimate_from_gram(const Matrix& gram, const GroupPenalty& penalty,
                                        double theta, const IndexList& active_set)
{
    DfEstimate out;
    out.theta = theta;
    out.active_set = active_set;
    out.heuristic = penalty.n_groups() > 1;
    const Index m = static_cast<Index>(active_set.size());
    if (m == 0) return out;
    Matrix G(m, m);
    for (Index a = 0; a < m; ++a) {
        for (Index b = 0; b < m; ++b) G(a, b) = gram(active_set[a], active_set[b]);
    }
    out.df_hat = regularized_hat_trace(G, penalty_submatrix(penalty, active_set), theta);
    return out;
}

/// As df_estimate_from_gram, forming X_A^T W X_A directly (w empty: unit weights).
inline DfEstimate df_estimate(const Matrix& X, const GroupPenalty& penalty, double theta,
                              const IndexList& active_set, const Vector& w = Vector())
{
    DfEstimate out;
    out.theta = theta;
    out.active_set = active_set;
    out.heuristic = penalty.n_groups() > 1;
    const Index m = static_cast<Index>(active_set.size());
    if (m == 0) return out;
    Matrix XA(X.rows(), m);
    for (Index a = 0; a < m; ++a) XA.col(a) = X.col(active_set[a]);
    if (!(XA.array() != 0.0).any()) return out;
    Matrix G = w.size() ? Matrix(XA.transpose() * w.asDiagonal() * XA)
                        : Matrix(XA.transpose() * XA);
    out.df_hat = regularized_hat_trace(G, penalty_submatrix(penalty, active_set), theta);
    return out;
}

} // namespace pclasso
