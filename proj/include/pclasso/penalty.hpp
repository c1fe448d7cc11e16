#pragma once
#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>
#include <Eigen/Dense>
#include <Eigen/SVD>
#include <pclasso/core.hpp>
#include <pclasso/layout.hpp>

namespace pclasso {

/// Right singular vectors and positive singular values of one feature block.
struct GroupSVD
{
    Matrix V;   // p_k x m_k, orthonormal columns
    Vector d;   // m_k values, strictly positive, non-increasing

    Index rank() const { return d.size(); }
    Index dim() const { return V.rows(); }
};

/// Singular values below this fraction of d_1 are treated as zero.
inline constexpr double svd_drop_tolerance = 1e-10;

/**
 * Thin SVD of a (column-centered) block, truncated to its numerical rank
 * and optionally to max_rank.
 */
inline GroupSVD compute_group_svd(const Eigen::Ref<const Matrix>& Xk,
                                  std::optional<Index> max_rank = std::nullopt)
{
    if (max_rank && *max_rank < 1) throw UsageError("max_rank must be at least 1");
    if (Xk.cols() == 0) throw UsageError("empty feature block");

    Eigen::BDCSVD<Matrix> svd(Xk, Eigen::ComputeThinV);
    const Vector& sv = svd.singularValues();
    if (sv.size() == 0 || !(sv(0) > 0.0)) {
        throw NumericalError("degenerate group: no positive singular value");
    }
    const double cutoff = svd_drop_tolerance * sv(0);
    Index m = 0;
    while (m < sv.size() && sv(m) > cutoff) ++m;
    if (max_rank) m = std::min(m, *max_rank);

    GroupSVD out;
    out.d = sv.head(m);
    out.V = svd.matrixV().leftCols(m);
    return out;
}

/**
 * Quadratic penalty block for one group.
 *
 * A = scale * ( V diag(d_1^2 - d_j^2) V^T + d_1^2 (I - V V^T) ).
 * Directions outside the retained row space carry weight d_1^2, so that
 * A equals scale * (d_1^2 I - V diag(d^2) V^T). The leading right singular
 * vector is unpenalized.
 */
struct PenaltyBlock
{
    Matrix A;
    Vector diag;
    double scale = 1.0;
    double d1_sq = 0.0;
    GroupSVD svd;
};

inline PenaltyBlock build_penalty(const GroupSVD& svd, Index group_size, bool sqrt_pk_scaling)
{
    if (svd.dim() != group_size) {
        throw UsageError("GroupSVD dimension does not match group size");
    }
    PenaltyBlock blk;
    blk.svd = svd;
    blk.scale = sqrt_pk_scaling ? std::sqrt(static_cast<double>(group_size)) : 1.0;
    const double d1_sq = svd.d(0) * svd.d(0);
    blk.d1_sq = d1_sq;

    Vector gaps = (d1_sq - svd.d.array().square()).matrix();
    gaps(0) = 0.0;
    Matrix A = svd.V * gaps.asDiagonal() * svd.V.transpose();
    Matrix null_proj = Matrix::Identity(group_size, group_size) - svd.V * svd.V.transpose();
    A.noalias() += d1_sq * null_proj;
    A = 0.5 * (A + A.transpose()).eval();
    A *= blk.scale;
    blk.diag = A.diagonal();
    blk.A = std::move(A);
    return blk;
}

/// Top two squared singular values of a matrix (d2_sq = 0 for rank one).
inline std::pair<double, double> top_two_squared_singular_values(const Eigen::Ref<const Matrix>& X)
{
    Matrix G = X.rows() < X.cols() ? Matrix(X * X.transpose()) : Matrix(X.transpose() * X);
    Eigen::SelfAdjointEigenSolver<Matrix> es(G, Eigen::EigenvaluesOnly);
    const Vector& ev = es.eigenvalues();
    const Index m = ev.size();
    double d1 = m > 0 ? std::max(ev(m - 1), 0.0) : 0.0;
    double d2 = m > 1 ? std::max(ev(m - 2), 0.0) : 0.0;
    return {d1, d2};
}

/// Block-diagonal pcLasso quadratic penalty over all groups of a layout.
struct GroupPenalty
{
    std::vector<PenaltyBlock> blocks;
    std::vector<Index> starts;
    double d1_sq = 0.0;   // full-matrix top squared singular values, used for rat
    double d2_sq = 0.0;

    Index n_groups() const { return static_cast<Index>(blocks.size()); }
    Index dim() const
    {
        return blocks.empty() ? 0 : starts.back() + blocks.back().A.rows();
    }

    /// A * beta for the full block-diagonal matrix.
    Vector apply(const Eigen::Ref<const Vector>& beta) const
    {
        Vector out(beta.size());
        for (size_t k = 0; k < blocks.size(); ++k) {
            const Index s = starts[k], pk = blocks[k].A.rows();
            out.segment(s, pk).noalias() = blocks[k].A * beta.segment(s, pk);
        }
        return out;
    }

    double quadratic_form(const Eigen::Ref<const Vector>& beta) const
    {
        return beta.dot(apply(beta));
    }

    Matrix dense() const
    {
        Matrix out = Matrix::Zero(dim(), dim());
        for (size_t k = 0; k < blocks.size(); ++k) {
            const Index s = starts[k], pk = blocks[k].A.rows();
            out.block(s, s, pk, pk) = blocks[k].A;
        }
        return out;
    }

    Vector diagonal() const
    {
        Vector out(dim());
        for (size_t k = 0; k < blocks.size(); ++k) {
            out.segment(starts[k], blocks[k].diag.size()) = blocks[k].diag;
        }
        return out;
    }
};

/**
 * SVD and penalty block for every group of an expanded, preprocessed design.
 * Also records the top two squared singular values of the whole matrix.
 */
inline GroupPenalty build_group_penalty(const Eigen::Ref<const Matrix>& X_expanded,
                                        const GroupLayout& layout,
                                        std::optional<Index> max_rank = std::nullopt,
                                        bool sqrt_pk_scaling = false)
{
    if (X_expanded.cols() != layout.n_expanded()) {
        throw DataError("design columns do not match the expanded group layout");
    }
    GroupPenalty pen;
    pen.blocks.reserve(layout.n_groups());
    for (Index k = 0; k < layout.n_groups(); ++k) {
        const Index s = layout.group_start(k), pk = layout.group_size(k);
        GroupSVD svd;
        try {
            svd = compute_group_svd(X_expanded.middleCols(s, pk), max_rank);
        } catch (const NumericalError&) {
            throw NumericalError("degenerate group " + std::to_string(k)
                                 + ": all columns are constant");
        }
        pen.blocks.push_back(build_penalty(svd, pk, sqrt_pk_scaling));
        pen.starts.push_back(s);
    }
    std::tie(pen.d1_sq, pen.d2_sq) = top_two_squared_singular_values(X_expanded);
    return pen;
}

/// Shrinkage factor of the second principal component relative to the first.
inline double shrinkage_ratio(double theta, double d1_sq, double d2_sq)
{
    return d2_sq / (d2_sq + theta * (d1_sq - d2_sq));
}

struct ThetaResolution
{
    double theta = 0.0;
    /// The spectral gap is numerically zero, so every theta gives ratio 1.
    bool indistinguishable = false;
};

/// Invert shrinkage_ratio: the theta giving the requested ratio.
inline ThetaResolution rat_to_theta(double rat, double d1_sq, double d2_sq)
{
    if (!(rat > 0.0) || rat > 1.0) {
        throw UsageError("rat must lie in (0, 1], got " + std::to_string(rat));
    }
    if (d2_sq < 0.0 || d1_sq < d2_sq) {
        throw UsageError("rat_to_theta requires d1_sq >= d2_sq >= 0");
    }
    ThetaResolution out;
    if (rat == 1.0) return out;
    const double gap = d1_sq - d2_sq;
    if (gap < 1e-12 * d1_sq || d2_sq <= 0.0) {
        out.indistinguishable = true;
        return out;
    }
    out.theta = ((1.0 - rat) / rat) * d2_sq / gap;
    return out;
}

/// Rows/columns of the block-diagonal penalty restricted to an index set.
inline Matrix penalty_submatrix(const GroupPenalty& penalty, const IndexList& idx)
{
    const Index m = static_cast<Index>(idx.size());
    Matrix out = Matrix::Zero(m, m);
    std::vector<Index> grp(m), loc(m);
    for (Index a = 0; a < m; ++a) {
        auto it = std::upper_bound(penalty.starts.begin(), penalty.starts.end(), idx[a]);
        const Index k = static_cast<Index>(it - penalty.starts.begin()) - 1;
        grp[a] = k;
        loc[a] = idx[a] - penalty.starts[k];
    }
    for (Index a = 0; a < m; ++a) {
        for (Index b = 0; b < m; ++b) {
            if (grp[a] == grp[b]) out(a, b) = penalty.blocks[grp[a]].A(loc[a], loc[b]);
        }
    }
    return out;
}

/// lambda * ||beta||_1 + theta/2 * sum_k beta_k^T A_k beta_k  (expanded space).
inline double penalty_value(const Eigen::Ref<const Vector>& beta, double lambda, double theta,
                            const GroupPenalty& penalty, const GroupLayout& layout)
{
    if (beta.size() != layout.n_expanded() || penalty.dim() != layout.n_expanded()) {
        throw UsageError("coefficient vector is not conformable with the group layout");
    }
    double l1 = beta.lpNorm<1>();
    if (theta == 0.0) return lambda * l1;
    return lambda * l1 + 0.5 * theta * penalty.quadratic_form(beta);
}

} // namespace pclasso
