#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>
#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <pclasso/core.hpp>
#include <pclasso/layout.hpp>
#include <pclasso/rng.hpp>

namespace pclasso {

enum class Court { home, neutral, hostile };

inline const char* to_string(Court c)
{
    switch (c) {
    case Court::home: return "home";
    case Court::neutral: return "neutral";
    case Court::hostile: return "hostile";
    }
    return "?";
}

inline Court court_from_string(const std::string& s)
{
    if (s == "home") return Court::home;
    if (s == "neutral") return Court::neutral;
    if (s == "hostile") return Court::hostile;
    throw UsageError("unknown court '" + s + "' (expected home, neutral or hostile)");
}

/// Grouped-design simulation settings.
struct SimSpec
{
    Index n = 200;
    std::vector<Index> sizes{50};
    double rho = 0.0;
    Index n_ev = 1;
    Court court = Court::home;
    std::vector<Index> active_groups{0};
    std::vector<Vector> b;     // per group, length n_ev; empty: 2 for active groups, else 0
    double snr = 1.0;
    Index n_test = 5000;
    std::uint64_t seed = 0;

    Index n_groups() const { return static_cast<Index>(sizes.size()); }
    Index p() const { return std::accumulate(sizes.begin(), sizes.end(), Index{0}); }

    void validate() const
    {
        if (n < 2) throw UsageError("simulation needs n >= 2");
        if (sizes.empty()) throw UsageError("simulation needs at least one group");
        for (auto s : sizes) {
            if (s < 1) throw UsageError("group sizes must be positive");
        }
        if (!(rho >= 0.0 && rho < 1.0)) throw UsageError("rho must lie in [0, 1)");
        if (!(snr > 0.0)) throw UsageError("snr must be positive");
        if (n_ev < 1) throw UsageError("n_ev must be at least 1");
        if (n_test < 0) throw UsageError("n_test must be non-negative");
        for (auto k : active_groups) {
            if (k < 0 || k >= n_groups()) throw UsageError("active group index out of range");
        }
        if (!b.empty()) {
            if (static_cast<Index>(b.size()) != n_groups()) {
                throw UsageError("b needs one coefficient vector per group");
            }
            for (const auto& bk : b) {
                if (bk.size() != n_ev) throw UsageError("each b_k must have n_ev entries");
            }
        }
    }

    /// Coefficients per group after applying the default.
    std::vector<Vector> coefficients() const
    {
        if (!b.empty()) return b;
        std::vector<Vector> out(sizes.size(), Vector::Zero(n_ev));
        for (auto k : active_groups) out[k].setConstant(2.0);
        return out;
    }
};

struct SimData
{
    Matrix X_train;
    Vector y_train;
    Vector signal_train;
    Matrix X_test;
    Vector signal_test;
    std::vector<IndexList> chosen_columns;   // right-singular-vector indices per group
    std::vector<Matrix> W;                   // p_k x n_ev
    std::vector<Vector> b;
    double noise_variance = 0.0;
    GroupLayout layout;
};

/// Equicorrelation matrix rho 11^T + (1 - rho) I.
inline Matrix equicorrelation(Index size, double rho)
{
    Matrix S = Matrix::Constant(size, size, rho);
    S.diagonal().setOnes();
    return S;
}

/**
 * Per-group design blocks with rows iid N(0, Sigma_k). Block k draws from
 * its own substream of `stream`, so groups are independent and reproducible.
 */
inline std::vector<Matrix> gen_design(const SimSpec& spec, Index rows, Stream stream = Stream::design)
{
    spec.validate();
    std::vector<Matrix> blocks;
    blocks.reserve(spec.sizes.size());
    for (Index k = 0; k < spec.n_groups(); ++k) {
        const Index pk = spec.sizes[k];
        CounterRng rng(spec.seed, stream, static_cast<std::uint64_t>(k));
        Matrix Z(rows, pk);
        fill_standard_normal(Z, rng);
        if (spec.rho != 0.0) {
            Eigen::LLT<Matrix> llt(equicorrelation(pk, spec.rho));
            Z = (Z * llt.matrixU()).eval();
        }
        blocks.push_back(std::move(Z));
    }
    return blocks;
}

inline Matrix concat_blocks(const std::vector<Matrix>& blocks)
{
    Index rows = blocks.empty() ? 0 : blocks.front().rows(), cols = 0;
    for (const auto& B : blocks) cols += B.cols();
    Matrix X(rows, cols);
    Index c = 0;
    for (const auto& B : blocks) {
        X.middleCols(c, B.cols()) = B;
        c += B.cols();
    }
    return X;
}

/// Right-singular-vector columns forming the signal, per court.
inline IndexList choose_columns(Court court, Index rank, Index n_ev, std::uint64_t seed, Index group)
{
    if (n_ev > rank) {
        throw UsageError("n_ev = " + std::to_string(n_ev) + " exceeds the rank "
                         + std::to_string(rank) + " of group " + std::to_string(group));
    }
    IndexList idx;
    switch (court) {
    case Court::home:
        for (Index j = 0; j < n_ev; ++j) idx.push_back(j);
        break;
    case Court::hostile:
        for (Index j = rank - n_ev; j < rank; ++j) idx.push_back(j);
        break;
    case Court::neutral: {
        IndexList all(rank);
        std::iota(all.begin(), all.end(), Index{0});
        CounterRng rng(seed, Stream::column_choice, static_cast<std::uint64_t>(group));
        for (Index j = 0; j < n_ev; ++j) {
            std::uniform_int_distribution<Index> pick(j, rank - 1);
            std::swap(all[j], all[pick(rng)]);
        }
        idx.assign(all.begin(), all.begin() + n_ev);
        std::sort(idx.begin(), idx.end());
        break;
    }
    }
    return idx;
}

struct ResponseDraw
{
    Vector y;
    Vector signal;
    double noise_variance = 0.0;
    std::vector<IndexList> chosen_columns;
    std::vector<Matrix> W;
};

/**
 * Signal sum_k X_k W_k b_k with W_k taken from the SVD of each training
 * block, and y = signal + N(0, V), V = sum_k b_k^T W_k^T Sigma_k W_k b_k / snr.
 */
inline ResponseDraw gen_response(const std::vector<Matrix>& blocks, const SimSpec& spec)
{
    spec.validate();
    if (static_cast<Index>(blocks.size()) != spec.n_groups()) {
        throw UsageError("design blocks do not match the spec's groups");
    }
    const auto b = spec.coefficients();
    const Index n = blocks.front().rows();
    ResponseDraw out;
    out.signal = Vector::Zero(n);
    double var_signal = 0.0;
    for (Index k = 0; k < spec.n_groups(); ++k) {
        const Matrix& Xk = blocks[k];
        Eigen::BDCSVD<Matrix> svd(Xk, Eigen::ComputeThinV);
        const Vector& d = svd.singularValues();
        Index rank = 0;
        for (Index j = 0; j < d.size(); ++j) {
            if (d(j) > 1e-10 * d(0)) ++rank;
        }
        auto cols = choose_columns(spec.court, rank, spec.n_ev, spec.seed, k);
        Matrix Wk(Xk.cols(), spec.n_ev);
        for (Index j = 0; j < spec.n_ev; ++j) Wk.col(j) = svd.matrixV().col(cols[j]);
        const Vector coef = Wk * b[k];
        if (b[k].cwiseAbs().maxCoeff() > 0.0) {
            out.signal.noalias() += Xk * coef;
            var_signal += coef.dot(equicorrelation(Xk.cols(), spec.rho) * coef);
        }
        out.chosen_columns.push_back(std::move(cols));
        out.W.push_back(std::move(Wk));
    }
    if (!(var_signal > 0.0)) throw UsageError("zero-signal SNR undefined: every b_k is zero");
    out.noise_variance = var_signal / spec.snr;
    CounterRng rng(spec.seed, Stream::noise);
    Vector eps(n);
    fill_standard_normal(eps, rng);
    out.y = out.signal + std::sqrt(out.noise_variance) * eps;
    return out;
}

/// Fresh test blocks and their signal, reusing the training W_k.
inline std::pair<Matrix, Vector> gen_test(const SimSpec& spec, const std::vector<Matrix>& W,
                                          const std::vector<Vector>& b)
{
    if (spec.n_test == 0) return {Matrix(0, spec.p()), Vector(0)};
    auto blocks = gen_design(spec, spec.n_test, Stream::test_design);
    Vector signal = Vector::Zero(spec.n_test);
    for (Index k = 0; k < spec.n_groups(); ++k) signal.noalias() += blocks[k] * (W[k] * b[k]);
    return {concat_blocks(blocks), signal};
}

inline SimData simulate(const SimSpec& spec)
{
    spec.validate();
    auto blocks = gen_design(spec, spec.n);
    auto resp = gen_response(blocks, spec);
    SimData out;
    out.X_train = concat_blocks(blocks);
    out.y_train = std::move(resp.y);
    out.signal_train = std::move(resp.signal);
    out.noise_variance = resp.noise_variance;
    out.chosen_columns = std::move(resp.chosen_columns);
    out.W = std::move(resp.W);
    out.b = spec.coefficients();
    std::tie(out.X_test, out.signal_test) = gen_test(spec, out.W, out.b);
    out.layout = GroupLayout::contiguous(spec.sizes);
    return out;
}

} // namespace pclasso
