#pragma once
#include <cmath>
#include <string>
#include <vector>
#include <pclasso/core.hpp>
#include <pclasso/layout.hpp>

namespace pclasso {

/// Response, design and observation weights for one fitting problem.
struct Dataset
{
    Matrix X;                 // n x p, original columns
    Vector y;
    Vector weights;           // empty means unit weights
    Family family = Family::gaussian;
    std::vector<std::string> column_names;

    Index n() const { return X.rows(); }
    Index p() const { return X.cols(); }

    Vector effective_weights() const
    {
        return weights.size() == 0 ? Vector::Ones(n()) : weights;
    }

    /// Throws DataError when the dataset violates its invariants.
    void validate() const
    {
        if (X.rows() == 0 || X.cols() == 0) throw DataError("empty design matrix");
        if (y.size() != X.rows()) {
            throw DataError("response has " + std::to_string(y.size()) + " entries, design has "
                            + std::to_string(X.rows()) + " rows");
        }
        if (!X.allFinite()) throw DataError("design matrix contains NaN or Inf");
        if (!y.allFinite()) throw DataError("response contains NaN or Inf");
        if (weights.size() != 0) {
            if (weights.size() != X.rows()) throw DataError("weight vector has wrong length");
            if (!weights.allFinite() || (weights.array() < 0.0).any()) {
                throw DataError("observation weights must be finite and non-negative");
            }
            if (!(weights.sum() > 0.0)) throw DataError("observation weights sum to zero");
        }
        if (family == Family::binomial) {
            for (Index i = 0; i < y.size(); ++i) {
                if (y(i) != 0.0 && y(i) != 1.0) {
                    throw DataError("binomial response must be 0 or 1");
                }
            }
        }
    }

    /// Rows selected by index, keeping family and names.
    Dataset subset(const IndexList& rows) const
    {
        Dataset out;
        out.family = family;
        out.column_names = column_names;
        out.X.resize(static_cast<Index>(rows.size()), p());
        out.y.resize(static_cast<Index>(rows.size()));
        if (weights.size()) out.weights.resize(static_cast<Index>(rows.size()));
        for (size_t i = 0; i < rows.size(); ++i) {
            out.X.row(static_cast<Index>(i)) = X.row(rows[i]);
            out.y(static_cast<Index>(i)) = y(rows[i]);
            if (weights.size()) out.weights(static_cast<Index>(i)) = weights(rows[i]);
        }
        return out;
    }
};

/**
 * Dataset after expansion, centering and scaling. All solver arithmetic
 * happens in this space: X has expanded columns, weights are normalized to
 * sum to n, and for the gaussian family y is centered.
 */
struct PreparedProblem
{
    Family family = Family::gaussian;
    Matrix X;
    Vector y;
    Vector w;
    bool intercept = true;
    bool unit_weights = true;
    double y_mean = 0.0;
    Vector x_mean;
    Vector x_scale;
    std::vector<bool> excluded;   // zero-variance columns, held at zero

    Index n() const { return X.rows(); }
    Index p() const { return X.cols(); }
};

/**
 * Expand columns per the layout, center with the normalized weights (when
 * fitting an intercept) and scale to unit weighted variance (when
 * standardizing). Without an intercept, scaling uses the uncentered second
 * moment.
 */
inline PreparedProblem prepare(const Dataset& data, const GroupLayout& layout, bool standardize,
                               bool intercept)
{
    data.validate();
    PreparedProblem prep;
    prep.family = data.family;
    prep.intercept = intercept;
    const Index n = data.n();
    Vector w = data.effective_weights();
    prep.unit_weights = (w.array() == 1.0).all();
    w *= static_cast<double>(n) / w.sum();
    prep.w = w;

    prep.X = layout.expand_columns(data.X);
    const Index p = prep.X.cols();
    prep.x_mean = Vector::Zero(p);
    prep.x_scale = Vector::Ones(p);
    prep.excluded.assign(p, false);
    const double nd = static_cast<double>(n);

    for (Index j = 0; j < p; ++j) {
        auto col = prep.X.col(j);
        if (intercept) {
            prep.x_mean(j) = w.dot(col) / nd;
            col.array() -= prep.x_mean(j);
        }
        const double ms = w.dot(col.cwiseProduct(col)) / nd;
        if (!(ms > 0.0) || ms < 1e-28 * (1.0 + prep.x_mean(j) * prep.x_mean(j))) {
            prep.excluded[j] = true;
            col.setZero();
            continue;
        }
        if (standardize) {
            prep.x_scale(j) = std::sqrt(ms);
            col /= prep.x_scale(j);
        }
    }

    prep.y = data.y;
    if (data.family == Family::gaussian && intercept) {
        prep.y_mean = w.dot(data.y) / nd;
        prep.y.array() -= prep.y_mean;
    }
    return prep;
}

} // namespace pclasso
