#pragma once
#include <pclasso/data.hpp>
#include <pclasso/layout.hpp>
#include <pclasso/penalty.hpp>
#include <pclasso/solver/gaussian.hpp>
#include <pclasso/solver/logistic.hpp>
#include <pclasso/solver/path_types.hpp>

namespace pclasso {

/// Path on a prepared problem, dispatching on family.
inline PathFit fit_path(const PreparedProblem& prep, const GroupLayout& layout,
                        const GroupPenalty& penalty, const FitConfig& cfg)
{
    if (penalty.dim() != prep.p()) throw UsageError("penalty was built for a different layout");
    return prep.family == Family::gaussian ? fit_gaussian_path(prep, layout, penalty, cfg)
                                           : fit_logistic_path(prep, layout, penalty, cfg);
}

/// Path on raw data with a precomputed penalty (e.g. shared across CV folds).
inline PathFit fit_path(const Dataset& data, const GroupLayout& layout,
                        const GroupPenalty& penalty, const FitConfig& cfg)
{
    cfg.validate();
    if (data.p() != layout.n_original()) throw DataError("layout does not match the design columns");
    auto prep = prepare(data, layout, cfg.standardize, cfg.intercept);
    return fit_path(prep, layout, penalty, cfg);
}

/// Prepare, build the penalty from the data itself, and fit the path.
inline PathFit fit(const Dataset& data, const GroupLayout& layout, const FitConfig& cfg)
{
    cfg.validate();
    if (data.p() != layout.n_original()) throw DataError("layout does not match the design columns");
    auto prep = prepare(data, layout, cfg.standardize, cfg.intercept);
    auto penalty = build_penalty_for(prep, layout, cfg);
    return fit_path(prep, layout, penalty, cfg);
}

} // namespace pclasso
