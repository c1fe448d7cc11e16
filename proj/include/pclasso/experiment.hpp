#pragma once
#include <cstdint>
#include <string>
#include <vector>
#include <pclasso/crossval.hpp>
#include <pclasso/simgen.hpp>
#include <pclasso/solver/path.hpp>

namespace pclasso {

/// One (method, seed) outcome of a simulation cell.
struct ExperimentRow
{
    std::string method;
    std::uint64_t seed = 0;
    double mse = 0.0;            // mean (yhat_test - signal_test)^2
    Index support_size = 0;      // nonzero original coefficients
    double chosen_rat = 1.0;     // pcLasso rows; 1 for the rest
};

inline const std::vector<std::string>& experiment_methods()
{
    static const std::vector<std::string> m{"pclasso-min", "pclasso-1se", "lasso-min",
                                            "lasso-1se",   "pcr-cv",      "null"};
    return m;
}

namespace detail {

inline double test_mse(const Vector& pred, const Vector& signal)
{
    return (pred - signal).squaredNorm() / static_cast<double>(signal.size());
}

inline Index support(const Vector& beta)
{
    return static_cast<Index>((beta.array() != 0.0).count());
}

} // namespace detail

/**
 * Simulate one seed of a cell and score every method on the test set. The
 * lasso rows use the rat = 1 curve of the same CV run (identical folds and
 * lambda grid), which is added to the rat grid when missing.
 */
inline std::vector<ExperimentRow> run_experiment_seed(SimSpec spec, std::uint64_t seed,
                                                      CVConfig cv, const FitConfig& fit_cfg)
{
    spec.seed = seed;
    if (spec.n_test < 1) throw UsageError("experiments need test data (n_test >= 1)");
    const SimData sim = simulate(spec);
    Dataset data;
    data.X = sim.X_train;
    data.y = sim.y_train;

    bool has_one = false;
    for (double r : cv.rat_grid) has_one = has_one || r == 1.0;
    if (!has_one) cv.rat_grid.push_back(1.0);
    cv.fold_seed = seed;
    cv.keep_full_fits = true;
    FitConfig fc = fit_cfg;
    fc.compute_df = false;
    const CVResult res = kfold_cv(data, sim.layout, cv, fc);

    std::vector<ExperimentRow> rows;
    auto add = [&](const std::string& method, const Vector& pred, Index supp, double rat) {
        rows.push_back({method, seed, detail::test_mse(pred, sim.signal_test), supp, rat});
    };
    auto add_path = [&](const std::string& method, Index curve, Index l) {
        const PathFit& pf = res.full_fits[curve];
        add(method, pf.predict(sim.X_test, l), detail::support(pf.betas.col(l)),
            res.curves[curve].rat);
    };
    const auto& best = res.best_curve();
    add_path("pclasso-min", res.best, best.idx_min);
    add_path("pclasso-1se", res.best, best.idx_1se);
    const Index lasso = *res.curve_for_rat(1.0);
    add_path("lasso-min", lasso, res.curves[lasso].idx_min);
    add_path("lasso-1se", lasso, res.curves[lasso].idx_1se);

    const PcrResult pcr = pcr_cv(data, res.fold_ids, cv.n_folds);
    add("pcr-cv", pcr.predict(sim.X_test), detail::support(pcr.beta), 1.0);

    add("null", Vector::Constant(sim.signal_test.size(), data.y.mean()), 0, 1.0);
    return rows;
}

/// All seeds of a cell, in seed order.
inline std::vector<ExperimentRow> run_experiment(const SimSpec& spec,
                                                 const std::vector<std::uint64_t>& seeds,
                                                 const CVConfig& cv, const FitConfig& fit_cfg,
                                                 unsigned threads = 1)
{
    std::vector<std::vector<ExperimentRow>> per(seeds.size());
    CVConfig inner = cv;
    if (threads > 1) inner.threads = 1;
    parallel_for(seeds.size(), threads,
                 [&](std::size_t s) { per[s] = run_experiment_seed(spec, seeds[s], inner, fit_cfg); });
    std::vector<ExperimentRow> out;
    for (auto& v : per) out.insert(out.end(), v.begin(), v.end());
    return out;
}

} // namespace pclasso
