// Simulate grouped data, cross-validate over rat, and report test error
// against the plain lasso.
#include <cstdio>
#include <pclasso/pclasso.hpp>

using namespace pclasso;

int main()
{
    SimSpec spec;
    spec.n = 100;
    spec.sizes = {20, 20, 20};
    spec.rho = 0.5;
    spec.n_ev = 2;
    spec.active_groups = {0};
    spec.snr = 2.0;
    spec.n_test = 1000;
    spec.seed = 7;
    const SimData sim = simulate(spec);

    Dataset data;
    data.X = sim.X_train;
    data.y = sim.y_train;

    CVConfig cv;
    cv.n_folds = 5;
    cv.rat_grid = {0.25, 0.5, 0.75, 1.0};
    cv.fold_seed = 7;
    FitConfig fit_cfg;
    fit_cfg.n_lambda = 50;
    const CVResult res = kfold_cv(data, sim.layout, cv, fit_cfg);

    auto mse = [&](Index curve, Index l) {
        const Vector pred = res.full_fits[curve].predict(sim.X_test, l);
        return (pred - sim.signal_test).squaredNorm() / static_cast<double>(pred.size());
    };
    const auto& best = res.best_curve();
    const Index lasso = *res.curve_for_rat(1.0);
    std::printf("chosen rat %.2f (theta %.4g), lambda.min %.4g\n", res.chosen_rat,
                res.chosen_theta, res.chosen_lambda_min);
    const double e_pc = mse(res.best, best.idx_min);
    const double e_lasso = mse(lasso, res.curves[lasso].idx_min);
    std::printf("test MSE  pclasso %.4f  lasso %.4f\n", e_pc, e_lasso);

    const PathFit& f = res.full_fits[res.best];
    std::printf("df at lambda.min: %.3f with %zu active\n", f.df_estimates(best.idx_min),
                f.active_sets[best.idx_min].size());
    return std::isfinite(e_pc) && std::isfinite(e_lasso) ? 0 : 1;
}
