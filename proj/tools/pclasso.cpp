// pclasso command-line front end.
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <pclasso/io/csv.hpp>
#include <pclasso/io/model_json.hpp>
#include <pclasso/pclasso.hpp>

namespace {

using namespace pclasso;
using nlohmann::json;

enum ExitCode : int { ok = 0, usage = 2, data = 3, numerical = 4 };

struct FitOptions
{
    std::string data_path;
    std::string response = "y";
    std::string weights;
    std::string groups_path;
    std::string family = "gaussian";
    std::optional<double> rat;
    std::optional<double> theta;
    Index n_lambda = 100;
    std::optional<double> lambda_min_ratio;
    double tol = 1e-7;
    Index max_iter = 100000;
    bool no_standardize = false;
    bool no_intercept = false;
    bool no_strong_rules = false;
    bool sqrt_pk = false;
    std::optional<Index> max_rank;
};

void add_fit_options(CLI::App* sub, FitOptions& o)
{
    sub->add_option("--data", o.data_path, "training CSV with header")->required();
    sub->add_option("--response", o.response, "response column name")->capture_default_str();
    sub->add_option("--weights", o.weights, "observation weight column name");
    sub->add_option("--groups", o.groups_path, "group map CSV (original_column,group_id)");
    sub->add_option("--family", o.family, "gaussian or binomial")
        ->check(CLI::IsMember({"gaussian", "binomial"}))
        ->capture_default_str();
    auto* r = sub->add_option("--rat", o.rat, "shrinkage ratio in (0, 1]; default 1 (lasso)");
    auto* t = sub->add_option("--theta", o.theta, "quadratic penalty weight");
    r->excludes(t);
    sub->add_option("--n-lambda", o.n_lambda, "path length")->capture_default_str();
    sub->add_option("--lambda-min-ratio", o.lambda_min_ratio, "smallest lambda / lambda_max");
    sub->add_option("--tol", o.tol, "convergence tolerance (relative)")->capture_default_str();
    sub->add_option("--max-iter", o.max_iter, "sweep cap per lambda")->capture_default_str();
    sub->add_flag("--no-standardize", o.no_standardize, "fit on the raw column scale");
    sub->add_flag("--no-intercept", o.no_intercept, "fit without intercept");
    sub->add_flag("--no-strong-rules", o.no_strong_rules, "disable screening");
    sub->add_flag("--sqrt-pk", o.sqrt_pk, "scale each group's penalty by sqrt(p_k)");
    sub->add_option("--max-rank", o.max_rank, "truncate each group's SVD to this rank");
}

FitConfig fit_config(const FitOptions& o)
{
    FitConfig c;
    c.rat = o.rat;
    c.theta = o.theta;
    c.n_lambda = o.n_lambda;
    c.lambda_min_ratio = o.lambda_min_ratio;
    c.tol = o.tol;
    c.max_iter = o.max_iter;
    c.standardize = !o.no_standardize;
    c.intercept = !o.no_intercept;
    c.use_strong_rules = !o.no_strong_rules;
    c.sqrt_pk_scaling = o.sqrt_pk;
    c.max_rank = o.max_rank;
    c.validate();
    return c;
}

/// Output directory must exist before any work starts.
void require_writable(const std::string& path)
{
    if (path.empty()) return;
    namespace fs = std::filesystem;
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.empty() && !fs::is_directory(parent)) {
        throw UsageError("output directory does not exist: " + parent.string());
    }
}

struct LoadedProblem
{
    Dataset data;
    GroupLayout layout;
};

LoadedProblem load_problem(const FitOptions& o)
{
    io::require_readable(o.data_path, "data file");
    if (!o.groups_path.empty()) io::require_readable(o.groups_path, "group map");
    LoadedProblem lp;
    lp.data = io::load_dataset(o.data_path, o.response, family_from_string(o.family), o.weights);
    if (o.groups_path.empty()) {
        lp.layout = GroupLayout::single_group(lp.data.p());
    } else {
        lp.layout = GroupLayout::from_pairs(io::read_group_map(o.groups_path, lp.data.column_names),
                                            lp.data.p());
    }
    return lp;
}

std::string df_cell(double v) { return std::isfinite(v) ? io::format_double(v) : "NA"; }

// fit ----------------------------------------------------------------------

int cmd_fit(const FitOptions& o, const std::string& out, const std::string& path_csv)
{
    require_writable(out);
    require_writable(path_csv);
    const auto lp = load_problem(o);
    const PathFit f = fit(lp.data, lp.layout, fit_config(o));
    const auto model = io::to_stored(f, lp.data.column_names);

    io::CsvWriter w({"lambda", "df", "n_active", "objective"});
    for (Index l = 0; l < f.n_lambda(); ++l) {
        w.row(f.lambda_grid[l], df_cell(f.df_estimates(l)),
              static_cast<Index>(f.active_sets[l].size()), f.objective[l]);
    }
    io::save_model(out, model);
    if (!path_csv.empty()) w.save(path_csv);
    if (!f.all_converged()) {
        std::cerr << "warning: some path points did not converge (see convergence in the model)\n";
    }
    return ok;
}

// predict ------------------------------------------------------------------

int cmd_predict(const std::string& model_path, const std::string& data_path,
                std::optional<Index> index, std::optional<double> lambda, const std::string& out)
{
    io::require_readable(model_path, "model file");
    io::require_readable(data_path, "data file");
    require_writable(out);
    const auto m = io::load_model(model_path);
    const auto t = io::read_numeric_csv(data_path);

    std::vector<std::string> missing;
    IndexList cols;
    for (const auto& c : m.columns) {
        auto j = t.column(c);
        if (!j) {
            missing.push_back(c);
        } else {
            cols.push_back(*j);
        }
    }
    if (!missing.empty()) {
        std::string msg = "prediction data lacks model columns:";
        for (const auto& c : missing) msg += " " + c;
        throw DataError(msg);
    }
    Matrix X(t.values.rows(), static_cast<Index>(cols.size()));
    for (size_t k = 0; k < cols.size(); ++k) X.col(static_cast<Index>(k)) = t.values.col(cols[k]);

    Index l = m.n_lambda() - 1;
    if (index) {
        if (*index < 0 || *index >= m.n_lambda()) throw UsageError("lambda index out of range");
        l = *index;
    } else if (lambda) {
        double best = INFINITY;
        for (Index i = 0; i < m.n_lambda(); ++i) {
            const double d = std::abs(std::log(m.lambda[i]) - std::log(*lambda));
            if (d < best) {
                best = d;
                l = i;
            }
        }
    }
    const Vector eta = m.predict(X, l);
    const bool binom = m.family == Family::binomial;
    std::vector<std::string> head{"row", "lambda", "eta"};
    if (binom) head.push_back("probability");
    io::CsvWriter w(head);
    for (Index i = 0; i < eta.size(); ++i) {
        if (binom) {
            w.row(i, m.lambda[l], eta(i), 1.0 / (1.0 + std::exp(-eta(i))));
        } else {
            w.row(i, m.lambda[l], eta(i));
        }
    }
    w.save(out);
    return ok;
}

// cv -----------------------------------------------------------------------

int cmd_cv(const FitOptions& o, CVConfig cv, const std::string& out_csv, const std::string& out_json)
{
    require_writable(out_csv);
    require_writable(out_json);
    const auto lp = load_problem(o);
    FitConfig fc = fit_config(o);
    fc.compute_df = false;
    cv.keep_full_fits = false;
    const CVResult res = kfold_cv(lp.data, lp.layout, cv, fc);

    io::CsvWriter w({"rat", "lambda", "mean_error", "se"});
    for (const auto& c : res.curves) {
        for (size_t l = 0; l < res.lambda_grid.size(); ++l) {
            w.row(c.rat, res.lambda_grid[l], c.mean_error(static_cast<Index>(l)),
                  c.se(static_cast<Index>(l)));
        }
    }
    json j;
    j["family"] = to_string(res.family);
    j["n_folds"] = cv.n_folds;
    j["fold_seed"] = cv.fold_seed;
    j["shared_svd"] = res.shared_svd;
    j["criterion"] = res.family == Family::gaussian ? "mse" : "deviance";
    j["chosen_rat"] = res.chosen_rat;
    j["chosen_theta"] = res.chosen_theta;
    j["lambda_min"] = res.chosen_lambda_min;
    j["lambda_1se"] = res.chosen_lambda_1se;
    j["curves"] = json::array();
    for (const auto& c : res.curves) {
        json cj{{"rat", c.rat},
                {"theta", c.theta},
                {"theta_indistinguishable", c.theta_indistinguishable},
                {"min_error", c.mean_error(c.idx_min)},
                {"lambda_min", res.lambda_grid[c.idx_min]},
                {"lambda_1se", res.lambda_grid[c.idx_1se]}};
        if (res.family == Family::binomial && c.mean_auc.size() > 0) {
            const double a = c.mean_auc(c.idx_min);
            cj["auc_at_min"] = std::isfinite(a) ? json(a) : json(nullptr);
        }
        j["curves"].push_back(cj);
    }
    w.save(out_csv);
    if (!out_json.empty()) io::write_atomic(out_json, j.dump(1) + "\n");
    return ok;
}

// simulate -----------------------------------------------------------------

int cmd_simulate(const SimSpec& spec, const std::string& out, const std::string& test_out,
                 const std::string& groups_out)
{
    require_writable(out);
    require_writable(test_out);
    require_writable(groups_out);
    const SimData sim = simulate(spec);
    const Index p = sim.X_train.cols();
    std::vector<std::string> head;
    for (Index j = 0; j < p; ++j) head.push_back("x" + std::to_string(j + 1));

    auto table = [&](const Matrix& X, const Vector& last, const std::string& last_name) {
        auto h = head;
        h.push_back(last_name);
        io::CsvWriter w(h);
        std::vector<std::string> cells(static_cast<size_t>(p + 1));
        for (Index i = 0; i < X.rows(); ++i) {
            for (Index j = 0; j < p; ++j) cells[j] = io::format_double(X(i, j));
            cells[p] = io::format_double(last(i));
            w.row_strings(cells);
        }
        return w;
    };
    const auto train = table(sim.X_train, sim.y_train, "y");
    std::optional<io::CsvWriter> test;
    if (!test_out.empty()) {
        if (spec.n_test < 1) throw UsageError("--test-out needs --n-test >= 1");
        test = table(sim.X_test, sim.signal_test, "signal");
    }
    io::CsvWriter g({"original_column", "group_id"});
    for (Index e = 0; e < sim.layout.n_expanded(); ++e) {
        g.row(head[sim.layout.replication_map()[e]], "g" + std::to_string(sim.layout.column_groups()[e] + 1));
    }
    train.save(out);
    if (test) test->save(test_out);
    if (!groups_out.empty()) g.save(groups_out);
    return ok;
}

// experiment ---------------------------------------------------------------

SimSpec spec_from_json(const json& c)
{
    SimSpec s;
    s.n = c.value("n", s.n);
    s.sizes = c.value("sizes", s.sizes);
    s.rho = c.value("rho", s.rho);
    s.n_ev = c.value("n_ev", s.n_ev);
    s.court = court_from_string(c.value("court", std::string("home")));
    s.active_groups = c.value("active_groups", s.active_groups);
    s.snr = c.value("snr", s.snr);
    s.n_test = c.value("n_test", s.n_test);
    s.validate();
    return s;
}

int cmd_experiment(const std::string& spec_path, const std::string& out, unsigned threads)
{
    io::require_readable(spec_path, "experiment spec");
    require_writable(out);
    json j;
    {
        std::ifstream in(spec_path);
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw DataError(spec_path + ": not valid JSON (" + e.what() + ")");
        }
    }
    std::vector<std::pair<std::string, SimSpec>> cells;
    std::vector<std::uint64_t> seeds;
    CVConfig cv;
    FitConfig fc;
    try {
        for (const auto& c : j.at("cells")) {
            cells.emplace_back(c.value("name", "cell" + std::to_string(cells.size() + 1)),
                               spec_from_json(c));
        }
        if (j.contains("seeds")) {
            seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        } else {
            const auto first = j.value("first_seed", std::uint64_t{1});
            const auto count = j.value("n_seeds", std::uint64_t{30});
            for (std::uint64_t s = 0; s < count; ++s) seeds.push_back(first + s);
        }
        cv.rat_grid = j.value("rats", cv.rat_grid);
        cv.n_folds = j.value("folds", cv.n_folds);
        fc.tol = j.value("tol", 1e-4);
        fc.n_lambda = j.value("n_lambda", fc.n_lambda);
    } catch (const json::exception& e) {
        throw UsageError(std::string("invalid experiment spec: ") + e.what());
    }
    if (cells.empty() || seeds.empty()) throw UsageError("experiment spec needs cells and seeds");

    io::CsvWriter w({"cell", "seed", "method", "mse", "support_size", "chosen_rat"});
    for (const auto& [name, spec] : cells) {
        for (const auto& r : run_experiment(spec, seeds, cv, fc, threads)) {
            w.row(name, r.seed, r.method, r.mse, r.support_size, r.chosen_rat);
        }
    }
    w.save(out);
    return ok;
}

// df -----------------------------------------------------------------------

int cmd_df(const FitOptions& o, const std::string& out)
{
    require_writable(out);
    if (o.family != "gaussian") throw UsageError("df is available for the gaussian family only");
    const auto lp = load_problem(o);
    FitConfig fc = fit_config(o);
    fc.compute_df = true;
    const PathFit f = fit(lp.data, lp.layout, fc);
    io::CsvWriter w({"lambda", "df_hat", "n_active", "heuristic"});
    for (Index l = 0; l < f.n_lambda(); ++l) {
        w.row(f.lambda_grid[l], df_cell(f.df_estimates(l)),
              static_cast<Index>(f.active_sets[l].size()), f.df_heuristic);
    }
    w.save(out);
    return ok;
}

int cmd_df_verify(Index n, Index p, const std::string& design, McDfConfig mc, double theta,
                  Index n_lambda, const std::string& out)
{
    if (!design.empty()) io::require_readable(design, "design file");
    require_writable(out);
    Matrix X;
    if (design.empty()) {
        if (n < 2 || p < 1) throw UsageError("need n >= 2 and p >= 1");
        X.resize(n, p);
        CounterRng rng(mc.seed, Stream::design);
        fill_standard_normal(X, rng);
    } else {
        X = io::read_numeric_csv(design).values;
    }
    FitConfig fc;
    fc.theta = theta;
    fc.n_lambda = n_lambda;
    const auto res = monte_carlo_df(X, GroupLayout::single_group(X.cols()), mc, fc);
    io::CsvWriter w({"lambda", "df_mc", "mean_df_hat", "bias", "ci_lo", "ci_hi"});
    for (const auto& pt : res.points) {
        w.row(pt.lambda, pt.df_mc, pt.mean_df_hat, pt.bias, pt.ci_lo(), pt.ci_hi());
    }
    w.save(out);
    std::cerr << "zero inside the bias CI at " << res.coverage() * 100.0 << "% of lambda values\n";
    return ok;
}

// theory-check -------------------------------------------------------------

int cmd_theory(const TheoryConfig& cfg, const std::string& out)
{
    require_writable(out);
    const TheoryReport rep = run_theory_suite(cfg);
    json j;
    j["seed"] = cfg.seed;
    j["instances_attempted"] = rep.instances_attempted;
    j["instances_skipped"] = rep.instances_skipped;
    j["max_gram_error"] = rep.max_gram_error;
    j["checks"] = json::array();
    bool all = true;
    for (const auto& c : rep.checks) {
        all = all && c.pass();
        j["checks"].push_back({{"name", c.name},
                               {"instances", c.instances},
                               {"violations", c.violations},
                               {"worst_margin", c.worst_margin},
                               {"pass", c.pass()}});
    }
    j["all_pass"] = all;
    const std::string text = j.dump(1) + "\n";
    if (out.empty()) {
        std::cout << text;
    } else {
        io::write_atomic(out, text);
    }
    return ok;
}

// contour ------------------------------------------------------------------

int cmd_contour(const std::vector<double>& lambdas, const std::vector<double>& thetas,
                const std::vector<double>& rhos, const std::vector<double>& levels, Index points,
                const std::string& out)
{
    require_writable(out);
    io::CsvWriter w({"lambda", "theta", "rho", "level", "x", "y", "quadrant_piece", "penalty"});
    for (double lam : lambdas) {
        for (double th : thetas) {
            for (double rho : rhos) {
                for (double c : levels) {
                    for (const auto& pt : contour_2d(lam, th, rho, c, points)) {
                        w.row(lam, th, rho, c, pt.x, pt.y, pt.piece,
                              contour_penalty(pt.x, pt.y, lam, th, rho));
                    }
                }
            }
        }
    }
    w.save(out);
    return ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"pcLasso: lasso with a principal-components quadratic penalty"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "pclasso 1.0.0");

    FitOptions fit_o;
    std::string fit_out, fit_path_csv;
    auto* s_fit = app.add_subcommand("fit", "fit a coefficient path");
    add_fit_options(s_fit, fit_o);
    s_fit->add_option("--out", fit_out, "model JSON")->required();
    s_fit->add_option("--path-csv", fit_path_csv, "path summary CSV (lambda, df, n_active, objective)");

    std::string pr_model, pr_data, pr_out;
    std::optional<Index> pr_index;
    std::optional<double> pr_lambda;
    auto* s_pred = app.add_subcommand("predict", "predict from a stored model");
    s_pred->add_option("--model", pr_model, "model JSON")->required();
    s_pred->add_option("--data", pr_data, "CSV with the model's columns (by name)")->required();
    auto* pi = s_pred->add_option("--lambda-index", pr_index, "0-based path index");
    auto* pl = s_pred->add_option("--lambda", pr_lambda, "nearest path lambda (log scale)");
    pi->excludes(pl);
    s_pred->add_option("--out", pr_out, "predictions CSV")->required();

    FitOptions cv_o;
    CVConfig cv_cfg;
    std::string cv_csv, cv_json;
    bool cv_own_svd = false;
    auto* s_cv = app.add_subcommand("cv", "k-fold cross-validation over rat and lambda");
    add_fit_options(s_cv, cv_o);
    s_cv->add_option("--folds", cv_cfg.n_folds, "number of folds")->capture_default_str();
    s_cv->add_option("--rats", cv_cfg.rat_grid, "rat grid")->delimiter(',');
    s_cv->add_option("--seed", cv_cfg.fold_seed, "fold seed")->capture_default_str();
    s_cv->add_option("--threads", cv_cfg.threads, "worker threads")->capture_default_str();
    s_cv->add_flag("--fold-svd", cv_own_svd, "recompute the penalty SVD inside each fold");
    s_cv->add_option("--out", cv_csv, "CV curve CSV (rat, lambda, mean_error, se)")->required();
    s_cv->add_option("--summary", cv_json, "JSON summary of the selections");

    SimSpec sim;
    sim.sizes = {100, 100};
    std::string sim_court = "home", sim_out, sim_test, sim_groups;
    auto* s_sim = app.add_subcommand("simulate", "generate a grouped simulation dataset");
    s_sim->add_option("--n", sim.n, "training rows")->capture_default_str();
    s_sim->add_option("--sizes", sim.sizes, "group sizes")->delimiter(',');
    s_sim->add_option("--rho", sim.rho, "within-group correlation")->capture_default_str();
    s_sim->add_option("--n-ev", sim.n_ev, "eigenvectors per active group")->capture_default_str();
    s_sim->add_option("--court", sim_court, "home, neutral or hostile")
        ->check(CLI::IsMember({"home", "neutral", "hostile"}))
        ->capture_default_str();
    s_sim->add_option("--active-groups", sim.active_groups, "0-based active groups")->delimiter(',');
    s_sim->add_option("--snr", sim.snr, "signal-to-noise ratio")->capture_default_str();
    s_sim->add_option("--n-test", sim.n_test, "test rows")->capture_default_str();
    s_sim->add_option("--seed", sim.seed, "seed")->capture_default_str();
    s_sim->add_option("--out", sim_out, "training CSV (x1..xp, y)")->required();
    s_sim->add_option("--test-out", sim_test, "test CSV (x1..xp, signal)");
    s_sim->add_option("--groups-out", sim_groups, "group map CSV");

    std::string ex_spec, ex_out;
    unsigned ex_threads = 1;
    auto* s_ex = app.add_subcommand("experiment", "run simulation cells over seeds");
    s_ex->add_option("--spec", ex_spec, "experiment JSON")->required();
    s_ex->add_option("--out", ex_out, "results CSV")->required();
    s_ex->add_option("--threads", ex_threads, "worker threads")->capture_default_str();

    FitOptions df_o;
    std::string df_out;
    auto* s_df = app.add_subcommand("df", "degrees-of-freedom estimates along a path");
    add_fit_options(s_df, df_o);
    s_df->add_option("--out", df_out, "CSV (lambda, df_hat, n_active, heuristic)")->required();

    Index dv_n = 500, dv_p = 100, dv_nl = 50;
    double dv_theta = 1.0;
    std::string dv_design, dv_out;
    McDfConfig mc;
    mc.sigma = 2.0;
    auto* s_dv = app.add_subcommand("df-verify", "Monte Carlo check of the df estimate");
    s_dv->add_option("--n", dv_n, "rows of the random design")->capture_default_str();
    s_dv->add_option("--p", dv_p, "columns of the random design")->capture_default_str();
    s_dv->add_option("--design", dv_design, "design CSV instead of a random one");
    s_dv->add_option("--sigma", mc.sigma, "noise sd")->capture_default_str();
    s_dv->add_option("--B", mc.B, "replications")->capture_default_str();
    s_dv->add_option("--theta", dv_theta, "theta")->capture_default_str();
    s_dv->add_option("--n-lambda", dv_nl, "path length")->capture_default_str();
    s_dv->add_option("--seed", mc.seed, "seed")->capture_default_str();
    s_dv->add_option("--threads", mc.threads, "worker threads")->capture_default_str();
    s_dv->add_option("--out", dv_out, "CSV (lambda, df_mc, mean_df_hat, bias, ci_lo, ci_hi)")
        ->required();

    TheoryConfig th;
    std::string th_out;
    auto* s_th = app.add_subcommand("theory-check", "numerical checks of the error bounds");
    s_th->add_option("--seed", th.seed, "seed")->capture_default_str();
    s_th->add_option("--instances", th.n_instances, "error-bound instances")->capture_default_str();
    s_th->add_option("--eigen-instances", th.n_eigen_instances, "random designs for eigen checks")
        ->capture_default_str();
    s_th->add_option("--probes", th.n_probe, "cone probes per instance")->capture_default_str();
    s_th->add_option("--threads", th.threads, "worker threads")->capture_default_str();
    s_th->add_option("--out", th_out, "JSON report (stdout when omitted)");

    std::vector<double> ct_l{1.0}, ct_t{1.0}, ct_r{0.5}, ct_c{1.0};
    Index ct_points = 200;
    std::string ct_out;
    auto* s_ct = app.add_subcommand("contour", "two-predictor penalty contours");
    s_ct->add_option("--lambda", ct_l, "lambda values")->delimiter(',');
    s_ct->add_option("--theta", ct_t, "theta values")->delimiter(',');
    s_ct->add_option("--rho", ct_r, "correlations")->delimiter(',');
    s_ct->add_option("--level", ct_c, "contour levels")->delimiter(',');
    s_ct->add_option("--points", ct_points, "points per contour")->capture_default_str();
    s_ct->add_option("--out", ct_out, "contour CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : usage;
    }

    try {
        if (s_fit->parsed()) return cmd_fit(fit_o, fit_out, fit_path_csv);
        if (s_pred->parsed()) return cmd_predict(pr_model, pr_data, pr_index, pr_lambda, pr_out);
        if (s_cv->parsed()) {
            cv_cfg.shared_svd = !cv_own_svd;
            return cmd_cv(cv_o, cv_cfg, cv_csv, cv_json);
        }
        if (s_sim->parsed()) {
            sim.court = court_from_string(sim_court);
            return cmd_simulate(sim, sim_out, sim_test, sim_groups);
        }
        if (s_ex->parsed()) return cmd_experiment(ex_spec, ex_out, ex_threads);
        if (s_df->parsed()) return cmd_df(df_o, df_out);
        if (s_dv->parsed()) return cmd_df_verify(dv_n, dv_p, dv_design, mc, dv_theta, dv_nl, dv_out);
        if (s_th->parsed()) return cmd_theory(th, th_out);
        if (s_ct->parsed()) return cmd_contour(ct_l, ct_t, ct_r, ct_c, ct_points, ct_out);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return usage;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return data;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return numerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return numerical;
    }
    return usage;
}
