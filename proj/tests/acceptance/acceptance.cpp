// Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed here.
// Usage: acceptance [criterion numbers...]   (default: all)
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>
#include <vector>
#include <pclasso/pclasso.hpp>
#include "support/oracles.hpp"

using namespace pclasso;

namespace {

namespace tol {
constexpr double lasso_equivalence = 1e-6;
constexpr double closed_form_rel = 1e-6;
constexpr double kkt_rel_lambda_max = 1e-4;
constexpr double screening = 1e-8;
constexpr double screening_discard = 0.5;       // warn-only
constexpr double df_coverage = 0.9;
constexpr double home_win_fraction = 0.6;
constexpr double parity = 0.10;
constexpr double grouping_win_fraction = 0.7;
constexpr double sign_test_alpha = 0.05;
constexpr double contour = 1e-8;
constexpr double lasso_equivalence_seconds = 30.0;
} // namespace tol

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Matrix normal_matrix(Index n, Index p, std::uint64_t seed, Stream s = Stream::design)
{
    Matrix X(n, p);
    CounterRng r(seed, s);
    fill_standard_normal(X, r);
    return X;
}

Dataset sparse_linear(Index n, Index p, std::uint64_t seed)
{
    Dataset d;
    d.X = normal_matrix(n, p, seed);
    Vector beta = Vector::Zero(p);
    const Index k = std::min<Index>(5, p);
    for (Index j = 0; j < k; ++j) beta(j * (p / k)) = (j % 2 ? -1.0 : 1.0) * (1.0 + 0.25 * static_cast<double>(j));
    d.y = d.X * beta + normal_matrix(n, 1, seed, Stream::noise).col(0);
    return d;
}

/// Worst gaussian KKT residuals over a path, both forms normalized by lambda_max.
struct KktTally
{
    double worst_active = 0.0;     // / lambda_max
    double worst_inactive = 0.0;   // excess over lambda (1 + 1e-4), / lambda_max
    Index fits = 0, points = 0;

    void add(const PreparedProblem& prep, const GroupPenalty& pen, const PathFit& f)
    {
        ++fits;
        const double lmax = lambda_max(prep);
        for (Index l = 0; l < f.n_lambda(); ++l) {
            ++points;
            const auto rep = kkt_check(prep, pen, f, l);
            worst_active = std::max(worst_active, rep.max_active_violation / lmax);
            // max_inactive_excess is |s| - lambda; allow lambda * 1e-4 on top.
            const double excess = rep.max_inactive_excess - 1e-4 * f.lambda_grid[l];
            worst_inactive = std::max(worst_inactive, std::max(0.0, excess) / lmax);
        }
    }
    bool pass() const
    {
        return worst_active < tol::kkt_rel_lambda_max && worst_inactive == 0.0;
    }
};

KktTally g_kkt;

struct Outcome
{
    bool pass = false;
    std::string summary;
};

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string fmt(const char* f, double a)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// ---------------------------------------------------------------------------

Outcome lasso_equivalence()
{
    double worst = 0.0, lib_seconds = 0.0;
    for (Index i = 0; i < 20; ++i) {
        const std::uint64_t seed = 100 + static_cast<std::uint64_t>(i);
        CounterRng r(seed, Stream::column_choice);
        std::uniform_int_distribution<Index> nn(20, 100), pp(5, 200);
        const Index n = nn(r), p = pp(r);
        auto d = sparse_linear(n, p, seed);
        const Index groups = std::min<Index>(4, p);
        std::vector<Index> sizes(groups, p / groups);
        sizes.back() += p - (p / groups) * groups;
        auto L = GroupLayout::contiguous(sizes);
        FitConfig c;
        c.theta = 0.0;
        c.tol = 1e-10;
        c.n_lambda = 50;
        const auto t0 = Clock::now();
        auto prep = prepare(d, L, true, true);
        auto pen = build_group_penalty(prep.X, L);
        auto f = fit_path(prep, L, pen, c);
        lib_seconds += seconds_since(t0);
        g_kkt.add(prep, pen, f);
        auto o = oracle::augmented_lasso_path(d.X, d.y, sizes, 0.0, f.lambda_grid, 1e-13);
        const double scale = std::max(1.0, o.betas.cwiseAbs().maxCoeff());
        worst = std::max(worst, (f.betas - o.betas).cwiseAbs().maxCoeff() / scale);
        worst = std::max(worst, (f.intercepts - o.intercepts).cwiseAbs().maxCoeff() / scale);
    }
    return {worst <= tol::lasso_equivalence && lib_seconds < tol::lasso_equivalence_seconds,
            "20 instances, max coordinate gap " + fmt("%.2e", worst) + " (tol 1e-6), library time "
                + fmt("%.2f", lib_seconds) + " s (limit 30 s)"};
}

Outcome closed_form()
{
    double worst = 0.0;
    for (std::uint64_t seed : {1, 2, 3}) {
        Dataset d;
        d.X = normal_matrix(60, 8, seed);
        d.y = normal_matrix(60, 1, seed, Stream::noise).col(0) + d.X.col(0);
        auto L = GroupLayout::single_group(8);
        for (double theta : {0.1, 1.0, 10.0}) {
            FitConfig c;
            c.theta = theta;
            c.lambda_grid = {0.0};
            c.standardize = false;
            c.intercept = false;
            c.tol = 1e-13;
            auto prep = prepare(d, L, false, false);
            auto pen = build_group_penalty(prep.X, L);
            auto f = fit_path(prep, L, pen, c);
            const Vector want = oracle::closed_form_fit(d.X, d.y, theta);
            worst = std::max(worst, (d.X * f.betas.col(0) - want).norm() / want.norm());
        }
    }
    return {worst <= tol::closed_form_rel,
            "theta in {0.1, 1, 10} x 3 designs, max relative error " + fmt("%.2e", worst)};
}

Outcome kkt_certificate()
{
    // Fits of criteria 1, 2 and 4 are already recorded; add grouped fits with
    // theta > 0, overlap and weights.
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        auto d = sparse_linear(60 + 20 * static_cast<Index>(seed), 90, 300 + seed);
        if (seed % 2) d.weights = Vector::LinSpaced(d.n(), 0.5, 1.5);
        auto L = GroupLayout::contiguous({30, 30, 30});
        if (seed == 5) {
            // overlapping groups: columns 5 and 45 sit in two groups each
            std::vector<IndexList> g(3);
            for (Index j = 0; j < 90; ++j) g[j / 30].push_back(j);
            g[1].push_back(5);
            g[2].push_back(45);
            L = GroupLayout::from_groups(g, 90);
        }
        for (double rat : {0.25, 0.6, 0.95}) {
            FitConfig c;
            c.rat = rat;
            auto prep = prepare(d, L, true, true);
            auto pen = build_group_penalty(prep.X, L);
            g_kkt.add(prep, pen, fit_path(prep, L, pen, c));
        }
    }
    return {g_kkt.pass(), std::to_string(g_kkt.fits) + " fits, " + std::to_string(g_kkt.points)
                              + " path points; worst active residual "
                              + fmt("%.2e", g_kkt.worst_active) + " x lambda_max, inactive excess "
                              + fmt("%.2e", g_kkt.worst_inactive)};
}

Outcome strong_rules()
{
    double worst = 0.0, min_discard = 1.0;
    const std::pair<Index, Index> shapes[10] = {{50, 20}, {50, 100}, {80, 300}, {100, 40}, {40, 200},
                                                {60, 60},  {30, 150}, {100, 500}, {70, 35}, {90, 180}};
    for (int i = 0; i < 10; ++i) {
        auto [n, p] = shapes[i];
        auto d = sparse_linear(n, p, 400 + static_cast<std::uint64_t>(i));
        auto L = GroupLayout::contiguous({p / 2, p - p / 2});
        FitConfig on;
        on.rat = i % 3 == 0 ? 1.0 : 0.5;
        on.tol = 1e-12;
        FitConfig off = on;
        off.use_strong_rules = false;
        auto prep = prepare(d, L, true, true);
        auto pen = build_group_penalty(prep.X, L);
        auto a = fit_path(prep, L, pen, on);
        auto b = fit_path(prep, L, pen, off);
        g_kkt.add(prep, pen, a);
        worst = std::max(worst, (a.betas - b.betas).cwiseAbs().maxCoeff()
                                    / std::max(1.0, b.betas.cwiseAbs().maxCoeff()));
        const Index quarter = std::max<Index>(1, a.n_lambda() / 4);
        double discard = 0.0;
        for (Index l = 0; l < quarter; ++l) {
            discard += 1.0 - static_cast<double>(a.screened_sizes[l]) / static_cast<double>(p);
        }
        min_discard = std::min(min_discard, discard / static_cast<double>(quarter));
    }
    if (min_discard < tol::screening_discard) {
        std::printf("  warning: screening discarded only %.1f%% at the top quarter of one path\n",
                    100.0 * min_discard);
    }
    return {worst <= tol::screening, "10 instances (5 with p > n), max path gap " + fmt("%.2e", worst)
                                         + "; min discard at top quarter "
                                         + fmt("%.1f", 100.0 * min_discard) + "% (diagnostic)"};
}

Outcome degrees_of_freedom()
{
    const Matrix X = normal_matrix(500, 100, 2024);
    bool ok = true;
    std::string s;
    for (double theta : {1.0, 10.0}) {
        McDfConfig mc;
        mc.B = 500;
        mc.sigma = 2.0;
        mc.seed = 11;
        FitConfig fc;
        fc.theta = theta;
        fc.n_lambda = 50;
        auto r = monte_carlo_df(X, GroupLayout::single_group(100), mc, fc);
        const double cov = r.coverage();
        ok = ok && cov >= tol::df_coverage;
        s += "theta " + fmt("%g", theta) + ": coverage " + fmt("%.2f", cov) + " of "
             + std::to_string(r.points.size()) + " lambdas; ";
    }
    return {ok, s + "B = 500, need >= 0.90"};
}

std::vector<ExperimentRow> experiment_cell(const SimSpec& spec)
{
    std::vector<std::uint64_t> seeds(30);
    for (size_t i = 0; i < seeds.size(); ++i) seeds[i] = i + 1;
    CVConfig cv;
    cv.n_folds = 10;
    FitConfig fc;
    fc.tol = 1e-4;
    return run_experiment(spec, seeds, cv, fc);
}

struct Paired
{
    double med_pc = 0.0, med_lasso = 0.0, win_fraction = 0.0;
};

Paired compare(const std::vector<ExperimentRow>& rows)
{
    std::vector<double> pc, la;
    for (const auto& r : rows) {
        if (r.method == "pclasso-min") pc.push_back(r.mse);
        if (r.method == "lasso-min") la.push_back(r.mse);
    }
    Index wins = 0;
    for (size_t i = 0; i < pc.size(); ++i) wins += pc[i] < la[i];
    return {median(pc), median(la), static_cast<double>(wins) / static_cast<double>(pc.size())};
}

Outcome home_court()
{
    bool ok = true;
    std::string s;
    for (double snr : {0.5, 2.0}) {
        SimSpec spec;
        spec.n = 200;
        spec.sizes = std::vector<Index>(10, 100);
        spec.rho = 0.0;
        spec.n_ev = 2;
        spec.court = Court::home;
        spec.active_groups = {0};
        spec.snr = snr;
        spec.n_test = 2000;
        const auto t0 = Clock::now();
        auto c = compare(experiment_cell(spec));
        ok = ok && c.med_pc < c.med_lasso && c.win_fraction >= tol::home_win_fraction;
        s += "SNR " + fmt("%g", snr) + ": median " + fmt("%.4g", c.med_pc) + " vs "
             + fmt("%.4g", c.med_lasso) + ", wins " + fmt("%.0f", 100.0 * c.win_fraction) + "% ("
             + fmt("%.0f", seconds_since(t0)) + " s); ";
    }
    return {ok, s + "30 seeds, need lower median and >= 60% wins"};
}

Outcome parity()
{
    bool ok = true;
    std::string s;
    struct Cell
    {
        const char* name;
        std::vector<Index> sizes;
        Index n_ev;
        Court court;
        std::vector<Index> active;
    };
    const Cell cells[2] = {{"neutral", std::vector<Index>(10, 20), 2, Court::neutral, {0}},
                           {"hostile", std::vector<Index>(5, 10), 1, Court::hostile, {0, 1}}};
    for (const auto& cell : cells) {
        for (double snr : {0.5, 2.0}) {
            SimSpec spec;
            spec.n = 200;
            spec.sizes = cell.sizes;
            spec.n_ev = cell.n_ev;
            spec.court = cell.court;
            spec.active_groups = cell.active;
            spec.snr = snr;
            spec.n_test = 2000;
            auto c = compare(experiment_cell(spec));
            const double ratio = c.med_pc / c.med_lasso;
            ok = ok && ratio <= 1.0 + tol::parity;
            s += std::string(cell.name) + " SNR " + fmt("%g", snr) + ": ratio " + fmt("%.3f", ratio) + "; ";
        }
    }
    return {ok, s + "need median pcLasso-min <= 1.10 x lasso-min"};
}

Outcome theory()
{
    TheoryConfig cfg;
    cfg.n_instances = 50;
    cfg.n_eigen_instances = 100;
    auto rep = run_theory_suite(cfg);
    bool ok = rep.max_gram_error <= 1e-10;
    Index failing = 0;
    for (const auto& c : rep.checks) {
        if (!c.pass()) {
            ++failing;
            std::printf("  check %s: %lld of %lld violated (worst margin %.3e)\n", c.name.c_str(),
                        static_cast<long long>(c.violations), static_cast<long long>(c.instances),
                        c.worst_margin);
        }
    }
    ok = ok && failing == 0;
    const auto* l2 = rep.find("l2_constrained_re");
    return {ok, std::to_string(rep.checks.size()) + " checks, " + std::to_string(failing)
                    + " failing; gram error " + fmt("%.1e", rep.max_gram_error) + "; "
                    + std::to_string(l2 ? l2->instances : 0) + " bound instances ("
                    + std::to_string(rep.instances_skipped) + " skipped)"};
}

/// Number of groups of 15 with at least one nonzero coefficient.
Index nonzero_groups(const Vector& beta, Index group_size)
{
    std::set<Index> g;
    for (Index j = 0; j < beta.size(); ++j) {
        if (beta(j) != 0.0) g.insert(j / group_size);
    }
    return static_cast<Index>(g.size());
}

/// Path point whose support is closest to target (ties: the sparser one).
Index matched_point(const PathFit& f, Index target)
{
    Index best = 0, gap = -1;
    for (Index l = 0; l < f.n_lambda(); ++l) {
        const Index s = static_cast<Index>((f.betas.col(l).array() != 0.0).count());
        const Index g = std::abs(s - target);
        if (gap < 0 || g < gap) {
            gap = g;
            best = l;
        }
    }
    return best;
}

struct GroupCounts
{
    Index pc = 0, lasso = 0;
};

GroupCounts grouping_seed(std::uint64_t seed, bool rank_one)
{
    const Index n = 50, G = 50, k = 15, p = G * k;
    Matrix X = normal_matrix(n, p, seed);
    if (rank_one) {
        const Matrix Z = normal_matrix(n, G, seed, Stream::column_choice);
        for (Index j = 0; j < p; ++j) X.col(j) = Z.col(j / k) + 0.3 * X.col(j);
    }
    Vector beta = Vector::Zero(p);
    for (Index g = 0; g < 5; ++g) {
        for (Index j = 0; j < 3; ++j) beta(g * k + j) = 1.0;
    }
    const Vector signal = X * beta;
    const double sd = std::sqrt((signal.array() - signal.mean()).square().mean() / 2.0);
    Dataset d;
    d.X = X;
    d.y = signal + sd * normal_matrix(n, 1, seed, Stream::noise).col(0);
    auto L = GroupLayout::contiguous(std::vector<Index>(G, k));
    FitConfig c;
    c.n_lambda = 200;
    c.lambda_min_ratio = 1e-3;
    c.compute_df = false;
    c.tol = 1e-6;
    auto prep = prepare(d, L, true, true);
    auto pen = build_group_penalty(prep.X, L);
    c.rat = 1.0;
    auto lasso = fit_path(prep, L, pen, c);
    c.rat = 0.5;
    auto pc = fit_path(prep, L, pen, c);
    Index max_lasso = 0;
    for (Index l = 0; l < lasso.n_lambda(); ++l) {
        max_lasso = std::max<Index>(max_lasso, (lasso.betas.col(l).array() != 0.0).count());
    }
    const Index target = std::min<Index>(50, max_lasso);
    return {nonzero_groups(pc.betas.col(matched_point(pc, target)), k),
            nonzero_groups(lasso.betas.col(matched_point(lasso, target)), k)};
}

/// Two-sided exact sign test p-value.
double sign_test(Index plus, Index minus)
{
    const Index m = plus + minus;
    if (m == 0) return 1.0;
    const Index k = std::min(plus, minus);
    double tail = 0.0;
    for (Index i = 0; i <= k; ++i) {
        tail += std::exp(std::lgamma(static_cast<double>(m) + 1.0) - std::lgamma(static_cast<double>(i) + 1.0)
                         - std::lgamma(static_cast<double>(m - i) + 1.0) - static_cast<double>(m) * std::log(2.0));
    }
    return std::min(1.0, 2.0 * tail);
}

Outcome grouping_effect()
{
    Index wins = 0, plus = 0, minus = 0;
    double g_pc = 0.0, g_la = 0.0;
    for (std::uint64_t s = 1; s <= 20; ++s) {
        auto r = grouping_seed(s, true);
        wins += r.pc < r.lasso;
        g_pc += static_cast<double>(r.pc);
        g_la += static_cast<double>(r.lasso);
        auto q = grouping_seed(1000 + s, false);
        plus += q.pc > q.lasso;
        minus += q.pc < q.lasso;
    }
    const double frac = static_cast<double>(wins) / 20.0;
    const double pval = sign_test(plus, minus);
    return {frac >= tol::grouping_win_fraction && pval > tol::sign_test_alpha,
            "rank-1 groups: pcLasso fewer groups in " + fmt("%.0f", 100.0 * frac)
                + "% of 20 seeds (mean " + fmt("%.1f", g_pc / 20.0) + " vs " + fmt("%.1f", g_la / 20.0)
                + "); independent: sign test p = " + fmt("%.3f", pval) + " (" + std::to_string(plus)
                + "+/" + std::to_string(minus) + "-)"};
}

Outcome contour()
{
    double worst = 0.0;
    Index points = 0;
    for (double lam : {0.5, 1.0, 2.0}) {
        for (double theta : {0.1, 1.0, 10.0}) {
            for (double rho : {-0.5, 0.0, 0.5, 0.9}) {
                for (double level : {0.5, 2.0}) {
                    for (const auto& pt : contour_2d(lam, theta, rho, level, 200)) {
                        ++points;
                        const double v = contour_penalty(pt.x, pt.y, lam, theta, rho);
                        worst = std::max(worst, std::abs(v - level) / level);
                    }
                }
            }
        }
    }
    return {worst <= tol::contour, std::to_string(points) + " points over 72 settings, max relative error "
                                       + fmt("%.2e", worst)};
}

} // namespace

int main(int argc, char** argv)
{
    struct Entry
    {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    // Criterion 3 aggregates the fits of 1, 2 and 4, so it runs after them.
    const std::vector<Entry> entries = {
        {1, "lasso_equivalence", lasso_equivalence}, {2, "closed_form", closed_form},
        {4, "strong_rule_safety", strong_rules},     {3, "kkt_certificate", kkt_certificate},
        {5, "degrees_of_freedom", degrees_of_freedom}, {6, "home_court", home_court},
        {7, "neutral_hostile_parity", parity},       {8, "theory_suite", theory},
        {9, "grouping_effect", grouping_effect},     {10, "contour", contour},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

    std::vector<std::pair<int, std::string>> lines;
    bool all = true;
    for (const auto& e : entries) {
        if (!wanted.empty() && !wanted.count(e.id)) continue;
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = e.run();
        } catch (const std::exception& ex) {
            o = {false, std::string("exception: ") + ex.what()};
        }
        all = all && o.pass;
        char head[128];
        std::snprintf(head, sizeof head, "%s %2d %-24s", o.pass ? "PASS" : "FAIL", e.id, e.name);
        std::string line = std::string(head) + o.summary + " [" + fmt("%.1f", seconds_since(t0)) + " s]";
        std::printf("%s\n", line.c_str());
        std::fflush(stdout);
        lines.emplace_back(e.id, line);
    }
    std::sort(lines.begin(), lines.end());
    std::printf("\nsummary\n");
    for (const auto& [id, l] : lines) std::printf("%s\n", l.c_str());
    return all ? 0 : 1;
}
