#pragma once
#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <vector>
#include <json.hpp>
#include <pclasso/core.hpp>
#include <pclasso/io/csv.hpp>
#include <pclasso/solver/path_types.hpp>

namespace pclasso::io {

/// A fitted path as stored on disk: original-space coefficients only.
struct StoredModel
{
    Family family = Family::gaussian;
    std::vector<std::string> columns;
    std::vector<double> lambda;
    double theta = 0.0;
    std::optional<double> rat;
    Vector intercepts;
    Matrix betas;                    // p x L
    std::vector<double> df;          // NaN where not available
    bool df_heuristic = false;
    std::vector<Index> active_set_sizes;
    std::vector<bool> converged;
    std::vector<Index> n_sweeps;

    Index n_lambda() const { return static_cast<Index>(lambda.size()); }

    Vector predict(const Matrix& X, Index l) const
    {
        Vector eta = X * betas.col(l);
        eta.array() += intercepts(l);
        return eta;
    }
};

inline StoredModel to_stored(const PathFit& fit, const std::vector<std::string>& columns)
{
    StoredModel m;
    m.family = fit.family;
    m.columns = columns;
    m.lambda = fit.lambda_grid;
    m.theta = fit.theta;
    m.rat = fit.rat;
    m.intercepts = fit.intercepts;
    m.betas = fit.betas;
    m.df.assign(fit.df_estimates.data(), fit.df_estimates.data() + fit.df_estimates.size());
    m.df_heuristic = fit.df_heuristic;
    for (const auto& a : fit.active_sets) m.active_set_sizes.push_back(static_cast<Index>(a.size()));
    m.converged = fit.converged;
    m.n_sweeps = fit.n_sweeps;
    return m;
}

/// Numbers are written in shortest round-trip form; NaN becomes null.
inline nlohmann::json model_to_json(const StoredModel& m)
{
    using nlohmann::json;
    auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    json j;
    j["family"] = to_string(m.family);
    j["columns"] = m.columns;
    j["lambda"] = m.lambda;
    j["theta"] = m.theta;
    j["rat"] = m.rat ? json(*m.rat) : json(nullptr);
    j["intercepts"] = json::array();
    for (Index l = 0; l < m.intercepts.size(); ++l) j["intercepts"].push_back(m.intercepts(l));
    json trip = json::array();
    for (Index l = 0; l < m.betas.cols(); ++l) {
        for (Index f = 0; f < m.betas.rows(); ++f) {
            if (m.betas(f, l) != 0.0) trip.push_back(json::array({f, l, m.betas(f, l)}));
        }
    }
    j["betas"] = {{"n_features", m.betas.rows()}, {"n_lambda", m.betas.cols()},
                  {"triplets", trip}};
    j["df"] = json::array();
    for (double d : m.df) j["df"].push_back(num(d));
    j["df_heuristic"] = m.df_heuristic;
    j["active_set_sizes"] = m.active_set_sizes;
    j["convergence"] = {{"converged", m.converged}, {"n_sweeps", m.n_sweeps}};
    return j;
}

inline void save_model(const std::string& path, const StoredModel& m)
{
    write_atomic(path, model_to_json(m).dump(1) + "\n");
}

inline StoredModel model_from_json(const nlohmann::json& j)
{
    try {
        StoredModel m;
        m.family = family_from_string(j.at("family").get<std::string>());
        m.columns = j.at("columns").get<std::vector<std::string>>();
        m.lambda = j.at("lambda").get<std::vector<double>>();
        m.theta = j.at("theta").get<double>();
        if (!j.at("rat").is_null()) m.rat = j.at("rat").get<double>();
        const auto ic = j.at("intercepts").get<std::vector<double>>();
        const Index L = static_cast<Index>(m.lambda.size());
        const Index p = static_cast<Index>(m.columns.size());
        if (static_cast<Index>(ic.size()) != L) throw DataError("model: intercept count mismatch");
        m.intercepts = Eigen::Map<const Vector>(ic.data(), L);
        const auto& b = j.at("betas");
        if (b.at("n_features").get<Index>() != p || b.at("n_lambda").get<Index>() != L) {
            throw DataError("model: coefficient dimensions do not match columns and lambda");
        }
        m.betas = Matrix::Zero(p, L);
        for (const auto& t : b.at("triplets")) {
            const Index f = t.at(0).get<Index>(), l = t.at(1).get<Index>();
            if (f < 0 || f >= p || l < 0 || l >= L) throw DataError("model: triplet out of range");
            m.betas(f, l) = t.at(2).get<double>();
        }
        for (const auto& d : j.at("df")) {
            m.df.push_back(d.is_null() ? std::nan("") : d.get<double>());
        }
        if (j.contains("df_heuristic")) m.df_heuristic = j.at("df_heuristic").get<bool>();
        m.active_set_sizes = j.at("active_set_sizes").get<std::vector<Index>>();
        const auto& c = j.at("convergence");
        m.converged = c.at("converged").get<std::vector<bool>>();
        m.n_sweeps = c.at("n_sweeps").get<std::vector<Index>>();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed model file: ") + e.what());
    }
}

inline StoredModel load_model(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open model " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": not valid JSON (" + e.what() + ")");
    }
    return model_from_json(j);
}

} // namespace pclasso::io
