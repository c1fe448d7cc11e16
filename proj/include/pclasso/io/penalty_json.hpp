#pragma once
#include <string>
#include <vector>
#include <json.hpp>
#include <pclasso/penalty.hpp>

namespace pclasso::io {

/**
 * Penalty precompute as JSON: per group its start, size, scale, singular
 * values and V (row-major), plus the full-matrix d1^2 and d2^2. Reloading
 * rebuilds each block from its SVD, so A is never stored.
 */
inline nlohmann::json penalty_to_json(const GroupPenalty& pen)
{
    using nlohmann::json;
    json j;
    j["d1_sq"] = pen.d1_sq;
    j["d2_sq"] = pen.d2_sq;
    j["groups"] = json::array();
    for (Index k = 0; k < pen.n_groups(); ++k) {
        const auto& b = pen.blocks[k];
        std::vector<double> v;
        for (Index r = 0; r < b.svd.V.rows(); ++r) {
            for (Index c = 0; c < b.svd.V.cols(); ++c) v.push_back(b.svd.V(r, c));
        }
        j["groups"].push_back({{"id", k},
                               {"start", pen.starts[k]},
                               {"size", b.A.rows()},
                               {"scale", b.scale},
                               {"d", std::vector<double>(b.svd.d.data(), b.svd.d.data() + b.svd.d.size())},
                               {"V", v}});
    }
    return j;
}

inline GroupPenalty penalty_from_json(const nlohmann::json& j)
{
    try {
        GroupPenalty pen;
        pen.d1_sq = j.at("d1_sq").get<double>();
        pen.d2_sq = j.at("d2_sq").get<double>();
        for (const auto& g : j.at("groups")) {
            const Index size = g.at("size").get<Index>();
            const auto d = g.at("d").get<std::vector<double>>();
            const auto v = g.at("V").get<std::vector<double>>();
            const Index m = static_cast<Index>(d.size());
            if (m < 1 || static_cast<Index>(v.size()) != size * m) {
                throw DataError("penalty sidecar: inconsistent SVD dimensions");
            }
            GroupSVD svd;
            svd.d = Eigen::Map<const Vector>(d.data(), m);
            svd.V.resize(size, m);
            for (Index r = 0; r < size; ++r) {
                for (Index c = 0; c < m; ++c) svd.V(r, c) = v[static_cast<size_t>(r * m + c)];
            }
            const bool sqrt_pk = g.at("scale").get<double>() != 1.0;
            pen.blocks.push_back(build_penalty(svd, size, sqrt_pk));
            pen.starts.push_back(g.at("start").get<Index>());
        }
        return pen;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed penalty sidecar: ") + e.what());
    }
}

} // namespace pclasso::io
