#pragma once
#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <vector>
#include <pclasso/core.hpp>

namespace pclasso {

/**
 * Assignment of (expanded) feature columns to K disjoint groups.
 *
 * Overlapping memberships are handled by replicating the original column
 * once per group it belongs to. Expanded columns are stored contiguously
 * per group: group k owns [group_start(k), group_start(k) + group_size(k)).
 * replication_map[e] is the original column behind expanded column e.
 */
class GroupLayout
{
public:
    GroupLayout() = default;

    /// One group containing all p columns.
    static GroupLayout single_group(Index p)
    {
        std::vector<IndexList> groups(1);
        groups[0].resize(p);
        std::iota(groups[0].begin(), groups[0].end(), Index{0});
        return from_groups(groups, p);
    }

    /// Consecutive groups of the given sizes; no overlap.
    static GroupLayout contiguous(const std::vector<Index>& sizes)
    {
        std::vector<IndexList> groups;
        Index start = 0;
        for (auto s : sizes) {
            IndexList g(s);
            std::iota(g.begin(), g.end(), start);
            start += s;
            groups.push_back(std::move(g));
        }
        return from_groups(groups, start);
    }

    /**
     * Build from explicit member lists (original column indices).
     * A column may appear in several groups; every original column in
     * [0, n_original) must belong to at least one group.
     */
    static GroupLayout from_groups(const std::vector<IndexList>& groups, Index n_original)
    {
        if (groups.empty()) throw UsageError("group layout needs at least one group");
        GroupLayout out;
        out.n_original_ = n_original;
        std::vector<bool> covered(n_original, false);
        Index k = 0;
        for (const auto& g : groups) {
            if (g.empty()) throw UsageError("group " + std::to_string(k) + " is empty");
            std::vector<Index> seen;
            out.starts_.push_back(static_cast<Index>(out.replication_map_.size()));
            out.sizes_.push_back(static_cast<Index>(g.size()));
            for (auto c : g) {
                if (c < 0 || c >= n_original) {
                    throw UsageError("group member " + std::to_string(c) + " out of range");
                }
                if (std::find(seen.begin(), seen.end(), c) != seen.end()) {
                    throw UsageError("column " + std::to_string(c) + " listed twice in group "
                                     + std::to_string(k));
                }
                seen.push_back(c);
                covered[c] = true;
                out.replication_map_.push_back(c);
                out.column_groups_.push_back(k);
            }
            ++k;
        }
        for (Index c = 0; c < n_original; ++c) {
            if (!covered[c]) {
                throw UsageError("original column " + std::to_string(c)
                                 + " is not assigned to any group");
            }
        }
        return out;
    }

    /**
     * Build from (original_column, group_id) pairs as found in a group-map file.
     * Groups are ordered by first appearance of their id.
     */
    static GroupLayout from_pairs(const std::vector<std::pair<Index, std::string>>& pairs,
                                  Index n_original,
                                  std::vector<std::string>* group_names = nullptr)
    {
        std::vector<std::string> names;
        std::map<std::string, size_t> id_of;
        std::vector<IndexList> groups;
        for (const auto& [col, gid] : pairs) {
            auto it = id_of.find(gid);
            if (it == id_of.end()) {
                it = id_of.emplace(gid, groups.size()).first;
                groups.emplace_back();
                names.push_back(gid);
            }
            groups[it->second].push_back(col);
        }
        auto out = from_groups(groups, n_original);
        if (group_names) *group_names = std::move(names);
        return out;
    }

    Index n_groups() const { return static_cast<Index>(sizes_.size()); }
    Index n_expanded() const { return static_cast<Index>(replication_map_.size()); }
    Index n_original() const { return n_original_; }
    Index group_start(Index k) const { return starts_[k]; }
    Index group_size(Index k) const { return sizes_[k]; }
    const std::vector<Index>& group_sizes() const { return sizes_; }
    const std::vector<Index>& column_groups() const { return column_groups_; }
    const std::vector<Index>& replication_map() const { return replication_map_; }

    bool is_identity() const
    {
        if (n_expanded() != n_original_) return false;
        for (Index e = 0; e < n_expanded(); ++e) {
            if (replication_map_[e] != e) return false;
        }
        return true;
    }

    /// Columns of X rearranged (and replicated) into expanded order.
    Matrix expand_columns(const Matrix& X) const
    {
        if (X.cols() != n_original_) {
            throw DataError("design has " + std::to_string(X.cols()) + " columns, layout expects "
                            + std::to_string(n_original_));
        }
        Matrix out(X.rows(), n_expanded());
        for (Index e = 0; e < n_expanded(); ++e) out.col(e) = X.col(replication_map_[e]);
        return out;
    }

    /// Sum expanded coefficients back onto original columns.
    Vector collapse(const Eigen::Ref<const Vector>& expanded) const
    {
        Vector out = Vector::Zero(n_original_);
        for (Index e = 0; e < n_expanded(); ++e) out(replication_map_[e]) += expanded(e);
        return out;
    }

private:
    Index n_original_ = 0;
    std::vector<Index> starts_;
    std::vector<Index> sizes_;
    std::vector<Index> column_groups_;
    std::vector<Index> replication_map_;
};

} // namespace pclasso
