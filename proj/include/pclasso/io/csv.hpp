#pragma once
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <type_traits>
#include <utility>
#include <vector>
#include <pclasso/core.hpp>
#include <pclasso/data.hpp>

namespace pclasso::io {

/// 17 significant digits, enough to round-trip any double.
inline std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/**
 * Write a file through a sibling temporary and rename it into place, so a
 * failure never leaves partial output under the final name.
 */
inline void write_atomic(const std::string& path, const std::string& content)
{
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw UsageError("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw UsageError("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw UsageError("cannot move output into place at " + path);
    }
}

/// Throws UsageError when the file cannot be opened for reading.
inline void require_readable(const std::string& path, const std::string& what)
{
    std::ifstream in(path);
    if (!in) throw UsageError(what + " not readable: " + path);
}

namespace detail {

inline std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::string unquote(const std::string& s)
{
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
}

inline std::vector<std::string> split_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
            cell += c;
        } else if (c == ',' && !quoted) {
            out.push_back(unquote(trim(cell)));
            cell.clear();
        } else {
            cell += c;
        }
    }
    out.push_back(unquote(trim(cell)));
    return out;
}

inline double parse_number(const std::string& s, Index line, const std::string& column)
{
    auto where = [&] { return " at line " + std::to_string(line) + ", column '" + column + "'"; };
    if (s.empty()) throw DataError("empty cell" + where());
    double v = 0.0;
    const char* first = s.data();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw DataError("non-numeric value '" + s + "'" + where());
    }
    if (!std::isfinite(v)) throw DataError("non-finite value '" + s + "'" + where());
    return v;
}

} // namespace detail

/// Header plus numeric body.
struct NumericTable
{
    std::vector<std::string> header;
    Matrix values;   // rows x columns

    std::optional<Index> column(const std::string& name) const
    {
        for (size_t j = 0; j < header.size(); ++j) {
            if (header[j] == name) return static_cast<Index>(j);
        }
        return std::nullopt;
    }
};

/**
 * Strict numeric CSV: comma separated, header required, every cell a
 * finite number. NA or empty cells are rejected.
 */
inline NumericTable read_numeric_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path);
    NumericTable t;
    std::string line;
    Index line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!detail::trim(line).empty()) break;
    }
    if (detail::trim(line).empty()) throw DataError(path + ": missing header row");
    t.header = detail::split_line(line);
    for (size_t j = 0; j < t.header.size(); ++j) {
        if (t.header[j].empty()) throw DataError(path + ": empty column name in header");
        for (size_t i = 0; i < j; ++i) {
            if (t.header[i] == t.header[j]) {
                throw DataError(path + ": duplicate column name '" + t.header[j] + "'");
            }
        }
    }
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        auto cells = detail::split_line(line);
        if (cells.size() != t.header.size()) {
            throw DataError(path + ": line " + std::to_string(line_no) + " has "
                            + std::to_string(cells.size()) + " cells, header has "
                            + std::to_string(t.header.size()));
        }
        std::vector<double> r(cells.size());
        for (size_t j = 0; j < cells.size(); ++j) {
            r[j] = detail::parse_number(cells[j], line_no, t.header[j]);
        }
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw DataError(path + ": no data rows");
    t.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(t.header.size()));
    for (size_t i = 0; i < rows.size(); ++i) {
        for (size_t j = 0; j < rows[i].size(); ++j) {
            t.values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
        }
    }
    return t;
}

/**
 * Dataset from a CSV: the response column by name, an optional weight
 * column, every other column a feature in file order.
 */
inline Dataset load_dataset(const std::string& path, const std::string& response, Family family,
                            const std::string& weight_column = {})
{
    const NumericTable t = read_numeric_csv(path);
    const auto yc = t.column(response);
    if (!yc) throw DataError(path + ": response column '" + response + "' not found");
    std::optional<Index> wc;
    if (!weight_column.empty()) {
        wc = t.column(weight_column);
        if (!wc) throw DataError(path + ": weight column '" + weight_column + "' not found");
        if (*wc == *yc) throw UsageError("response and weight columns must differ");
    }
    Dataset d;
    d.family = family;
    d.y = t.values.col(*yc);
    if (wc) d.weights = t.values.col(*wc);
    IndexList feats;
    for (Index j = 0; j < static_cast<Index>(t.header.size()); ++j) {
        if (j == *yc || (wc && j == *wc)) continue;
        feats.push_back(j);
        d.column_names.push_back(t.header[j]);
    }
    if (feats.empty()) throw DataError(path + ": no feature columns");
    d.X.resize(t.values.rows(), static_cast<Index>(feats.size()));
    for (size_t k = 0; k < feats.size(); ++k) d.X.col(static_cast<Index>(k)) = t.values.col(feats[k]);
    d.validate();
    return d;
}

/**
 * Group map CSV with header original_column,group_id. Columns are matched
 * by name against `names`, or by 0-based index when the entry is an
 * integer that is not itself a column name. Repeated columns mean overlap.
 */
inline std::vector<std::pair<Index, std::string>>
read_group_map(const std::string& path, const std::vector<std::string>& names)
{
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open group map " + path);
    std::string line;
    Index line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!detail::trim(line).empty()) break;
    }
    const auto head = detail::split_line(line);
    if (head.size() != 2 || head[0] != "original_column" || head[1] != "group_id") {
        throw DataError(path + ": group map header must be original_column,group_id");
    }
    std::vector<std::pair<Index, std::string>> out;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split_line(line);
        if (cells.size() != 2 || cells[0].empty() || cells[1].empty()) {
            throw DataError(path + ": malformed entry at line " + std::to_string(line_no));
        }
        Index col = -1;
        for (size_t j = 0; j < names.size(); ++j) {
            if (names[j] == cells[0]) col = static_cast<Index>(j);
        }
        if (col < 0) {
            Index v = 0;
            auto [ptr, ec] = std::from_chars(cells[0].data(), cells[0].data() + cells[0].size(), v);
            if (ec == std::errc() && ptr == cells[0].data() + cells[0].size() && v >= 0
                && v < static_cast<Index>(names.size())) {
                col = v;
            }
        }
        if (col < 0) {
            throw DataError(path + ": unknown column '" + cells[0] + "' at line "
                            + std::to_string(line_no));
        }
        out.emplace_back(col, cells[1]);
    }
    if (out.empty()) throw DataError(path + ": group map has no entries");
    return out;
}

/// Incremental CSV text builder; numbers use format_double.
class CsvWriter
{
public:
    explicit CsvWriter(const std::vector<std::string>& header) { row_strings(header); }

    CsvWriter& row_strings(const std::vector<std::string>& cells)
    {
        for (size_t j = 0; j < cells.size(); ++j) {
            if (j) os_ << ',';
            os_ << cells[j];
        }
        os_ << '\n';
        return *this;
    }

    /// Cells may be strings or arithmetic values.
    template <class... Ts>
    CsvWriter& row(const Ts&... cells)
    {
        std::vector<std::string> v;
        (v.push_back(cell(cells)), ...);
        return row_strings(v);
    }

    std::string str() const { return os_.str(); }
    void save(const std::string& path) const { write_atomic(path, str()); }

private:
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    static std::string cell(double v) { return format_double(v); }
    static std::string cell(bool b) { return b ? "1" : "0"; }
    template <class T>
    static std::string cell(const T& v)
    {
        if constexpr (std::is_integral_v<T>) {
            return std::to_string(v);
        } else {
            return format_double(static_cast<double>(v));
        }
    }

    std::ostringstream os_;
};

} // namespace pclasso::io
