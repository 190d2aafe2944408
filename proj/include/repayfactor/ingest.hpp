#ifndef REPAYFACTOR_INGEST_HPP
#define REPAYFACTOR_INGEST_HPP

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "repayfactor/csv.hpp"
#include "repayfactor/types.hpp"

namespace repayfactor::ingest {

/// Sentinels treated as missing in every numeric column.
inline bool is_missing_sentinel(const std::string& cell) {
    return cell.empty() || cell == "PrivacySuppressed" || cell == "NULL";
}

inline bool parse_numeric(const std::string& cell, double& out) {
    const char* s = cell.c_str();
    char* end = nullptr;
    out = std::strtod(s, &end);
    if (end == s) return false;
    while (*end == ' ' || *end == '\t') ++end;
    return *end == '\0';
}

/// Data dictionary: CSV with columns name,category[,dtype].
inline std::vector<FeatureMeta> load_dictionary(const std::string& path) {
    csv::File f = csv::read_file(path);
    if (f.header.size() < 2)
        throw ParseError("dictionary needs at least name,category columns: " + path);
    std::vector<FeatureMeta> metas;
    std::set<std::string> seen;
    for (std::size_t r = 0; r < f.rows.size(); ++r) {
        const auto& row = f.rows[r];
        if (row.size() < 2)
            throw ParseError("dictionary row " + std::to_string(r + 1) + " has fewer than 2 cells");
        FeatureMeta m;
        m.name = row[0];
        auto cat = parse_category(row[1]);
        if (!cat)
            throw ParseError("dictionary row " + std::to_string(r + 1) + " (" + m.name +
                             "): unknown category \"" + row[1] + "\"");
        m.category = *cat;
        m.dtype = Dtype::Numeric;
        if (row.size() >= 3 && !row[2].empty()) {
            if (row[2] == "numeric") m.dtype = Dtype::Numeric;
            else if (row[2] == "categorical") m.dtype = Dtype::Categorical;
            else
                throw ParseError("dictionary row " + std::to_string(r + 1) + " (" + m.name +
                                 "): unknown dtype \"" + row[2] + "\"");
        }
        if (!seen.insert(m.name).second)
            throw ParseError("duplicate variable name in dictionary: " + m.name);
        metas.push_back(std::move(m));
    }
    return metas;
}

/// Reads all rows as strings; no numeric parsing yet. Ragged rows rejected.
inline RawTable load_csv(const std::string& path, int year) {
    csv::File f = csv::read_file(path);
    RawTable t;
    t.header = std::move(f.header);
    t.year = year;
    for (std::size_t r = 0; r < f.rows.size(); ++r) {
        if (f.rows[r].size() != t.header.size())
            throw ParseError("row " + std::to_string(r + 1) + " has " +
                             std::to_string(f.rows[r].size()) + " cells, expected " +
                             std::to_string(t.header.size()) + " (" + path + ")");
        t.rows.push_back(std::move(f.rows[r]));
    }
    return t;
}

/// Stack yearly tables into one numeric FeatureTable keyed by
/// (institution-id, year). Columns restricted to dictionary variables;
/// numeric columns where no cell parses are dropped as text.
inline FeatureTable merge_years(const std::vector<RawTable>& tables,
                                const std::vector<FeatureMeta>& dictionary,
                                const std::string& id_column = "UNITID") {
    std::unordered_map<std::string, const FeatureMeta*> dict;
    for (const auto& m : dictionary) dict.emplace(m.name, &m);

    // Columns retained: dictionary variables present in at least one table,
    // in dictionary order.
    std::set<std::string> present;
    for (const auto& t : tables) {
        bool has_id = false;
        for (const auto& h : t.header) {
            if (h == id_column) has_id = true;
            if (dict.count(h)) present.insert(h);
        }
        if (!has_id)
            throw SchemaError("year " + std::to_string(t.year) +
                              " table lacks institution-id column \"" + id_column + "\"");
    }
    std::vector<FeatureMeta> metas;
    for (const auto& m : dictionary)
        if (present.count(m.name)) metas.push_back(m);
    if (metas.empty()) throw SchemaError("no dictionary variable present in any input table");

    const std::size_t p = metas.size();
    std::size_t n = 0;
    for (const auto& t : tables) n += t.rows.size();

    FeatureTable out;
    out.values = MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    out.missing.assign(n, std::vector<bool>(p, true));
    out.row_keys.reserve(n);

    // First-appearance categorical codes, shared across years.
    std::vector<std::unordered_map<std::string, int>> code_maps(p);
    for (std::size_t j = 0; j < p; ++j) metas[j].encoding.clear();

    // Track whether any cell of a numeric column ever parses; pure-text
    // numeric columns are dropped afterwards.
    std::vector<bool> ever_numeric(p, false);

    std::size_t i = 0;
    for (const auto& t : tables) {
        std::vector<int> col_of(p, -1);
        int id_col = -1;
        for (std::size_t h = 0; h < t.header.size(); ++h) {
            if (t.header[h] == id_column) id_col = static_cast<int>(h);
            for (std::size_t j = 0; j < p; ++j)
                if (metas[j].name == t.header[h]) col_of[j] = static_cast<int>(h);
        }
        for (const auto& row : t.rows) {
            out.row_keys.push_back(RowKey{row[static_cast<std::size_t>(id_col)], t.year});
            for (std::size_t j = 0; j < p; ++j) {
                if (col_of[j] < 0) continue;  // column absent this year -> missing
                const std::string& cell = row[static_cast<std::size_t>(col_of[j])];
                if (is_missing_sentinel(cell)) continue;
                if (metas[j].dtype == Dtype::Categorical) {
                    auto [it, inserted] = code_maps[j].emplace(
                        cell, static_cast<int>(metas[j].encoding.size()));
                    if (inserted) metas[j].encoding.push_back(cell);
                    out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                        static_cast<double>(it->second);
                    out.missing[i][j] = false;
                    ever_numeric[j] = true;
                } else {
                    double v;
                    if (parse_numeric(cell, v)) {
                        out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
                        out.missing[i][j] = false;
                        ever_numeric[j] = true;
                    }
                    // unparseable numeric cell stays missing / 0.0
                }
            }
            ++i;
        }
    }
    out.metas = std::move(metas);

    // Drop text columns: numeric dtype where nothing ever parsed but
    // non-sentinel content was present.
    std::vector<int> keep;
    for (std::size_t j = 0; j < p; ++j) {
        bool all_missing = true;
        for (std::size_t r = 0; r < n; ++r)
            if (!out.missing[r][j]) { all_missing = false; break; }
        if (ever_numeric[j] || all_missing) keep.push_back(static_cast<int>(j));
    }
    if (keep.size() != p) out = out.select_columns(keep);
    if (out.metas.empty()) throw SchemaError("all retained columns were dropped as text");

    // Duplicate (institution, year) keys get a disambiguating suffix only if
    // the source data repeats them; uniqueness is an invariant downstream.
    std::set<RowKey> seen;
    for (auto& k : out.row_keys) {
        int bump = 0;
        RowKey probe = k;
        while (!seen.insert(probe).second) {
            ++bump;
            probe = RowKey{k.institution_id + "#" + std::to_string(bump), k.year};
        }
        k = probe;
    }
    return out;
}

/// Drop features then rows whose missing fraction strictly exceeds threshold.
inline FeatureTable filter_missing(const FeatureTable& table, double threshold = 0.70) {
    if (threshold < 0.0 || threshold > 1.0)
        throw DomainError("missing threshold must be in [0,1]");
    std::vector<int> keep_cols;
    for (Eigen::Index j = 0; j < table.n_cols(); ++j)
        if (table.missing_fraction_col(j) <= threshold) keep_cols.push_back(static_cast<int>(j));
    if (keep_cols.empty()) throw SchemaError("missingness filter dropped every feature");
    FeatureTable cols = table.select_columns(keep_cols);
    std::vector<int> keep_rows;
    for (Eigen::Index i = 0; i < cols.n_rows(); ++i)
        if (cols.missing_fraction_row(i) <= threshold) keep_rows.push_back(static_cast<int>(i));
    return cols.select_rows(keep_rows);
}

}  // namespace repayfactor::ingest

#endif  // REPAYFACTOR_INGEST_HPP
