#ifndef REPAYFACTOR_TABLE_IO_HPP
#define REPAYFACTOR_TABLE_IO_HPP

#include <fstream>
#include <string>
#include <vector>

#include "repayfactor/csv.hpp"
#include "repayfactor/types.hpp"

namespace repayfactor::table_io {

/// Finalized table as a CSV matrix. Leading columns UNITID,YEAR carry the
/// row keys; missing cells are written empty.
inline void write_table(const FeatureTable& table, const std::string& data_path,
                        const std::string& meta_path) {
    std::ofstream out(data_path, std::ios::binary);
    if (!out) throw IoError("cannot write " + data_path);
    std::vector<std::string> rec = {"UNITID", "YEAR"};
    for (const auto& m : table.metas) rec.push_back(m.name);
    csv::write_record(out, rec);
    for (Eigen::Index i = 0; i < table.n_rows(); ++i) {
        rec.clear();
        rec.push_back(table.row_keys[static_cast<std::size_t>(i)].institution_id);
        rec.push_back(std::to_string(table.row_keys[static_cast<std::size_t>(i)].year));
        for (Eigen::Index j = 0; j < table.n_cols(); ++j) {
            if (table.missing[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])
                rec.emplace_back();
            else
                rec.push_back(csv::format_double(table.values(i, j)));
        }
        csv::write_record(out, rec);
    }

    std::ofstream meta(meta_path, std::ios::binary);
    if (!meta) throw IoError("cannot write " + meta_path);
    csv::write_record(meta, {"name", "category", "dtype", "encoding"});
    for (const auto& m : table.metas) {
        std::string enc;
        for (std::size_t i = 0; i < m.encoding.size(); ++i) {
            if (i) enc += "|";
            enc += m.encoding[i];
        }
        csv::write_record(meta, {m.name, to_string(m.category),
                                 m.dtype == Dtype::Categorical ? "categorical" : "numeric", enc});
    }
}

inline FeatureTable read_table(const std::string& data_path, const std::string& meta_path) {
    csv::File meta = csv::read_file(meta_path);
    FeatureTable table;
    for (std::size_t r = 0; r < meta.rows.size(); ++r) {
        const auto& row = meta.rows[r];
        if (row.size() < 3) throw ParseError("metadata row " + std::to_string(r + 1) + " too short");
        FeatureMeta m;
        m.name = row[0];
        auto cat = parse_category(row[1]);
        if (!cat) throw ParseError("metadata row " + std::to_string(r + 1) + ": unknown category " + row[1]);
        m.category = *cat;
        m.dtype = row[2] == "categorical" ? Dtype::Categorical : Dtype::Numeric;
        if (row.size() >= 4 && !row[3].empty()) {
            std::string cur;
            for (char c : row[3]) {
                if (c == '|') {
                    m.encoding.push_back(cur);
                    cur.clear();
                } else {
                    cur.push_back(c);
                }
            }
            m.encoding.push_back(cur);
        }
        table.metas.push_back(std::move(m));
    }

    csv::File data = csv::read_file(data_path);
    const std::size_t p = table.metas.size();
    if (data.header.size() != p + 2)
        throw SchemaError("data matrix has " + std::to_string(data.header.size()) +
                          " columns, metadata implies " + std::to_string(p + 2));
    const std::size_t n = data.rows.size();
    table.values = MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    table.missing.assign(n, std::vector<bool>(p, false));
    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = data.rows[i];
        if (row.size() != p + 2)
            throw ParseError("data row " + std::to_string(i + 1) + " is ragged");
        table.row_keys.push_back(RowKey{row[0], std::atoi(row[1].c_str())});
        for (std::size_t j = 0; j < p; ++j) {
            const std::string& cell = row[j + 2];
            if (cell.empty()) {
                table.missing[i][j] = true;
            } else {
                table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    std::strtod(cell.c_str(), nullptr);
            }
        }
    }
    return table;
}

}  // namespace repayfactor::table_io

#endif  // REPAYFACTOR_TABLE_IO_HPP
