#ifndef REPAYFACTOR_TYPES_HPP
#define REPAYFACTOR_TYPES_HPP

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace repayfactor {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public Error {
public:
    using Error::Error;
};
class ParseError : public Error {
public:
    using Error::Error;
};
class SchemaError : public Error {
public:
    using Error::Error;
};
class DomainError : public Error {
public:
    using Error::Error;
};
class ConvergenceError : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Feature categories

enum class Category : std::uint8_t {
    Repayment,
    School,
    Academics,
    Admission,
    Cost,
    Student,
    Completion,
    Aid,
    Earnings,
};

inline constexpr std::size_t kNumCategories = 9;

inline const std::array<std::string, kNumCategories>& category_names() {
    static const std::array<std::string, kNumCategories> names = {
        "Repayment", "School",     "Academics", "Admission", "Cost",
        "Student",   "Completion", "Aid",       "Earnings"};
    return names;
}

inline const std::string& to_string(Category c) {
    return category_names()[static_cast<std::size_t>(c)];
}

/// Case-insensitive lookup; the label set is closed.
inline std::optional<Category> parse_category(const std::string& label) {
    auto lower = [](const std::string& s) {
        std::string out = s;
        for (char& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        return out;
    };
    const std::string want = lower(label);
    const auto& names = category_names();
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (lower(names[i]) == want) return static_cast<Category>(i);
    }
    return std::nullopt;
}

// Fixed order used when concatenating per-category component blocks.
inline const std::vector<Category>& predictor_category_order() {
    static const std::vector<Category> order = {
        Category::School, Category::Admission, Category::Academics,
        Category::Student, Category::Cost,     Category::Aid,
        Category::Completion, Category::Earnings};
    return order;
}

// ---------------------------------------------------------------------------
// Feature metadata

enum class Dtype : std::uint8_t { Numeric, Categorical };

struct FeatureMeta {
    std::string name;
    Category category = Category::School;
    Dtype dtype = Dtype::Numeric;
    // Ordered category levels; present iff dtype == Categorical.
    std::vector<std::string> encoding;
};

// ---------------------------------------------------------------------------
// Tables

struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    int year = 0;
};

struct RowKey {
    std::string institution_id;
    int year = 0;

    bool operator==(const RowKey& o) const {
        return institution_id == o.institution_id && year == o.year;
    }
    bool operator<(const RowKey& o) const {
        if (institution_id != o.institution_id) return institution_id < o.institution_id;
        return year < o.year;
    }
};

/// Dense numeric matrix plus a missingness mask; the currency between stages.
/// Cells flagged missing hold 0.0 after finalization.
struct FeatureTable {
    MatrixXd values;                         // n x p
    std::vector<std::vector<bool>> missing;  // n rows of p flags
    std::vector<FeatureMeta> metas;          // p
    std::vector<RowKey> row_keys;            // n

    Eigen::Index n_rows() const { return values.rows(); }
    Eigen::Index n_cols() const { return values.cols(); }

    int column_index(const std::string& name) const {
        for (std::size_t j = 0; j < metas.size(); ++j) {
            if (metas[j].name == name) return static_cast<int>(j);
        }
        return -1;
    }

    double missing_fraction_col(Eigen::Index j) const {
        if (n_rows() == 0) return 0.0;
        std::size_t cnt = 0;
        for (Eigen::Index i = 0; i < n_rows(); ++i) cnt += missing[i][j] ? 1 : 0;
        return static_cast<double>(cnt) / static_cast<double>(n_rows());
    }

    double missing_fraction_row(Eigen::Index i) const {
        if (n_cols() == 0) return 0.0;
        std::size_t cnt = 0;
        for (Eigen::Index j = 0; j < n_cols(); ++j) cnt += missing[i][j] ? 1 : 0;
        return static_cast<double>(cnt) / static_cast<double>(n_cols());
    }

    FeatureTable select_columns(const std::vector<int>& cols) const {
        FeatureTable out;
        out.row_keys = row_keys;
        out.values.resize(n_rows(), static_cast<Eigen::Index>(cols.size()));
        out.missing.assign(static_cast<std::size_t>(n_rows()),
                           std::vector<bool>(cols.size(), false));
        out.metas.reserve(cols.size());
        for (std::size_t jj = 0; jj < cols.size(); ++jj) {
            const int j = cols[jj];
            out.values.col(static_cast<Eigen::Index>(jj)) = values.col(j);
            out.metas.push_back(metas[static_cast<std::size_t>(j)]);
            for (Eigen::Index i = 0; i < n_rows(); ++i)
                out.missing[static_cast<std::size_t>(i)][jj] = missing[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
        return out;
    }

    FeatureTable select_rows(const std::vector<int>& rows) const {
        FeatureTable out;
        out.metas = metas;
        out.values.resize(static_cast<Eigen::Index>(rows.size()), n_cols());
        out.missing.reserve(rows.size());
        out.row_keys.reserve(rows.size());
        for (std::size_t ii = 0; ii < rows.size(); ++ii) {
            const int i = rows[ii];
            out.values.row(static_cast<Eigen::Index>(ii)) = values.row(i);
            out.missing.push_back(missing[static_cast<std::size_t>(i)]);
            out.row_keys.push_back(row_keys[static_cast<std::size_t>(i)]);
        }
        return out;
    }
};

}  // namespace repayfactor

#endif  // REPAYFACTOR_TYPES_HPP
