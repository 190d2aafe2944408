#ifndef REPAYFACTOR_GROUPED_PCA_HPP
#define REPAYFACTOR_GROUPED_PCA_HPP

#include <Eigen/SVD>
#include <cmath>
#include <string>
#include <vector>

#include "repayfactor/csv.hpp"
#include "repayfactor/types.hpp"

namespace repayfactor::grouped_pca {

struct CategoryPca {
    Category category = Category::School;
    std::vector<std::string> feature_names;  // training schema, in table order
    VectorXd means;                          // p_k
    VectorXd scales;                         // p_k, sample std with floor 1e-12
    std::vector<bool> zero_variance;         // p_k, pass-through columns
    MatrixXd loadings;                       // p_k x m_k, orthonormal columns
    VectorXd explained_ratio;                // m_k, non-increasing
};

struct ScreeRow {
    Category category;
    int index = 0;       // 1-based component index
    double ratio = 0;
    double cumulative = 0;
    bool retained = false;
};

struct ScreeData {
    std::vector<ScreeRow> rows;
};

struct GroupedPcaModel {
    double cutoff = 0.8;
    std::vector<CategoryPca> parts;           // fixed category order
    std::vector<std::string> component_names; // CAT_PC{i}

    Eigen::Index total_components() const {
        Eigen::Index m = 0;
        for (const auto& p : parts) m += p.loadings.cols();
        return m;
    }
};

inline constexpr double kScaleFloor = 1e-12;

/// Standardize one category block in place; returns per-column stats.
inline void standardize_block(const MatrixXd& block, VectorXd& means, VectorXd& scales,
                              std::vector<bool>& zero_var, MatrixXd& out) {
    const Eigen::Index n = block.rows(), p = block.cols();
    means.resize(p);
    scales.resize(p);
    zero_var.assign(static_cast<std::size_t>(p), false);
    out.resize(n, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        double mean = 0;
        for (Eigen::Index i = 0; i < n; ++i) mean += block(i, j);
        mean /= static_cast<double>(n);
        double ss = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double d = block(i, j) - mean;
            ss += d * d;
        }
        const double var = n > 1 ? ss / static_cast<double>(n - 1) : 0.0;
        const double sd = std::sqrt(var);
        means[j] = mean;
        if (sd <= kScaleFloor) {
            zero_var[static_cast<std::size_t>(j)] = true;
            scales[j] = 1.0;
            out.col(j).setZero();
        } else {
            scales[j] = sd;
            out.col(j) = (block.col(j).array() - mean) / sd;
        }
    }
}

/// Per-category PCA on standardized data with a shared explained-variance
/// cutoff; the scree data covers the full spectrum regardless of cutoff.
inline std::pair<GroupedPcaModel, ScreeData> fit_grouped_pca(const FeatureTable& table, double c) {
    if (table.n_rows() < 2) throw DomainError("grouped PCA needs at least 2 rows");
    if (!(c > 0.0 && c <= 1.0)) throw DomainError("explained-variance cutoff must be in (0,1]");

    GroupedPcaModel model;
    model.cutoff = c;
    ScreeData scree;

    for (Category cat : predictor_category_order()) {
        std::vector<int> cols;
        for (Eigen::Index j = 0; j < table.n_cols(); ++j)
            if (table.metas[static_cast<std::size_t>(j)].category == cat) cols.push_back(static_cast<int>(j));
        if (cols.empty()) continue;

        CategoryPca part;
        part.category = cat;
        MatrixXd block(table.n_rows(), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t jj = 0; jj < cols.size(); ++jj) {
            block.col(static_cast<Eigen::Index>(jj)) = table.values.col(cols[jj]);
            part.feature_names.push_back(table.metas[static_cast<std::size_t>(cols[jj])].name);
        }

        MatrixXd z;
        standardize_block(block, part.means, part.scales, part.zero_variance, z);

        Eigen::BDCSVD<MatrixXd> svd(z, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const VectorXd& sv = svd.singularValues();
        const double total = sv.squaredNorm();

        const Eigen::Index spectrum = sv.size();
        VectorXd ratios = VectorXd::Zero(spectrum);
        if (total > 0) ratios = sv.array().square() / total;

        // Minimal leading count whose cumulative ratio first reaches c.
        Eigen::Index m = 0;
        double cum = 0;
        for (Eigen::Index i = 0; i < spectrum; ++i) {
            cum += ratios[i];
            ++m;
            if (cum >= c - 1e-15) break;
        }
        if (total == 0) m = 0;  // all-zero block: nothing to retain

        part.loadings = svd.matrixV().leftCols(m);
        part.explained_ratio = ratios.head(m);

        // Sign convention: largest-|entry| of each loading column positive.
        for (Eigen::Index k = 0; k < part.loadings.cols(); ++k) {
            Eigen::Index argmax = 0;
            part.loadings.col(k).cwiseAbs().maxCoeff(&argmax);
            if (part.loadings(argmax, k) < 0) part.loadings.col(k) *= -1.0;
        }

        double run = 0;
        for (Eigen::Index i = 0; i < spectrum; ++i) {
            run += ratios[i];
            scree.rows.push_back(ScreeRow{cat, static_cast<int>(i) + 1, ratios[i], run, i < m});
        }

        for (Eigen::Index k = 0; k < m; ++k)
            model.component_names.push_back(to_string(cat) + "_PC" + std::to_string(k + 1));
        model.parts.push_back(std::move(part));
    }
    return {std::move(model), std::move(scree)};
}

/// Project a table with the training schema onto the model's components.
inline MatrixXd transform(const GroupedPcaModel& model, const FeatureTable& table) {
    MatrixXd out(table.n_rows(), model.total_components());
    Eigen::Index offset = 0;
    for (const auto& part : model.parts) {
        // Schema check: names and order must match training.
        std::vector<int> cols;
        for (Eigen::Index j = 0; j < table.n_cols(); ++j)
            if (table.metas[static_cast<std::size_t>(j)].category == part.category) cols.push_back(static_cast<int>(j));
        if (cols.size() != part.feature_names.size())
            throw SchemaError("category " + to_string(part.category) + " has " +
                              std::to_string(cols.size()) + " features, model expects " +
                              std::to_string(part.feature_names.size()));
        for (std::size_t jj = 0; jj < cols.size(); ++jj)
            if (table.metas[static_cast<std::size_t>(cols[jj])].name != part.feature_names[jj])
                throw SchemaError("schema mismatch at feature \"" +
                                  table.metas[static_cast<std::size_t>(cols[jj])].name + "\", model expects \"" +
                                  part.feature_names[jj] + "\"");

        MatrixXd z(table.n_rows(), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t jj = 0; jj < cols.size(); ++jj) {
            const auto j = static_cast<Eigen::Index>(jj);
            if (part.zero_variance[jj])
                z.col(j).setZero();
            else
                z.col(j) = (table.values.col(cols[jj]).array() - part.means[j]) / part.scales[j];
        }
        out.middleCols(offset, part.loadings.cols()) = z * part.loadings;
        offset += part.loadings.cols();
    }
    return out;
}

/// Rows (category, index, ratio, cumulative, retained) for external plotting.
inline std::vector<std::vector<std::string>> scree_export(const ScreeData& data) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"category", "component", "ratio", "cumulative", "retained"});
    for (const auto& r : data.rows)
        rows.push_back({to_string(r.category), std::to_string(r.index), csv::format_double(r.ratio),
                        csv::format_double(r.cumulative), r.retained ? "1" : "0"});
    return rows;
}

}  // namespace repayfactor::grouped_pca

#endif  // REPAYFACTOR_GROUPED_PCA_HPP
