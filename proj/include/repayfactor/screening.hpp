#ifndef REPAYFACTOR_SCREENING_HPP
#define REPAYFACTOR_SCREENING_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "repayfactor/types.hpp"

namespace repayfactor::screening {

struct ScreeningConfig {
    double variance_drop_fraction = 0.10;  // a
    int top_count = 500;                   // b
    std::string target_name = "RPY_1YR_RT";
};

struct ScreenReport {
    std::vector<std::pair<std::string, double>> dropped_by_variance;  // (name, variance)
    std::vector<std::pair<std::string, double>> selected;  // (name, |corr|) descending
    std::string target_name;
};

struct QuantileSummary {
    std::string name;
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
    bool empty = false;  // all-missing variable
};

/// Sample variance, denominator n-1. Fixed left-to-right summation order.
inline double sample_variance(const Eigen::Ref<const VectorXd>& x) {
    const Eigen::Index n = x.size();
    if (n < 2) return 0.0;
    double mean = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) mean += x[i];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d = x[i] - mean;
        ss += d * d;
    }
    return ss / static_cast<double>(n - 1);
}

/// Pearson correlation; constant vectors yield 0.
inline double pearson(const Eigen::Ref<const VectorXd>& x, const Eigen::Ref<const VectorXd>& y) {
    const Eigen::Index n = x.size();
    double mx = 0, my = 0;
    for (Eigen::Index i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0, sxx = 0, syy = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

/// Pull the target column (missing rows dropped, not zero-filled) and remove
/// every Repayment-category column from the predictors.
inline std::pair<VectorXd, FeatureTable> select_target(const FeatureTable& table,
                                                       const std::string& name) {
    const int tcol = table.column_index(name);
    if (tcol < 0) throw DomainError("unknown target variable: " + name);
    if (table.metas[static_cast<std::size_t>(tcol)].category != Category::Repayment)
        throw DomainError("target \"" + name +
                          "\" is not in the Repayment category; refusing to fit on it");

    std::vector<int> rows;
    for (Eigen::Index i = 0; i < table.n_rows(); ++i)
        if (!table.missing[static_cast<std::size_t>(i)][static_cast<std::size_t>(tcol)])
            rows.push_back(static_cast<int>(i));
    FeatureTable sub = table.select_rows(rows);

    VectorXd target(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) target[static_cast<Eigen::Index>(i)] = sub.values(static_cast<Eigen::Index>(i), tcol);

    std::vector<int> keep;
    for (Eigen::Index j = 0; j < sub.n_cols(); ++j)
        if (sub.metas[static_cast<std::size_t>(j)].category != Category::Repayment)
            keep.push_back(static_cast<int>(j));
    return {std::move(target), sub.select_columns(keep)};
}

/// Drop the floor(a*p) lowest-variance features; ties by ascending name.
inline std::pair<FeatureTable, std::vector<std::pair<std::string, double>>>
variance_screen(const FeatureTable& table, double a) {
    if (a < 0.0 || a >= 1.0) throw DomainError("variance drop fraction must be in [0,1)");
    const Eigen::Index p = table.n_cols();
    const auto n_drop = static_cast<Eigen::Index>(std::floor(a * static_cast<double>(p)));
    std::vector<std::pair<double, std::string>> ranked;  // (variance, name)
    std::vector<double> variances(static_cast<std::size_t>(p));
    for (Eigen::Index j = 0; j < p; ++j) {
        variances[static_cast<std::size_t>(j)] = sample_variance(table.values.col(j));
        ranked.emplace_back(variances[static_cast<std::size_t>(j)], table.metas[static_cast<std::size_t>(j)].name);
    }
    std::sort(ranked.begin(), ranked.end());
    std::vector<std::pair<std::string, double>> dropped;
    std::vector<bool> drop_flag(static_cast<std::size_t>(p), false);
    for (Eigen::Index k = 0; k < n_drop; ++k) {
        const auto& [var, name] = ranked[static_cast<std::size_t>(k)];
        dropped.emplace_back(name, var);
        for (Eigen::Index j = 0; j < p; ++j)
            if (table.metas[static_cast<std::size_t>(j)].name == name) drop_flag[static_cast<std::size_t>(j)] = true;
    }
    std::vector<int> keep;
    for (Eigen::Index j = 0; j < p; ++j)
        if (!drop_flag[static_cast<std::size_t>(j)]) keep.push_back(static_cast<int>(j));
    return {table.select_columns(keep), std::move(dropped)};
}

/// Keep the top min(b,p) features by |Pearson correlation| with the target.
inline std::pair<FeatureTable, ScreenReport> correlation_screen(const FeatureTable& table,
                                                                const VectorXd& target, int b,
                                                                const std::string& target_name = "") {
    if (b < 1) throw DomainError("top_count must be >= 1");
    if (target.size() != table.n_rows())
        throw DomainError("target length does not match table row count");
    if (sample_variance(target) <= 0.0)
        throw DomainError("degenerate target: zero variance");

    const Eigen::Index p = table.n_cols();
    // (-|corr|, name, index): sort ascending gives descending |corr|,
    // ties by ascending name.
    std::vector<std::tuple<double, std::string, int>> ranked;
    ranked.reserve(static_cast<std::size_t>(p));
    for (Eigen::Index j = 0; j < p; ++j) {
        const double c = pearson(table.values.col(j), target);
        ranked.emplace_back(-std::abs(c), table.metas[static_cast<std::size_t>(j)].name, static_cast<int>(j));
    }
    std::sort(ranked.begin(), ranked.end());
    const auto kept = std::min<std::size_t>(static_cast<std::size_t>(b), ranked.size());

    ScreenReport report;
    report.target_name = target_name;
    std::vector<bool> keep_flag(static_cast<std::size_t>(p), false);
    for (std::size_t k = 0; k < kept; ++k) {
        const auto& [negabs, name, j] = ranked[k];
        report.selected.emplace_back(name, -negabs);
        keep_flag[static_cast<std::size_t>(j)] = true;
    }
    std::vector<int> keep;  // survivors keep original order
    for (Eigen::Index j = 0; j < p; ++j)
        if (keep_flag[static_cast<std::size_t>(j)]) keep.push_back(static_cast<int>(j));
    return {table.select_columns(keep), std::move(report)};
}

/// Five-number summary over non-missing cells; quantiles by linear
/// interpolation between order statistics.
inline std::vector<QuantileSummary> summarize_rates(const FeatureTable& table,
                                                    const std::vector<std::string>& names) {
    auto quantile = [](const std::vector<double>& sorted, double q) {
        const double pos = q * static_cast<double>(sorted.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = static_cast<std::size_t>(std::ceil(pos));
        const double frac = pos - static_cast<double>(lo);
        return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
    };
    std::vector<QuantileSummary> out;
    for (const auto& name : names) {
        const int j = table.column_index(name);
        if (j < 0) throw DomainError("unknown variable in summary request: " + name);
        std::vector<double> vals;
        for (Eigen::Index i = 0; i < table.n_rows(); ++i)
            if (!table.missing[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])
                vals.push_back(table.values(i, j));
        QuantileSummary s;
        s.name = name;
        if (vals.empty()) {
            s.empty = true;
        } else {
            std::sort(vals.begin(), vals.end());
            s.min = vals.front();
            s.max = vals.back();
            s.q1 = quantile(vals, 0.25);
            s.median = quantile(vals, 0.50);
            s.q3 = quantile(vals, 0.75);
        }
        out.push_back(std::move(s));
    }
    return out;
}

struct HeatmapData {
    std::vector<std::string> names;
    MatrixXd matrix;  // k x k, symmetric, unit diagonal
};

/// Pairwise correlations among the top-k |corr|-with-target features.
inline HeatmapData correlation_heatmap(const FeatureTable& table, const VectorXd& target, int k = 20) {
    if (k > table.n_cols()) throw DomainError("heatmap k exceeds feature count");
    auto [top, report] = correlation_screen(table, target, k);
    HeatmapData h;
    const Eigen::Index kk = top.n_cols();
    h.matrix.resize(kk, kk);
    for (Eigen::Index j = 0; j < kk; ++j) h.names.push_back(top.metas[static_cast<std::size_t>(j)].name);
    for (Eigen::Index a = 0; a < kk; ++a) {
        h.matrix(a, a) = 1.0;
        for (Eigen::Index b2 = a + 1; b2 < kk; ++b2) {
            const double c = pearson(top.values.col(a), top.values.col(b2));
            h.matrix(a, b2) = c;
            h.matrix(b2, a) = c;
        }
    }
    return h;
}

}  // namespace repayfactor::screening

#endif  // REPAYFACTOR_SCREENING_HPP
