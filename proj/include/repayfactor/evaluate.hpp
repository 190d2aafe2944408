#ifndef REPAYFACTOR_EVALUATE_HPP
#define REPAYFACTOR_EVALUATE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "repayfactor/grouped_pca.hpp"
#include "repayfactor/logit_linreg.hpp"
#include "repayfactor/types.hpp"

namespace repayfactor::evaluate {

struct FoldAssignment {
    int k = 0;
    std::vector<int> labels;  // length n, entries in [0, k)
};

/// Seeded shuffle dealt round-robin; fold sizes differ by at most 1.
inline FoldAssignment make_folds(int n, int k, std::uint64_t seed) {
    if (k < 2 || k > n) throw DomainError("folds must satisfy 2 <= k <= n");
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::mt19937_64 rng(seed);
    // Fisher-Yates, explicit bounded draws for cross-platform determinism.
    for (int i = n - 1; i > 0; --i) {
        const std::uint64_t bound = static_cast<std::uint64_t>(i) + 1;
        const std::uint64_t limit =
            std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t v;
        do {
            v = rng();
        } while (v >= limit);
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(v % bound)]);
    }
    FoldAssignment a;
    a.k = k;
    a.labels.assign(static_cast<std::size_t>(n), 0);
    for (int pos = 0; pos < n; ++pos) a.labels[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] = pos % k;
    return a;
}

inline double rmse(const VectorXd& predicted, const VectorXd& actual) {
    if (predicted.size() != actual.size()) throw DomainError("rmse: length mismatch");
    if (predicted.size() == 0) throw DomainError("rmse: empty vectors");
    return std::sqrt((predicted - actual).squaredNorm() / static_cast<double>(predicted.size()));
}

struct CvReport {
    std::vector<double> per_fold_rmse;
    double mean_rmse = 0;
    double std_rmse = 0;
    std::string model_tag;
    std::vector<double> per_fold_train_rmse;
    double mean_train_rmse = 0;
};

/// A predictor maps (table, row indices) to logit-scale predictions.
using Predictor = std::function<VectorXd(const FeatureTable&, const std::vector<int>&)>;

/// A recipe fits itself on training rows only and returns a predictor.
struct Recipe {
    std::string tag;
    std::function<Predictor(const FeatureTable&, const VectorXd& y_logit,
                            const std::vector<int>& train_rows)>
        fit;
};

/// k-fold CV with rate-scale RMSE. The whole recipe (PCA, standardization,
/// tuning) refits inside each training fold; held-out rows contribute
/// nothing to fitting.
inline CvReport cross_validate(const Recipe& recipe, const FeatureTable& table,
                               const logit_linreg::TransformedTarget& target, int k,
                               std::uint64_t seed, bool record_train = false) {
    const auto n = static_cast<int>(table.n_rows());
    if (target.transformed.size() != n) throw DomainError("target length mismatch");
    const FoldAssignment folds = make_folds(n, k, seed);
    const VectorXd rates = target.clamped();

    CvReport report;
    report.model_tag = recipe.tag;
    for (int f = 0; f < k; ++f) {
        std::vector<int> train, test;
        for (int i = 0; i < n; ++i)
            (folds.labels[static_cast<std::size_t>(i)] == f ? test : train).push_back(i);
        Predictor predictor;
        try {
            predictor = recipe.fit(table, target.transformed, train);
        } catch (const Error& e) {
            throw Error("fold " + std::to_string(f) + ": " + e.what());
        }
        auto score = [&](const std::vector<int>& rows) {
            const VectorXd pred_rates = logit_linreg::inverse_logit(predictor(table, rows));
            VectorXd actual(static_cast<Eigen::Index>(rows.size()));
            for (std::size_t i = 0; i < rows.size(); ++i) actual[static_cast<Eigen::Index>(i)] = rates[rows[i]];
            return rmse(pred_rates, actual);
        };
        report.per_fold_rmse.push_back(score(test));
        if (record_train) report.per_fold_train_rmse.push_back(score(train));
    }

    double sum = 0;
    for (double v : report.per_fold_rmse) sum += v;
    report.mean_rmse = sum / static_cast<double>(k);
    double sq = 0;
    for (double v : report.per_fold_rmse) sq += (v - report.mean_rmse) * (v - report.mean_rmse);
    report.std_rmse = std::sqrt(sq / static_cast<double>(k));
    if (record_train) {
        double ts = 0;
        for (double v : report.per_fold_train_rmse) ts += v;
        report.mean_train_rmse = ts / static_cast<double>(k);
    }
    return report;
}

/// Grouped-PCA + OLS on the logit target; the baseline recipe.
inline Recipe pca_ols_recipe(double cutoff) {
    Recipe r;
    r.tag = "pca-ols";
    r.fit = [cutoff](const FeatureTable& table, const VectorXd& y,
                     const std::vector<int>& train_rows) -> Predictor {
        const FeatureTable train = table.select_rows(train_rows);
        auto [model, scree] = grouped_pca::fit_grouped_pca(train, cutoff);
        VectorXd ytr(static_cast<Eigen::Index>(train_rows.size()));
        for (std::size_t i = 0; i < train_rows.size(); ++i) ytr[static_cast<Eigen::Index>(i)] = y[train_rows[i]];
        const MatrixXd comps = grouped_pca::transform(model, train);
        const logit_linreg::LinearModel lm = logit_linreg::fit_ols(comps, ytr);
        auto pca = std::make_shared<grouped_pca::GroupedPcaModel>(std::move(model));
        auto ols = std::make_shared<logit_linreg::LinearModel>(lm);
        return [pca, ols](const FeatureTable& t, const std::vector<int>& rows) {
            const MatrixXd c = grouped_pca::transform(*pca, t.select_rows(rows));
            return logit_linreg::predict_linear(*ols, c);
        };
    };
    return r;
}

struct ValidationCurve {
    std::vector<double> cutoffs;
    std::vector<double> train_rmse;
    std::vector<double> val_rmse;
    std::vector<int> component_counts;
};

/// CV sweep of the pca+ols recipe over explained-variance cutoffs; component
/// counts come from a full-data fit at each cutoff.
inline ValidationCurve validation_curve(const FeatureTable& table,
                                        const logit_linreg::TransformedTarget& target,
                                        const std::vector<double>& cutoffs, int k,
                                        std::uint64_t seed) {
    ValidationCurve curve;
    for (double c : cutoffs) {
        if (!(c > 0.0 && c <= 1.0)) throw DomainError("cutoff must be in (0,1]");
        const CvReport report = cross_validate(pca_ols_recipe(c), table, target, k, seed, true);
        auto [model, scree] = grouped_pca::fit_grouped_pca(table, c);
        curve.cutoffs.push_back(c);
        curve.val_rmse.push_back(report.mean_rmse);
        curve.train_rmse.push_back(report.mean_train_rmse);
        curve.component_counts.push_back(static_cast<int>(model.total_components()));
    }
    return curve;
}

struct ComparisonRow {
    std::string model_tag;
    double mean_rmse = 0;
    double std_rmse = 0;
};

/// Rows sorted ascending by mean RMSE; ties by tag.
inline std::vector<ComparisonRow> compare_models(const std::vector<CvReport>& reports) {
    if (reports.empty()) throw DomainError("no reports to compare");
    std::vector<ComparisonRow> rows;
    for (const auto& r : reports) rows.push_back({r.model_tag, r.mean_rmse, r.std_rmse});
    std::sort(rows.begin(), rows.end(), [](const ComparisonRow& a, const ComparisonRow& b) {
        if (a.mean_rmse != b.mean_rmse) return a.mean_rmse < b.mean_rmse;
        return a.model_tag < b.model_tag;
    });
    return rows;
}

}  // namespace repayfactor::evaluate

#endif  // REPAYFACTOR_EVALUATE_HPP
