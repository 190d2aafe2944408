#ifndef REPAYFACTOR_RECIPES_HPP
#define REPAYFACTOR_RECIPES_HPP

#include <memory>
#include <vector>

#include "repayfactor/elastic_net.hpp"
#include "repayfactor/evaluate.hpp"
#include "repayfactor/random_forest.hpp"

namespace repayfactor::recipes {

/// Elastic net on raw screened features; tunes (alpha, lambda) by inner CV
/// on the training rows only.
inline evaluate::Recipe enet_recipe(const elastic_net::EnetConfig& config, int inner_folds,
                                    std::uint64_t seed) {
    evaluate::Recipe r;
    r.tag = "enet";
    r.fit = [config, inner_folds, seed](const FeatureTable& table, const VectorXd& y,
                                        const std::vector<int>& train_rows) -> evaluate::Predictor {
        MatrixXd X(static_cast<Eigen::Index>(train_rows.size()), table.n_cols());
        VectorXd ytr(static_cast<Eigen::Index>(train_rows.size()));
        for (std::size_t i = 0; i < train_rows.size(); ++i) {
            X.row(static_cast<Eigen::Index>(i)) = table.values.row(train_rows[i]);
            ytr[static_cast<Eigen::Index>(i)] = y[train_rows[i]];
        }
        auto model = std::make_shared<elastic_net::EnetModel>(
            elastic_net::tune(X, ytr, config, inner_folds, seed));
        return [model](const FeatureTable& t, const std::vector<int>& rows) {
            VectorXd out(static_cast<Eigen::Index>(rows.size()));
            for (std::size_t i = 0; i < rows.size(); ++i)
                out[static_cast<Eigen::Index>(i)] =
                    t.values.row(rows[i]).dot(model->coefficients) + model->intercept;
            return out;
        };
    };
    return r;
}

/// Random forest on raw screened features, trained on the logit target.
inline evaluate::Recipe forest_recipe(const random_forest::ForestConfig& config, int n_threads = 1) {
    evaluate::Recipe r;
    r.tag = "forest";
    r.fit = [config, n_threads](const FeatureTable& table, const VectorXd& y,
                                const std::vector<int>& train_rows) -> evaluate::Predictor {
        MatrixXd X(static_cast<Eigen::Index>(train_rows.size()), table.n_cols());
        VectorXd ytr(static_cast<Eigen::Index>(train_rows.size()));
        for (std::size_t i = 0; i < train_rows.size(); ++i) {
            X.row(static_cast<Eigen::Index>(i)) = table.values.row(train_rows[i]);
            ytr[static_cast<Eigen::Index>(i)] = y[train_rows[i]];
        }
        auto forest = std::make_shared<random_forest::Forest>(
            random_forest::fit_forest(X, ytr, config, n_threads));
        return [forest](const FeatureTable& t, const std::vector<int>& rows) {
            MatrixXd Xp(static_cast<Eigen::Index>(rows.size()), t.n_cols());
            for (std::size_t i = 0; i < rows.size(); ++i)
                Xp.row(static_cast<Eigen::Index>(i)) = t.values.row(rows[i]);
            return random_forest::predict(*forest, Xp);
        };
    };
    return r;
}

}  // namespace repayfactor::recipes

#endif  // REPAYFACTOR_RECIPES_HPP
