#ifndef REPAYFACTOR_ELASTIC_NET_HPP
#define REPAYFACTOR_ELASTIC_NET_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "repayfactor/evaluate.hpp"
#include "repayfactor/types.hpp"

namespace repayfactor::elastic_net {

struct EnetConfig {
    std::vector<double> alpha_grid = {0.1, 0.3, 0.5, 0.7, 0.9};
    double gamma = 5e-3;       // lambda_min / lambda_max
    int path_length = 100;     // L
    double tolerance = 1e-7;   // max coefficient change, standardized scale
    int max_iters = 10000;
};

struct EnetPath {
    double alpha = 0;
    VectorXd lambdas;       // descending, length L
    MatrixXd coefficients;  // p x L, original scale
    VectorXd intercepts;    // L
    std::vector<int> active_counts;  // per lambda
};

struct EnetModel {
    double alpha = 0;
    double lambda = 0;
    VectorXd coefficients;  // original scale
    double intercept = 0;
    std::vector<int> active_set;            // indices of nonzero coefficients
    std::vector<std::string> active_names;  // filled when names are supplied
    double cv_rmse = 0;
};

struct Standardized {
    MatrixXd Z;          // columns mean 0, variance 1 (denominator n)
    VectorXd means;
    VectorXd scales;     // 0 marks a zero-variance column
    VectorXd y_centered;
    double y_mean = 0;
};

inline Standardized standardize(const MatrixXd& X, const VectorXd& y) {
    Standardized s;
    const Eigen::Index n = X.rows(), p = X.cols();
    s.Z.resize(n, p);
    s.means.resize(p);
    s.scales.resize(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        const double mean = X.col(j).mean();
        const double var = (X.col(j).array() - mean).square().sum() / static_cast<double>(n);
        s.means[j] = mean;
        if (var <= 1e-24) {
            s.scales[j] = 0.0;
            s.Z.col(j).setZero();
        } else {
            s.scales[j] = std::sqrt(var);
            s.Z.col(j) = (X.col(j).array() - mean) / s.scales[j];
        }
    }
    s.y_mean = y.mean();
    s.y_centered = y.array() - s.y_mean;
    return s;
}

inline double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

/// Smallest lambda at which the solution is identically zero. X must be
/// standardized (mean 0, variance 1, denominator n).
inline double lambda_max(const MatrixXd& X, const VectorXd& y, double alpha) {
    if (alpha <= 0.0) throw DomainError("lambda_max is unbounded at alpha=0 (pure ridge)");
    const double n = static_cast<double>(X.rows());
    double best = 0.0;
    for (Eigen::Index j = 0; j < X.cols(); ++j)
        best = std::max(best, std::abs(X.col(j).dot(y)) / n);
    return best / alpha;
}

/// Eq-style penalized objective on standardized data; used by property tests.
inline double objective(const MatrixXd& Z, const VectorXd& yc, const VectorXd& beta,
                        double lambda, double alpha) {
    const double n = static_cast<double>(Z.rows());
    const double rss = (yc - Z * beta).squaredNorm() / (2.0 * n);
    return rss + lambda * alpha * beta.template lpNorm<1>() +
           0.5 * lambda * (1.0 - alpha) * beta.squaredNorm();
}

namespace detail {

/// Cyclic coordinate descent at one lambda, warm-started from beta.
/// Residual r = yc - Z beta is maintained by the caller across lambdas.
inline void descend(const Standardized& s, double lambda, double alpha, double tol, int max_iters,
                    VectorXd& beta, VectorXd& r, int lambda_index) {
    const double n = static_cast<double>(s.Z.rows());
    const Eigen::Index p = s.Z.cols();
    const double thresh = lambda * alpha;
    const double denom = 1.0 + lambda * (1.0 - alpha);
    for (int iter = 0; iter < max_iters; ++iter) {
        double max_change = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            if (s.scales[j] == 0.0) continue;
            const double old = beta[j];
            const double z = s.Z.col(j).dot(r) / n + old;
            const double nw = soft_threshold(z, thresh) / denom;
            if (nw != old) {
                r += s.Z.col(j) * (old - nw);
                beta[j] = nw;
                max_change = std::max(max_change, std::abs(nw - old));
            }
        }
        if (max_change < tol) return;
    }
    throw ConvergenceError("coordinate descent exceeded max_iters at lambda index " +
                           std::to_string(lambda_index));
}

inline EnetPath fit_path_standardized(const Standardized& s, const VectorXd& lambdas,
                                      const EnetConfig& config, double alpha) {
    const Eigen::Index p = s.Z.cols();
    const Eigen::Index L = lambdas.size();
    EnetPath path;
    path.alpha = alpha;
    path.lambdas = lambdas;
    path.coefficients = MatrixXd::Zero(p, L);
    path.intercepts.resize(L);
    path.active_counts.assign(static_cast<std::size_t>(L), 0);

    VectorXd beta = VectorXd::Zero(p);
    VectorXd r = s.y_centered;
    for (Eigen::Index l = 0; l < L; ++l) {
        if (lambdas[l] > 0 || l > 0)
            detail::descend(s, lambdas[l], alpha, config.tolerance, config.max_iters, beta, r,
                            static_cast<int>(l));
        int active = 0;
        double dot_means = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            if (beta[j] != 0.0) ++active;
            const double orig = s.scales[j] > 0 ? beta[j] / s.scales[j] : 0.0;
            path.coefficients(j, l) = orig;
            dot_means += orig * s.means[j];
        }
        path.active_counts[static_cast<std::size_t>(l)] = active;
        path.intercepts[l] = s.y_mean - dot_means;
    }
    return path;
}

inline VectorXd lambda_grid(double lmax, double gamma, int length) {
    if (lmax <= 0.0) {
        // Degenerate: y orthogonal to every column; single-point path.
        VectorXd one(1);
        one[0] = 0.0;
        return one;
    }
    VectorXd grid(length);
    const double log_max = std::log(lmax);
    const double log_min = std::log(lmax * gamma);
    for (int l = 0; l < length; ++l) {
        const double t = length > 1 ? static_cast<double>(l) / static_cast<double>(length - 1) : 0.0;
        grid[l] = std::exp(log_max + t * (log_min - log_max));
    }
    grid[0] = lmax;  // exact path start
    return grid;
}

}  // namespace detail

/// Regularization path by cyclic coordinate descent with warm starts over a
/// log-spaced lambda grid from lambda_max down to gamma*lambda_max.
inline EnetPath fit_path(const MatrixXd& X, const VectorXd& y, const EnetConfig& config,
                         double alpha) {
    if (X.rows() == 0 || X.cols() == 0) throw DomainError("empty design matrix");
    if (y.size() != X.rows()) throw DomainError("design/response length mismatch");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must be in (0,1]");
    Standardized s = standardize(X, y);
    const double lmax = lambda_max(s.Z, s.y_centered, alpha);
    const VectorXd grid = detail::lambda_grid(lmax, config.gamma, config.path_length);
    return detail::fit_path_standardized(s, grid, config, alpha);
}

/// Pick (alpha, lambda) by k-fold CV on mean RMSE; ties prefer larger lambda
/// then smaller alpha; refit on all data at the winner. When `rates` is
/// given, predictions are inverse-logit mapped and scored against it.
inline EnetModel tune(const MatrixXd& X, const VectorXd& y, const EnetConfig& config, int folds,
                      std::uint64_t seed, const VectorXd* rates = nullptr,
                      const std::vector<std::string>* names = nullptr) {
    if (folds < 2) throw DomainError("need at least 2 folds");
    const Eigen::Index n = X.rows();
    const auto assignment = evaluate::make_folds(static_cast<int>(n), folds, seed);

    double best_rmse = std::numeric_limits<double>::infinity();
    double best_alpha = config.alpha_grid.front();
    double best_lambda = 0.0;

    for (double alpha : config.alpha_grid) {
        // Shared lambda grid from the full data so fold errors are comparable.
        Standardized full = standardize(X, y);
        const double lmax = lambda_max(full.Z, full.y_centered, alpha);
        const VectorXd grid = detail::lambda_grid(lmax, config.gamma, config.path_length);
        const Eigen::Index L = grid.size();

        VectorXd sum_sq = VectorXd::Zero(L);
        VectorXd counts = VectorXd::Zero(L);
        for (int f = 0; f < folds; ++f) {
            std::vector<int> train, test;
            for (int i = 0; i < static_cast<int>(n); ++i)
                (assignment.labels[static_cast<std::size_t>(i)] == f ? test : train).push_back(i);
            MatrixXd Xtr(train.size(), X.cols()), Xte(test.size(), X.cols());
            VectorXd ytr(train.size());
            for (std::size_t i = 0; i < train.size(); ++i) {
                Xtr.row(static_cast<Eigen::Index>(i)) = X.row(train[i]);
                ytr[static_cast<Eigen::Index>(i)] = y[train[i]];
            }
            for (std::size_t i = 0; i < test.size(); ++i)
                Xte.row(static_cast<Eigen::Index>(i)) = X.row(test[i]);

            Standardized s = standardize(Xtr, ytr);
            EnetPath path = detail::fit_path_standardized(s, grid, config, alpha);
            for (Eigen::Index l = 0; l < L; ++l) {
                VectorXd pred = (Xte * path.coefficients.col(l)).array() + path.intercepts[l];
                for (std::size_t i = 0; i < test.size(); ++i) {
                    double ph = pred[static_cast<Eigen::Index>(i)];
                    double actual = y[test[i]];
                    if (rates) {
                        ph = logit_linreg::inverse_logit_scalar(ph);
                        actual = (*rates)[test[i]];
                    }
                    const double d = ph - actual;
                    sum_sq[l] += d * d;
                    counts[l] += 1.0;
                }
            }
        }
        for (Eigen::Index l = 0; l < L; ++l) {
            const double rmse_l = std::sqrt(sum_sq[l] / counts[l]);
            const bool better =
                rmse_l < best_rmse - 1e-15 ||
                (std::abs(rmse_l - best_rmse) <= 1e-15 &&
                 (grid[l] > best_lambda || (grid[l] == best_lambda && alpha < best_alpha)));
            if (better) {
                best_rmse = rmse_l;
                best_alpha = alpha;
                best_lambda = grid[l];
            }
        }
    }

    // Refit on all data at the selected pair.
    Standardized s = standardize(X, y);
    VectorXd single(1);
    single[0] = best_lambda;
    // Warm-start down the path to the selected lambda for a well-converged fit.
    const double lmax = lambda_max(s.Z, s.y_centered, best_alpha);
    std::vector<double> seq;
    for (double l = lmax; l > best_lambda; l *= 0.7) seq.push_back(l);
    seq.push_back(best_lambda);
    VectorXd grid(static_cast<Eigen::Index>(seq.size()));
    for (std::size_t i = 0; i < seq.size(); ++i) grid[static_cast<Eigen::Index>(i)] = seq[i];
    EnetPath path = detail::fit_path_standardized(s, grid, config, best_alpha);

    EnetModel model;
    model.alpha = best_alpha;
    model.lambda = best_lambda;
    model.cv_rmse = best_rmse;
    model.coefficients = path.coefficients.col(path.lambdas.size() - 1);
    model.intercept = path.intercepts[path.lambdas.size() - 1];
    for (Eigen::Index j = 0; j < model.coefficients.size(); ++j) {
        if (model.coefficients[j] != 0.0) {
            model.active_set.push_back(static_cast<int>(j));
            model.active_names.push_back(names ? (*names)[static_cast<std::size_t>(j)]
                                               : "x" + std::to_string(j));
        }
    }
    return model;
}

/// Max violation of the stationarity conditions at the model's (alpha,
/// lambda) on data standardized identically to training.
inline double kkt_check(const MatrixXd& X, const VectorXd& y, const EnetModel& model) {
    Standardized s = standardize(X, y);
    const double n = static_cast<double>(X.rows());
    VectorXd beta_std(model.coefficients.size());
    for (Eigen::Index j = 0; j < beta_std.size(); ++j)
        beta_std[j] = model.coefficients[j] * s.scales[j];
    const VectorXd r = s.y_centered - s.Z * beta_std;
    double worst = 0.0;
    for (Eigen::Index j = 0; j < beta_std.size(); ++j) {
        if (s.scales[j] == 0.0) continue;
        const double grad = s.Z.col(j).dot(r) / n;
        double viol;
        if (beta_std[j] != 0.0) {
            const double sign = beta_std[j] > 0 ? 1.0 : -1.0;
            viol = std::abs(grad - model.lambda * (1.0 - model.alpha) * beta_std[j] -
                            model.lambda * model.alpha * sign);
        } else {
            viol = std::max(0.0, std::abs(grad) - model.lambda * model.alpha);
        }
        worst = std::max(worst, viol);
    }
    return worst;
}

}  // namespace repayfactor::elastic_net

#endif  // REPAYFACTOR_ELASTIC_NET_HPP
