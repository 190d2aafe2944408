#ifndef REPAYFACTOR_LOGIT_LINREG_HPP
#define REPAYFACTOR_LOGIT_LINREG_HPP

#include <Eigen/QR>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <string>
#include <vector>

#include "repayfactor/types.hpp"

namespace repayfactor::logit_linreg {

struct TransformedTarget {
    VectorXd raw_rates;    // p in [0,1]
    VectorXd transformed;  // log-odds of clamped rates
    double epsilon = 1e-6;

    /// Rates after clamping into [eps, 1-eps]; the quantity predictions
    /// are scored against on the rate scale.
    VectorXd clamped() const {
        VectorXd out = raw_rates;
        for (Eigen::Index i = 0; i < out.size(); ++i)
            out[i] = std::min(std::max(out[i], epsilon), 1.0 - epsilon);
        return out;
    }
};

/// log(p/(1-p)) after clamping into [eps, 1-eps].
inline TransformedTarget logit_transform(const VectorXd& p, double epsilon = 1e-6) {
    if (!(epsilon > 0.0 && epsilon < 0.5)) throw DomainError("epsilon must be in (0, 0.5)");
    TransformedTarget t;
    t.raw_rates = p;
    t.epsilon = epsilon;
    t.transformed.resize(p.size());
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (!(p[i] >= 0.0 && p[i] <= 1.0))
            throw DomainError("rate outside [0,1] at index " + std::to_string(i));
        const double q = std::min(std::max(p[i], epsilon), 1.0 - epsilon);
        t.transformed[i] = std::log(q / (1.0 - q));
    }
    return t;
}

/// exp(y)/(1+exp(y)), stable for large |y|.
inline double inverse_logit_scalar(double y) {
    if (y >= 0) return 1.0 / (1.0 + std::exp(-y));
    const double e = std::exp(y);
    return e / (1.0 + e);
}

inline VectorXd inverse_logit(const VectorXd& y) {
    VectorXd p(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) p[i] = inverse_logit_scalar(y[i]);
    return p;
}

struct LinearModel {
    double intercept = 0;
    VectorXd coefficients;     // d
    VectorXd std_errors;       // d+1, intercept first
    VectorXd t_stats;          // d+1
    VectorXd p_values;         // d+1
    double r_squared = 0;
    double residual_variance = 0;
    Eigen::Index dof = 0;
};

/// OLS with intercept via column-pivoted QR; inference from the t
/// distribution with n-d-1 degrees of freedom.
inline LinearModel fit_ols(const MatrixXd& X, const VectorXd& y) {
    const Eigen::Index n = X.rows(), d = X.cols();
    if (y.size() != n) throw DomainError("design/response length mismatch");
    if (n <= d + 1) throw DomainError("need n > d+1 observations for OLS inference");

    MatrixXd A(n, d + 1);
    A.col(0).setOnes();
    A.rightCols(d) = X;

    Eigen::ColPivHouseholderQR<MatrixXd> qr(A);
    qr.setThreshold(1e-10);
    if (qr.rank() < d + 1) {
        // Name a column involved in the dependency: the first pivot beyond
        // the numerical rank.
        const auto bad = qr.colsPermutation().indices()[qr.rank()];
        throw DomainError("rank-deficient design: column " + std::to_string(bad) +
                          " (0 = intercept) is linearly dependent");
    }
    const VectorXd beta = qr.solve(y);
    const VectorXd fitted = A * beta;
    const VectorXd resid = y - fitted;

    LinearModel m;
    m.intercept = beta[0];
    m.coefficients = beta.tail(d);
    m.dof = n - d - 1;
    m.residual_variance = resid.squaredNorm() / static_cast<double>(m.dof);

    // Unscaled inverse Gram diagonal from the QR factors.
    const MatrixXd gram_inv = (A.transpose() * A).ldlt().solve(MatrixXd::Identity(d + 1, d + 1));
    m.std_errors.resize(d + 1);
    m.t_stats.resize(d + 1);
    m.p_values.resize(d + 1);
    const boost::math::students_t dist(static_cast<double>(m.dof));
    for (Eigen::Index j = 0; j < d + 1; ++j) {
        m.std_errors[j] = std::sqrt(m.residual_variance * gram_inv(j, j));
        m.t_stats[j] = m.std_errors[j] > 0 ? beta[j] / m.std_errors[j] : 0.0;
        m.p_values[j] = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(m.t_stats[j])));
    }

    const double ymean = y.mean();
    const double tss = (y.array() - ymean).square().sum();
    m.r_squared = tss > 0 ? 1.0 - resid.squaredNorm() / tss : 1.0;
    return m;
}

inline VectorXd predict_linear(const LinearModel& m, const MatrixXd& X) {
    if (X.cols() != m.coefficients.size())
        throw DomainError("prediction design has " + std::to_string(X.cols()) +
                          " columns, model expects " + std::to_string(m.coefficients.size()));
    return (X * m.coefficients).array() + m.intercept;
}

/// Linear prediction composed with the inverse logit; outputs in (0,1).
inline VectorXd predict_rates(const LinearModel& m, const MatrixXd& X) {
    return inverse_logit(predict_linear(m, X));
}

}  // namespace repayfactor::logit_linreg

#endif  // REPAYFACTOR_LOGIT_LINREG_HPP
