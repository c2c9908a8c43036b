#pragma once

#include <Eigen/Core>
#include <cmath>

namespace etchforge::models::detail {

/// Per-column mean/std from training rows; constant columns get scale 1.
inline void fit_column_scaling(const Eigen::MatrixXd& X, Eigen::VectorXd& mean, Eigen::VectorXd& scale) {
    mean = X.colwise().mean();
    scale.resize(X.cols());
    const double n = static_cast<double>(X.rows());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double ss = (X.col(j).array() - mean(j)).square().sum();
        const double sd = n > 1.0 ? std::sqrt(ss / (n - 1.0)) : 0.0;
        scale(j) = sd > 0.0 ? sd : 1.0;
    }
}

/// Identity when no scaling was fitted (empty mean).
inline Eigen::MatrixXd apply_column_scaling(const Eigen::MatrixXd& X, const Eigen::VectorXd& mean,
                                            const Eigen::VectorXd& scale) {
    if (mean.size() == 0) return X;
    Eigen::MatrixXd out = X.rowwise() - mean.transpose();
    out.array().rowwise() /= scale.transpose().array();
    return out;
}

}  // namespace etchforge::models::detail
