#pragma once

// Test-only oracles, deliberately independent of the implementation paths
// they check.

#include <Eigen/Dense>
#include <algorithm>
#include <vector>

#include "etchforge/events.hpp"
#include "etchforge/labeling.hpp"

namespace oracles {

/// O(n^2) TTF: for every run, sum the durations of all later runs in the
/// same segment, directly from the definition. The set sum is accumulated in
/// descending start order; with any other order exact (bitwise) comparison
/// against a descending counter would be ill-posed, since float addition is
/// not associative.
inline std::vector<double> brute_force_ttf(const etchforge::EventLog& log,
                                           const etchforge::Segment& segment) {
    const auto& idx = segment.run_indices;
    std::vector<std::size_t> by_start(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) by_start[i] = i;
    std::sort(by_start.begin(), by_start.end(), [&](std::size_t a, std::size_t b) {
        return log.runs[idx[a]].start > log.runs[idx[b]].start;  // latest first
    });

    std::vector<double> ttf(idx.size(), 0.0);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        double sum = 0.0;
        for (std::size_t j : by_start) {
            if (log.runs[idx[j]].start > log.runs[idx[i]].start) sum += log.runs[idx[j]].duration;
        }
        ttf[i] = sum;
    }
    return ttf;
}

/// Least squares through the SVD pseudo-inverse; independent of the normal
/// equations route used by the production solver.
inline Eigen::VectorXd pinv_least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    Eigen::MatrixXd design(X.rows(), X.cols() + 1);
    design.col(0).setOnes();
    design.rightCols(X.cols()) = X;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return svd.solve(y);  // [intercept, coef...]
}

/// Central finite differences of f at theta.
template <typename F>
Eigen::VectorXd finite_difference_gradient(F f, Eigen::VectorXd theta, double h) {
    Eigen::VectorXd g(theta.size());
    for (Eigen::Index k = 0; k < theta.size(); ++k) {
        const double saved = theta(k);
        theta(k) = saved + h;
        const double up = f(theta);
        theta(k) = saved - h;
        const double down = f(theta);
        theta(k) = saved;
        g(k) = (up - down) / (2.0 * h);
    }
    return g;
}

/// Exhaustive best split threshold for a depth-1 regression/gini stump:
/// maximizes SSE reduction over every midpoint of a single feature.
inline double brute_force_stump_threshold(const std::vector<double>& x, const std::vector<double>& y,
                                          int min_leaf) {
    std::vector<std::size_t> order(x.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });

    const auto sse = [&](std::size_t lo, std::size_t hi) {  // [lo, hi)
        double mean = 0.0;
        for (std::size_t i = lo; i < hi; ++i) mean += y[order[i]];
        mean /= static_cast<double>(hi - lo);
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += (y[order[i]] - mean) * (y[order[i]] - mean);
        return s;
    };

    double best_gain = -1.0, best_threshold = 0.0;
    const double total = sse(0, x.size());
    for (std::size_t i = static_cast<std::size_t>(min_leaf); i + static_cast<std::size_t>(min_leaf) <= x.size();
         ++i) {
        if (x[order[i - 1]] == x[order[i]]) continue;
        const double gain = total - sse(0, i) - sse(i, x.size());
        if (gain > best_gain) {
            best_gain = gain;
            best_threshold = 0.5 * (x[order[i - 1]] + x[order[i]]);
        }
    }
    return best_threshold;
}

}  // namespace oracles
