#pragma once

#include <Eigen/Core>
#include <nlohmann/json.hpp>
#include <vector>

#include "etchforge/rng.hpp"

namespace etchforge::models {

struct CartNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;  // leaf mean target (positive fraction for 0/1 targets)
};

struct CartOptions {
    int max_depth = 6;
    int min_samples_leaf = 5;
    int features_per_split = 0;  // 0 = consider every feature
};

/// CART with midpoint thresholds and deterministic tie-breaking (lowest
/// feature index, then lowest threshold). Split quality is the weighted
/// sum-of-squares reduction; on 0/1 targets that ranks splits identically to
/// Gini gain, so the same engine serves classification and regression.
class CartTree {
public:
    /// `rows` selects (with repetition allowed, for bootstrap samples) the
    /// training rows. `rng` is only consulted when features_per_split > 0.
    static CartTree fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<int>& rows,
                        const CartOptions& options, Rng* rng = nullptr);

    double predict_row(const Eigen::MatrixXd& X, Eigen::Index row) const;
    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
    int leaf_of(const Eigen::MatrixXd& X, Eigen::Index row) const;

    const std::vector<CartNode>& nodes() const { return nodes_; }
    void set_leaf_value(int node, double value);  // boosting rewrites leaves

    nlohmann::json to_json() const;
    static CartTree from_json(const nlohmann::json& j);

private:
    int build(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::vector<int>& rows, int depth,
              const CartOptions& options, Rng* rng);

    std::vector<CartNode> nodes_;
};

}  // namespace etchforge::models
