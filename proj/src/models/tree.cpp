#include <numeric>

#include "etchforge/models.hpp"

namespace etchforge::models {

Eigen::VectorXd DecisionTree::predict_values(const Eigen::MatrixXd& X) const { return tree_.predict(X); }

nlohmann::json DecisionTree::params_json() const { return {{"tree", tree_.to_json()}}; }

std::unique_ptr<Model> fit_tree(const Spec& spec, const FeatureMatrix& X, const Eigen::VectorXd& y) {
    CartOptions options;
    options.max_depth = static_cast<int>(spec.hp("max_depth", 6));
    options.min_samples_leaf = static_cast<int>(spec.hp("min_samples_leaf", 5));

    std::vector<int> rows(static_cast<std::size_t>(X.values.rows()));
    std::iota(rows.begin(), rows.end(), 0);

    auto model = std::make_unique<DecisionTree>();
    model->tree_ = CartTree::fit(X.values, y, rows, options);
    model->bind(spec, X.names);
    return model;
}

std::unique_ptr<Model> load_tree(const nlohmann::json& p) {
    auto model = std::make_unique<DecisionTree>();
    model->tree_ = CartTree::from_json(p.at("tree"));
    return model;
}

}  // namespace etchforge::models
