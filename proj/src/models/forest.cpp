#include <cmath>

#include "etchforge/models.hpp"

namespace etchforge::models {

Eigen::VectorXd Forest::predict_values(const Eigen::MatrixXd& X) const {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(X.rows());
    for (const auto& tree : trees_) sum += tree.predict(X);
    return sum / static_cast<double>(trees_.size());
}

Eigen::VectorXd Forest::predict_tree(int index, const Eigen::MatrixXd& X) const {
    return trees_.at(static_cast<std::size_t>(index)).predict(X);
}

nlohmann::json Forest::params_json() const {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : trees_) trees.push_back(t.to_json());
    return {{"trees", trees}};
}

std::unique_ptr<Model> fit_forest(const Spec& spec, const FeatureMatrix& X, const Eigen::VectorXd& y) {
    const int n_trees = static_cast<int>(spec.hp("n_trees", 100));
    CartOptions options;
    options.max_depth = static_cast<int>(spec.hp("max_depth", 6));
    options.min_samples_leaf = static_cast<int>(spec.hp("min_samples_leaf", 5));
    const int d = static_cast<int>(X.values.cols());
    options.features_per_split =
        static_cast<int>(spec.hp("features_per_split", std::max(1.0, std::floor(std::sqrt(d)))));

    const int n = static_cast<int>(X.values.rows());
    auto model = std::make_unique<Forest>();
    model->trees_.reserve(static_cast<std::size_t>(n_trees));
    for (int i = 0; i < n_trees; ++i) {
        // fixed seed-splitting rule: tree i draws from its own stream
        Rng tree_rng(mix_seed(spec.seed ^ 0x464f52455354ULL) ^ mix_seed(static_cast<std::uint64_t>(i) + 1));
        std::vector<int> bootstrap(static_cast<std::size_t>(n));
        for (auto& r : bootstrap) r = static_cast<int>(tree_rng.below(static_cast<std::uint64_t>(n)));
        model->trees_.push_back(CartTree::fit(X.values, y, bootstrap, options, &tree_rng));
    }

    model->bind(spec, X.names);
    return model;
}

std::unique_ptr<Model> load_forest(const nlohmann::json& p) {
    auto model = std::make_unique<Forest>();
    for (const auto& t : p.at("trees")) model->trees_.push_back(CartTree::from_json(t));
    return model;
}

}  // namespace etchforge::models
