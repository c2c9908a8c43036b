#include <cmath>
#include <numeric>

#include "etchforge/models.hpp"

namespace etchforge::models {
namespace {

double stable_sigmoid(double x) {
    if (x >= 0.0) {
        const double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

constexpr double kLeafClip = 4.0;

}  // namespace

Gbc Gbc::init(const Spec& spec, const FeatureMatrix& X, const Eigen::VectorXd& y) {
    Gbc model;
    model.learning_rate_ = spec.hp("learning_rate", 0.1);
    model.max_depth_ = static_cast<int>(spec.hp("max_depth", 2));
    model.min_samples_leaf_ = static_cast<int>(spec.hp("min_samples_leaf", 5));

    const double positives = y.sum();
    const double rate = positives / static_cast<double>(y.size());
    const double clamped = std::min(std::max(rate, 1e-12), 1.0 - 1e-12);
    model.base_score_ = std::log(clamped / (1.0 - clamped));
    model.state_score_ = Eigen::VectorXd::Constant(y.size(), model.base_score_);
    model.bind(spec, X.names);
    return model;
}

void Gbc::fit_round(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    Eigen::VectorXd residual(y.size());
    Eigen::VectorXd hessian(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double p = stable_sigmoid(state_score_(i));
        residual(i) = y(i) - p;  // negative gradient of logistic loss
        hessian(i) = std::max(p * (1.0 - p), 1e-12);
    }

    CartOptions options;
    options.max_depth = max_depth_;
    options.min_samples_leaf = min_samples_leaf_;
    std::vector<int> rows(static_cast<std::size_t>(y.size()));
    std::iota(rows.begin(), rows.end(), 0);
    CartTree tree = CartTree::fit(X, residual, rows, options);

    // Newton step per terminal region: sum(residual)/sum(p(1-p)), clipped.
    std::map<int, std::pair<double, double>> leaf_sums;  // leaf -> (grad, hess)
    std::vector<int> leaf_of(static_cast<std::size_t>(y.size()));
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const int leaf = tree.leaf_of(X, i);
        leaf_of[static_cast<std::size_t>(i)] = leaf;
        leaf_sums[leaf].first += residual(i);
        leaf_sums[leaf].second += hessian(i);
    }
    for (const auto& [leaf, sums] : leaf_sums) {
        const double value = std::min(std::max(sums.first / sums.second, -kLeafClip), kLeafClip);
        tree.set_leaf_value(leaf, value);
    }

    for (Eigen::Index i = 0; i < y.size(); ++i) {
        state_score_(i) += learning_rate_ * tree.nodes()[leaf_of[static_cast<std::size_t>(i)]].value;
    }
    trees_.push_back(std::move(tree));
}

double Gbc::train_log_loss(const Eigen::VectorXd& y) const {
    double total = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double p = std::min(std::max(stable_sigmoid(state_score_(i)), 1e-12), 1.0 - 1e-12);
        total += -y(i) * std::log(p) - (1.0 - y(i)) * std::log(1.0 - p);
    }
    return total / static_cast<double>(y.size());
}

Eigen::VectorXd Gbc::predict_values(const Eigen::MatrixXd& X) const {
    Eigen::VectorXd score = Eigen::VectorXd::Constant(X.rows(), base_score_);
    for (const auto& tree : trees_) score += learning_rate_ * tree.predict(X);
    for (Eigen::Index i = 0; i < score.size(); ++i) score(i) = stable_sigmoid(score(i));
    return score;
}

nlohmann::json Gbc::params_json() const {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : trees_) trees.push_back(t.to_json());
    return {{"base_score", base_score_},
            {"learning_rate", learning_rate_},
            {"max_depth", max_depth_},
            {"min_samples_leaf", min_samples_leaf_},
            {"trees", trees}};
}

std::unique_ptr<Model> fit_gbc(const Spec& spec, const FeatureMatrix& X, const Eigen::VectorXd& y) {
    auto model = std::make_unique<Gbc>(Gbc::init(spec, X, y));
    const int rounds = static_cast<int>(spec.hp("rounds", 100));
    for (int r = 0; r < rounds; ++r) model->fit_round(X.values, y);
    return model;
}

std::unique_ptr<Model> load_gbc(const nlohmann::json& p) {
    auto model = std::make_unique<Gbc>();
    model->base_score_ = p.at("base_score").get<double>();
    model->learning_rate_ = p.at("learning_rate").get<double>();
    model->max_depth_ = p.at("max_depth").get<int>();
    model->min_samples_leaf_ = p.at("min_samples_leaf").get<int>();
    for (const auto& t : p.at("trees")) model->trees_.push_back(CartTree::from_json(t));
    return model;
}

}  // namespace etchforge::models
