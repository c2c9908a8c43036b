#include <algorithm>
#include <tuple>

#include "etchforge/models.hpp"

namespace etchforge::models {

Eigen::VectorXd Knn::predict_values(const Eigen::MatrixXd& X) const {
    const Eigen::Index n_train = train_x_.rows();
    const int k = std::min<int>(k_, static_cast<int>(n_train));

    Eigen::VectorXd out(X.rows());
    // (squared distance, negated label, train index): equal distances prefer
    // positive labels, then lower row index.
    std::vector<std::tuple<double, int, Eigen::Index>> order(static_cast<std::size_t>(n_train));
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        for (Eigen::Index t = 0; t < n_train; ++t) {
            const double d2 = (train_x_.row(t) - X.row(i)).squaredNorm();
            order[static_cast<std::size_t>(t)] = {d2, train_y_(t) > 0.5 ? 0 : 1, t};
        }
        std::partial_sort(order.begin(), order.begin() + k, order.end());
        double positives = 0.0;
        for (int j = 0; j < k; ++j) positives += std::get<1>(order[static_cast<std::size_t>(j)]) == 0 ? 1.0 : 0.0;
        out(i) = positives / static_cast<double>(k);
    }
    return out;
}

nlohmann::json Knn::params_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < train_x_.rows(); ++i) {
        rows.push_back(std::vector<double>(train_x_.row(i).begin(), train_x_.row(i).end()));
    }
    return {{"k", k_}, {"x", rows}, {"y", std::vector<double>(train_y_.begin(), train_y_.end())}};
}

std::unique_ptr<Model> fit_knn(const Spec& spec, const FeatureMatrix& X, const Eigen::VectorXd& y) {
    auto model = std::make_unique<Knn>();
    model->k_ = static_cast<int>(spec.hp("k", 5));
    model->train_x_ = X.values;
    model->train_y_ = y;
    model->bind(spec, X.names);
    return model;
}

std::unique_ptr<Model> load_knn(const nlohmann::json& p) {
    auto model = std::make_unique<Knn>();
    model->k_ = p.at("k").get<int>();
    const auto rows = p.at("x").get<std::vector<std::vector<double>>>();
    const auto y = p.at("y").get<std::vector<double>>();
    model->train_x_.resize(static_cast<Eigen::Index>(rows.size()),
                           rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        model->train_x_.row(static_cast<Eigen::Index>(i)) =
            Eigen::Map<const Eigen::RowVectorXd>(rows[i].data(), static_cast<Eigen::Index>(rows[i].size()));
    }
    model->train_y_ = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
    return model;
}

}  // namespace etchforge::models
