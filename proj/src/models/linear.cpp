#include <Eigen/Dense>

#include "etchforge/models.hpp"

namespace etchforge::models {

Eigen::VectorXd LinearRegression::predict_values(const Eigen::MatrixXd& X) const {
    return (X * coef_).array() + intercept_;
}

nlohmann::json LinearRegression::params_json() const {
    return {{"coef", std::vector<double>(coef_.begin(), coef_.end())}, {"intercept", intercept_}};
}

std::unique_ptr<Model> fit_linear(const Spec& spec, const FeatureMatrix& X, const Eigen::VectorXd& y) {
    const double lambda = spec.hp("ridge_lambda", 1e-8);

    // Centering keeps the intercept out of the penalty and makes the normal
    // equations exact on small systems.
    const Eigen::RowVectorXd x_mean = X.values.colwise().mean();
    const Eigen::MatrixXd xc = X.values.rowwise() - x_mean;
    const double y_mean = y.mean();
    const Eigen::VectorXd yc = y.array() - y_mean;

    Eigen::MatrixXd gram = xc.transpose() * xc;
    gram.diagonal().array() += lambda;

    auto model = std::make_unique<LinearRegression>();
    model->coef_ = gram.ldlt().solve(xc.transpose() * yc);
    model->intercept_ = y_mean - x_mean * model->coef_;
    model->bind(spec, X.names);
    return model;
}

std::unique_ptr<Model> load_linear(const nlohmann::json& p) {
    auto model = std::make_unique<LinearRegression>();
    const auto coef = p.at("coef").get<std::vector<double>>();
    model->coef_ = Eigen::Map<const Eigen::VectorXd>(coef.data(), static_cast<Eigen::Index>(coef.size()));
    model->intercept_ = p.at("intercept").get<double>();
    return model;
}

}  // namespace etchforge::models
