#include <cmath>
#include <numeric>

#include "etchforge/models.hpp"
#include "scaling.hpp"

namespace etchforge::models {

Eigen::VectorXd SgdSvm::predict_values(const Eigen::MatrixXd& X) const {
    const Eigen::MatrixXd xs = detail::apply_column_scaling(X, x_mean_, x_scale_);
    Eigen::VectorXd f = (xs * w_).array() + b_;
    if (spec_.task == Task::regression) f = f.array() * target_scale_ + target_mean_;
    return f;
}

double SgdSvm::objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y_internal) const {
    const Eigen::MatrixXd xs = detail::apply_column_scaling(X, x_mean_, x_scale_);
    const Eigen::VectorXd f = (xs * w_).array() + b_;
    double loss = 0.0;
    for (Eigen::Index i = 0; i < y_internal.size(); ++i) {
        if (spec_.task == Task::classification) {
            const double margin = (y_internal(i) > 0.5 ? 1.0 : -1.0) * f(i);
            loss += std::max(0.0, 1.0 - margin);
        } else {
            loss += std::max(0.0, std::abs(f(i) - y_internal(i)) - epsilon_);
        }
    }
    return 0.5 * alpha_ * w_.squaredNorm() + loss / static_cast<double>(y_internal.size());
}

nlohmann::json SgdSvm::params_json() const {
    return {{"w", std::vector<double>(w_.begin(), w_.end())},
            {"b", b_},
            {"alpha", alpha_},
            {"epsilon", epsilon_},
            {"target_mean", target_mean_},
            {"target_scale", target_scale_},
            {"x_mean", std::vector<double>(x_mean_.begin(), x_mean_.end())},
            {"x_scale", std::vector<double>(x_scale_.begin(), x_scale_.end())}};
}

std::unique_ptr<Model> fit_sgd_svm(const Spec& spec, const FeatureMatrix& X, const Eigen::VectorXd& y) {
    auto model = std::make_unique<SgdSvm>();
    model->alpha_ = spec.hp("alpha", 1e-4);
    model->epsilon_ = spec.hp("epsilon", 0.1);
    const int epochs = static_cast<int>(spec.hp("epochs", 50));
    const double eta0 = spec.hp("eta0", 0.01);
    const double power_t = spec.hp("power_t", 0.25);

    const Eigen::Index n = X.values.rows();
    const Eigen::Index d = X.values.cols();

    detail::fit_column_scaling(X.values, model->x_mean_, model->x_scale_);
    const Eigen::MatrixXd xs = detail::apply_column_scaling(X.values, model->x_mean_, model->x_scale_);

    Eigen::VectorXd target = y;
    if (spec.task == Task::regression) {
        // Internal target standardization; predictions are unscaled on the
        // way out.
        model->target_mean_ = y.mean();
        const double var = (y.array() - model->target_mean_).square().sum() / std::max<Eigen::Index>(n - 1, 1);
        model->target_scale_ = var > 0.0 ? std::sqrt(var) : 1.0;
        target = (y.array() - model->target_mean_) / model->target_scale_;
    }

    model->w_ = Eigen::VectorXd::Zero(d);
    model->b_ = 0.0;

    Rng rng(mix_seed(spec.seed ^ 0x5347445f53564dULL));
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);

    long t = 0;
    for (int epoch = 0; epoch < epochs; ++epoch) {
        rng.shuffle(order);
        for (int i : order) {
            ++t;
            const double eta = eta0 / std::pow(static_cast<double>(t), power_t);
            const double f = xs.row(i) * model->w_ + model->b_;

            if (spec.task == Task::classification) {
                const double yi = target(i) > 0.5 ? 1.0 : -1.0;
                model->w_ *= (1.0 - eta * model->alpha_);
                if (yi * f < 1.0) {
                    model->w_ += eta * yi * xs.row(i).transpose();
                    model->b_ += eta * yi;
                }
            } else {
                const double err = f - target(i);
                model->w_ *= (1.0 - eta * model->alpha_);
                if (std::abs(err) > model->epsilon_) {
                    const double g = err > 0.0 ? 1.0 : -1.0;
                    model->w_ -= eta * g * xs.row(i).transpose();
                    model->b_ -= eta * g;
                }
            }
        }
    }

    model->bind(spec, X.names);
    return model;
}

std::unique_ptr<Model> load_sgd_svm(const nlohmann::json& p) {
    auto model = std::make_unique<SgdSvm>();
    const auto w = p.at("w").get<std::vector<double>>();
    model->w_ = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    model->b_ = p.at("b").get<double>();
    model->alpha_ = p.at("alpha").get<double>();
    model->epsilon_ = p.at("epsilon").get<double>();
    model->target_mean_ = p.at("target_mean").get<double>();
    model->target_scale_ = p.at("target_scale").get<double>();
    const auto xm = p.at("x_mean").get<std::vector<double>>();
    const auto xs = p.at("x_scale").get<std::vector<double>>();
    model->x_mean_ = Eigen::Map<const Eigen::VectorXd>(xm.data(), static_cast<Eigen::Index>(xm.size()));
    model->x_scale_ = Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
    return model;
}

}  // namespace etchforge::models
