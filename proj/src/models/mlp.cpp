#include <cmath>
#include <numeric>

#include "etchforge/models.hpp"
#include "scaling.hpp"

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

double clamped_log(double p) { return std::log(std::min(std::max(p, 1e-12), 1.0 - 1e-12)); }

}  // namespace

Mlp Mlp::init(const Spec& spec, std::vector<std::string> feature_names, int n_inputs) {
    const int hidden = static_cast<int>(spec.hp("hidden_units", 32));
    Mlp net;
    net.w1_.resize(hidden, n_inputs);
    net.b1_ = Eigen::VectorXd::Zero(hidden);
    net.w2_.resize(hidden);
    net.b2_ = 0.0;

    Rng rng(mix_seed(spec.seed ^ 0x4d4c50ULL));
    const double in_bound = 1.0 / std::sqrt(static_cast<double>(n_inputs));
    for (int r = 0; r < hidden; ++r) {
        for (int c = 0; c < n_inputs; ++c) net.w1_(r, c) = rng.uniform(-in_bound, in_bound);
    }
    const double hid_bound = 1.0 / std::sqrt(static_cast<double>(hidden));
    for (int r = 0; r < hidden; ++r) net.w2_(r) = rng.uniform(-hid_bound, hid_bound);

    net.bind(spec, std::move(feature_names));
    return net;
}

Eigen::Index Mlp::parameter_count() const { return w1_.size() + b1_.size() + w2_.size() + 1; }

Eigen::VectorXd Mlp::parameters() const {
    Eigen::VectorXd theta(parameter_count());
    Eigen::Index at = 0;
    for (Eigen::Index r = 0; r < w1_.rows(); ++r) {
        theta.segment(at, w1_.cols()) = w1_.row(r).transpose();
        at += w1_.cols();
    }
    theta.segment(at, b1_.size()) = b1_;
    at += b1_.size();
    theta.segment(at, w2_.size()) = w2_;
    at += w2_.size();
    theta(at) = b2_;
    return theta;
}

void Mlp::set_parameters(const Eigen::VectorXd& theta) {
    Eigen::Index at = 0;
    for (Eigen::Index r = 0; r < w1_.rows(); ++r) {
        w1_.row(r) = theta.segment(at, w1_.cols()).transpose();
        at += w1_.cols();
    }
    b1_ = theta.segment(at, b1_.size());
    at += b1_.size();
    w2_ = theta.segment(at, w2_.size());
    at += w2_.size();
    b2_ = theta(at);
}

Eigen::VectorXd Mlp::forward(const Eigen::MatrixXd& X) const {
    const Eigen::MatrixXd hidden = ((X * w1_.transpose()).rowwise() + b1_.transpose()).array().tanh();
    Eigen::VectorXd out = (hidden * w2_).array() + b2_;
    if (spec_.task == Task::classification) {
        for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = stable_sigmoid(out(i));
    }
    return out;
}

Eigen::VectorXd Mlp::predict_values(const Eigen::MatrixXd& X) const {
    Eigen::VectorXd out = forward(detail::apply_column_scaling(X, x_mean_, x_scale_));
    if (spec_.task == Task::regression) out = out.array() * target_scale_ + target_mean_;
    return out;
}

double Mlp::loss(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) const {
    const Eigen::VectorXd out = forward(X);
    double total = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (spec_.task == Task::classification) {
            total += -y(i) * clamped_log(out(i)) - (1.0 - y(i)) * clamped_log(1.0 - out(i));
        } else {
            const double e = out(i) - y(i);
            total += 0.5 * e * e;
        }
    }
    return total / static_cast<double>(y.size());
}

Eigen::VectorXd Mlp::gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) const {
    const Eigen::Index n = X.rows();
    const Eigen::MatrixXd hidden = ((X * w1_.transpose()).rowwise() + b1_.transpose()).array().tanh();
    Eigen::VectorXd out = (hidden * w2_).array() + b2_;
    if (spec_.task == Task::classification) {
        for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = stable_sigmoid(out(i));
    }

    // dL/d(pre-activation output) is (f - y)/n for both losses.
    const Eigen::VectorXd dout = (out - y) / static_cast<double>(n);

    const Eigen::VectorXd grad_w2 = hidden.transpose() * dout;
    const double grad_b2 = dout.sum();
    const Eigen::MatrixXd dhidden =
        (dout * w2_.transpose()).array() * (1.0 - hidden.array().square());  // n x h
    const Eigen::MatrixXd grad_w1 = dhidden.transpose() * X;
    const Eigen::VectorXd grad_b1 = dhidden.colwise().sum().transpose();

    Eigen::VectorXd g(parameter_count());
    Eigen::Index at = 0;
    for (Eigen::Index r = 0; r < grad_w1.rows(); ++r) {
        g.segment(at, grad_w1.cols()) = grad_w1.row(r).transpose();
        at += grad_w1.cols();
    }
    g.segment(at, grad_b1.size()) = grad_b1;
    at += grad_b1.size();
    g.segment(at, grad_w2.size()) = grad_w2;
    at += grad_w2.size();
    g(at) = grad_b2;
    return g;
}

void Mlp::train_sgd(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double learning_rate, int epochs,
                    Rng& rng) {
    std::vector<int> order(static_cast<std::size_t>(X.rows()));
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < epochs; ++epoch) {
        rng.shuffle(order);
        for (int i : order) {
            const Eigen::VectorXd z1 = w1_ * X.row(i).transpose() + b1_;
            const Eigen::VectorXd h = z1.array().tanh();
            double f = w2_.dot(h) + b2_;
            if (spec_.task == Task::classification) f = stable_sigmoid(f);

            const double dout = f - y(i);
            const Eigen::VectorXd dh = (dout * w2_.array() * (1.0 - h.array().square())).matrix();

            w2_ -= learning_rate * dout * h;
            b2_ -= learning_rate * dout;
            w1_ -= learning_rate * (dh * X.row(i));
            b1_ -= learning_rate * dh;
        }
    }
}

nlohmann::json Mlp::params_json() const {
    nlohmann::json w1 = nlohmann::json::array();
    for (Eigen::Index r = 0; r < w1_.rows(); ++r) {
        w1.push_back(std::vector<double>(w1_.row(r).begin(), w1_.row(r).end()));
    }
    return {{"w1", w1},
            {"b1", std::vector<double>(b1_.begin(), b1_.end())},
            {"w2", std::vector<double>(w2_.begin(), w2_.end())},
            {"b2", b2_},
            {"target_mean", target_mean_},
            {"target_scale", target_scale_},
            {"x_mean", std::vector<double>(x_mean_.begin(), x_mean_.end())},
            {"x_scale", std::vector<double>(x_scale_.begin(), x_scale_.end())}};
}

std::unique_ptr<Model> fit_mlp(const Spec& spec, const FeatureMatrix& X, const Eigen::VectorXd& y) {
    auto model = std::make_unique<Mlp>(Mlp::init(spec, X.names, static_cast<int>(X.values.cols())));

    Eigen::VectorXd target = y;
    if (spec.task == Task::regression) {
        model->target_mean_ = y.mean();
        const double var =
            (y.array() - model->target_mean_).square().sum() / std::max<Eigen::Index>(y.size() - 1, 1);
        model->target_scale_ = var > 0.0 ? std::sqrt(var) : 1.0;
        target = (y.array() - model->target_mean_) / model->target_scale_;
    }

    detail::fit_column_scaling(X.values, model->x_mean_, model->x_scale_);
    const Eigen::MatrixXd xs = detail::apply_column_scaling(X.values, model->x_mean_, model->x_scale_);

    Rng rng(mix_seed(spec.seed ^ 0x4d4c50534744ULL));
    model->train_sgd(xs, target, spec.hp("learning_rate", 0.01),
                     static_cast<int>(spec.hp("epochs", 200)), rng);
    return model;
}

std::unique_ptr<Model> load_mlp(const nlohmann::json& p) {
    auto model = std::make_unique<Mlp>();
    const auto w1 = p.at("w1").get<std::vector<std::vector<double>>>();
    const auto b1 = p.at("b1").get<std::vector<double>>();
    const auto w2 = p.at("w2").get<std::vector<double>>();
    model->w1_.resize(static_cast<Eigen::Index>(w1.size()),
                      w1.empty() ? 0 : static_cast<Eigen::Index>(w1.front().size()));
    for (std::size_t r = 0; r < w1.size(); ++r) {
        model->w1_.row(static_cast<Eigen::Index>(r)) =
            Eigen::Map<const Eigen::RowVectorXd>(w1[r].data(), static_cast<Eigen::Index>(w1[r].size()));
    }
    model->b1_ = Eigen::Map<const Eigen::VectorXd>(b1.data(), static_cast<Eigen::Index>(b1.size()));
    model->w2_ = Eigen::Map<const Eigen::VectorXd>(w2.data(), static_cast<Eigen::Index>(w2.size()));
    model->b2_ = p.at("b2").get<double>();
    model->target_mean_ = p.at("target_mean").get<double>();
    model->target_scale_ = p.at("target_scale").get<double>();
    const auto xm = p.at("x_mean").get<std::vector<double>>();
    const auto xsc = p.at("x_scale").get<std::vector<double>>();
    model->x_mean_ = Eigen::Map<const Eigen::VectorXd>(xm.data(), static_cast<Eigen::Index>(xm.size()));
    model->x_scale_ = Eigen::Map<const Eigen::VectorXd>(xsc.data(), static_cast<Eigen::Index>(xsc.size()));
    return model;
}

}  // namespace etchforge::models
