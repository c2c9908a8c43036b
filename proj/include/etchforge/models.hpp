#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <memory>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "etchforge/features.hpp"
#include "etchforge/models/cart.hpp"
#include "etchforge/rng.hpp"

namespace etchforge::models {

enum class Family { lr, sgd_svm, tree, rf, knn, mlp, gbc };
enum class Task { regression, classification };

std::string to_string(Family f);
std::string to_string(Task t);
Family family_from_string(const std::string& s);
Task task_from_string(const std::string& s);

/// What to train. Hyperparameters not present in `hyper` take the family
/// defaults documented in each implementation.
struct Spec {
    Family family = Family::lr;
    Task task = Task::regression;
    std::uint64_t seed = 0;
    std::map<std::string, double> hyper;

    double hp(const std::string& name, double dflt) const {
        const auto it = hyper.find(name);
        return it == hyper.end() ? dflt : it->second;
    }
};

/// A trained predictor bound to its fit-time feature schema.
class Model {
public:
    virtual ~Model() = default;

    const Spec& spec() const { return spec_; }
    const std::vector<std::string>& feature_names() const { return feature_names_; }

    /// Regression value, or classification score (margin or probability).
    /// Throws SchemaMismatch when X's columns differ from fit time.
    Eigen::VectorXd predict(const FeatureMatrix& X) const;

    /// Classification only: thresholded scores, ties resolved positive.
    std::vector<std::uint8_t> predict_labels(const FeatureMatrix& X) const;

    virtual nlohmann::json params_json() const = 0;

    /// Raw prediction on an unnamed matrix; the named overload is the
    /// schema-checked entry point.
    virtual Eigen::VectorXd predict_values(const Eigen::MatrixXd& X) const = 0;

    /// Score at or above which a row is labeled positive.
    virtual double positive_threshold() const { return 0.5; }

    void bind(const Spec& spec, std::vector<std::string> feature_names) {
        spec_ = spec;
        feature_names_ = std::move(feature_names);
    }

protected:
    void check_schema(const FeatureMatrix& X) const;

    Spec spec_;
    std::vector<std::string> feature_names_;
};

/// Trains the family given by `spec`. `y` holds regression targets, or 0/1
/// class labels for classification. Deterministic given (spec, X, y).
/// Throws InvalidModelSpec, DegenerateTarget.
std::unique_ptr<Model> fit(const Spec& spec, const FeatureMatrix& X, const Eigen::VectorXd& y);

/// Versioned round-trip of trained models.
nlohmann::json model_to_json(const Model& model);
std::unique_ptr<Model> model_from_json(const nlohmann::json& j);

/// Ordinary least squares via ridge-damped (lambda = 1e-8) normal equations
/// on centered data; the intercept is not penalized.
class LinearRegression : public Model {
public:
    const Eigen::VectorXd& coefficients() const { return coef_; }
    double intercept() const { return intercept_; }

    nlohmann::json params_json() const override;
    Eigen::VectorXd predict_values(const Eigen::MatrixXd& X) const override;

    Eigen::VectorXd coef_;
    double intercept_ = 0.0;
};

/// Linear model trained with SGD: hinge loss for classification,
/// epsilon-insensitive loss for regression, L2 penalty, inverse-scaling
/// step size. Regression targets are standardized internally.
class SgdSvm : public Model {
public:
    const Eigen::VectorXd& weights() const { return w_; }
    double intercept() const { return b_; }

    /// Regularized training objective at the current parameters, in the
    /// internal (standardized for regression) target scale.
    double objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y_internal) const;

    nlohmann::json params_json() const override;
    Eigen::VectorXd predict_values(const Eigen::MatrixXd& X) const override;
    double positive_threshold() const override { return 0.0; }  // margin

    Eigen::VectorXd w_;
    double b_ = 0.0;
    double alpha_ = 1e-4;
    double epsilon_ = 0.1;
    double target_mean_ = 0.0;
    double target_scale_ = 1.0;
    // SGD needs unit-scale inputs; fitted on the training columns
    Eigen::VectorXd x_mean_;
    Eigen::VectorXd x_scale_;
};

/// Single CART tree.
class DecisionTree : public Model {
public:
    const CartTree& tree() const { return tree_; }

    nlohmann::json params_json() const override;
    Eigen::VectorXd predict_values(const Eigen::MatrixXd& X) const override;

    CartTree tree_;
};

/// Bootstrap forest with per-split feature subsampling; per-tree seeds are
/// derived from the spec seed.
class Forest : public Model {
public:
    int tree_count() const { return static_cast<int>(trees_.size()); }
    Eigen::VectorXd predict_tree(int index, const Eigen::MatrixXd& X) const;

    nlohmann::json params_json() const override;
    Eigen::VectorXd predict_values(const Eigen::MatrixXd& X) const override;

    std::vector<CartTree> trees_;
};

/// k-nearest neighbours, Euclidean distance; distance ties prefer positive
/// labels, then lower training row index. Classification only.
class Knn : public Model {
public:
    nlohmann::json params_json() const override;
    Eigen::VectorXd predict_values(const Eigen::MatrixXd& X) const override;

    Eigen::MatrixXd train_x_;
    Eigen::VectorXd train_y_;
    int k_ = 5;
};

/// One hidden tanh layer, linear or sigmoid output. Parameters flatten as
/// [W1 row-major, b1, w2, b2] for the gradient interface. Regression
/// targets are standardized internally.
class Mlp : public Model {
public:
    /// Untrained net with seeded +-1/sqrt(fan_in) weights; the start point
    /// of fit() and the subject of the finite-difference gradient checks.
    static Mlp init(const Spec& spec, std::vector<std::string> feature_names, int n_inputs);

    Eigen::VectorXd parameters() const;
    void set_parameters(const Eigen::VectorXd& theta);
    Eigen::Index parameter_count() const;

    /// Mean per-sample loss in the network's output scale: 0.5*(f-y)^2 for
    /// regression, log-loss for classification.
    double loss(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) const;

    /// Analytic gradient of loss() with respect to parameters().
    Eigen::VectorXd gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) const;

    /// Per-sample SGD with a fixed learning rate and seeded shuffling.
    void train_sgd(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double learning_rate, int epochs,
                   Rng& rng);

    int hidden_units() const { return static_cast<int>(w1_.rows()); }

    nlohmann::json params_json() const override;
    Eigen::VectorXd predict_values(const Eigen::MatrixXd& X) const override;

    /// Network output before target unscaling.
    Eigen::VectorXd forward(const Eigen::MatrixXd& X) const;

    Eigen::MatrixXd w1_;  // hidden x inputs
    Eigen::VectorXd b1_;
    Eigen::VectorXd w2_;
    double b2_ = 0.0;
    double target_mean_ = 0.0;
    double target_scale_ = 1.0;
    // input standardization applied by fit/predict, not by loss/gradient
    Eigen::VectorXd x_mean_;
    Eigen::VectorXd x_scale_;
};

inline Eigen::VectorXd mlp_gradient(const Mlp& model, const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    return model.gradient(X, y);
}

/// Gradient-boosted shallow regression trees on logistic loss; scores are
/// probabilities. Classification only.
class Gbc : public Model {
public:
    /// Base score = log-odds of the positive rate; no trees yet. Keeps the
    /// additive score of every training row as incremental state.
    static Gbc init(const Spec& spec, const FeatureMatrix& X, const Eigen::VectorXd& y);

    /// One boosting round: fits a depth-limited regression tree to the
    /// negative logistic-loss gradient (y - p) and adds it with the
    /// learning rate.
    void fit_round(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

    double train_log_loss(const Eigen::VectorXd& y) const;
    double base_score() const { return base_score_; }
    int rounds() const { return static_cast<int>(trees_.size()); }

    nlohmann::json params_json() const override;
    Eigen::VectorXd predict_values(const Eigen::MatrixXd& X) const override;

    double base_score_ = 0.0;
    double learning_rate_ = 0.1;
    int max_depth_ = 2;
    int min_samples_leaf_ = 5;
    std::vector<CartTree> trees_;
    Eigen::VectorXd state_score_;
};

}  // namespace etchforge::models
