#include "etchforge/models.hpp"

#include <cmath>

#include "etchforge/errors.hpp"

namespace etchforge::models {
namespace {

constexpr int kModelFormatVersion = 1;

void validate_inputs(const Spec& spec, const FeatureMatrix& X, const Eigen::VectorXd& y) {
    if (X.values.rows() != y.size()) throw InvalidModelSpec("row count of X and y differ");
    if (X.values.rows() < 2) throw InvalidModelSpec("need at least 2 training rows");
    if (!X.values.allFinite()) throw InvalidModelSpec("feature matrix contains NaN or inf");
    if (!y.allFinite()) throw InvalidModelSpec("target contains NaN or inf");
    if (static_cast<std::size_t>(X.values.cols()) != X.names.size()) {
        throw InvalidModelSpec("feature matrix names do not match column count");
    }

    if (spec.task == Task::classification) {
        bool any_pos = false, any_neg = false;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            if (y(i) == 1.0) {
                any_pos = true;
            } else if (y(i) == 0.0) {
                any_neg = true;
            } else {
                throw InvalidModelSpec("classification targets must be 0 or 1");
            }
        }
        if (!any_pos || !any_neg) throw DegenerateTarget("classification target has a single class");
    }

    switch (spec.family) {
        case Family::lr:
            if (spec.task != Task::regression) throw InvalidModelSpec("LR is regression-only");
            break;
        case Family::knn:
            if (spec.task != Task::classification) throw InvalidModelSpec("KNN is classification-only");
            break;
        case Family::gbc:
            if (spec.task != Task::classification) throw InvalidModelSpec("GBC is classification-only");
            break;
        default:
            break;
    }
}

}  // namespace

std::string to_string(Family f) {
    switch (f) {
        case Family::lr: return "LR";
        case Family::sgd_svm: return "SGD_SVM";
        case Family::tree: return "TREE";
        case Family::rf: return "RF";
        case Family::knn: return "KNN";
        case Family::mlp: return "MLP";
        case Family::gbc: return "GBC";
    }
    return "?";
}

std::string to_string(Task t) { return t == Task::regression ? "regression" : "classification"; }

Family family_from_string(const std::string& s) {
    for (Family f : {Family::lr, Family::sgd_svm, Family::tree, Family::rf, Family::knn, Family::mlp,
                     Family::gbc}) {
        if (to_string(f) == s) return f;
    }
    throw InvalidModelSpec("unknown model family: " + s);
}

Task task_from_string(const std::string& s) {
    if (s == "regression") return Task::regression;
    if (s == "classification") return Task::classification;
    throw InvalidModelSpec("unknown task: " + s);
}

void Model::check_schema(const FeatureMatrix& X) const {
    if (X.names != feature_names_) {
        throw SchemaMismatch("feature columns differ from fit-time schema");
    }
}

Eigen::VectorXd Model::predict(const FeatureMatrix& X) const {
    check_schema(X);
    if (!X.values.allFinite()) throw SchemaMismatch("prediction input contains NaN or inf");
    return predict_values(X.values);
}

std::vector<std::uint8_t> Model::predict_labels(const FeatureMatrix& X) const {
    if (spec_.task != Task::classification) {
        throw InvalidModelSpec("predict_labels is only defined for classification models");
    }
    const Eigen::VectorXd score = predict(X);
    std::vector<std::uint8_t> labels(static_cast<std::size_t>(score.size()));
    for (Eigen::Index i = 0; i < score.size(); ++i) {
        labels[static_cast<std::size_t>(i)] = score(i) >= positive_threshold() ? 1 : 0;
    }
    return labels;
}

// Family constructors live in their own translation units; fit() only
// dispatches.
std::unique_ptr<Model> fit_linear(const Spec&, const FeatureMatrix&, const Eigen::VectorXd&);
std::unique_ptr<Model> fit_sgd_svm(const Spec&, const FeatureMatrix&, const Eigen::VectorXd&);
std::unique_ptr<Model> fit_tree(const Spec&, const FeatureMatrix&, const Eigen::VectorXd&);
std::unique_ptr<Model> fit_forest(const Spec&, const FeatureMatrix&, const Eigen::VectorXd&);
std::unique_ptr<Model> fit_knn(const Spec&, const FeatureMatrix&, const Eigen::VectorXd&);
std::unique_ptr<Model> fit_mlp(const Spec&, const FeatureMatrix&, const Eigen::VectorXd&);
std::unique_ptr<Model> fit_gbc(const Spec&, const FeatureMatrix&, const Eigen::VectorXd&);

std::unique_ptr<Model> fit(const Spec& spec, const FeatureMatrix& X, const Eigen::VectorXd& y) {
    validate_inputs(spec, X, y);
    switch (spec.family) {
        case Family::lr: return fit_linear(spec, X, y);
        case Family::sgd_svm: return fit_sgd_svm(spec, X, y);
        case Family::tree: return fit_tree(spec, X, y);
        case Family::rf: return fit_forest(spec, X, y);
        case Family::knn: return fit_knn(spec, X, y);
        case Family::mlp: return fit_mlp(spec, X, y);
        case Family::gbc: return fit_gbc(spec, X, y);
    }
    throw InvalidModelSpec("unhandled model family");
}

nlohmann::json model_to_json(const Model& model) {
    nlohmann::json j;
    j["version"] = kModelFormatVersion;
    j["family"] = to_string(model.spec().family);
    j["task"] = to_string(model.spec().task);
    j["seed"] = model.spec().seed;
    j["hyper"] = model.spec().hyper;
    j["feature_names"] = model.feature_names();
    j["params"] = model.params_json();
    return j;
}

std::unique_ptr<Model> load_linear(const nlohmann::json&);
std::unique_ptr<Model> load_sgd_svm(const nlohmann::json&);
std::unique_ptr<Model> load_tree(const nlohmann::json&);
std::unique_ptr<Model> load_forest(const nlohmann::json&);
std::unique_ptr<Model> load_knn(const nlohmann::json&);
std::unique_ptr<Model> load_mlp(const nlohmann::json&);
std::unique_ptr<Model> load_gbc(const nlohmann::json&);

std::unique_ptr<Model> model_from_json(const nlohmann::json& j) {
    if (j.at("version").get<int>() != kModelFormatVersion) {
        throw Error("unsupported model format version");
    }
    Spec spec;
    spec.family = family_from_string(j.at("family").get<std::string>());
    spec.task = task_from_string(j.at("task").get<std::string>());
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.hyper = j.at("hyper").get<std::map<std::string, double>>();

    std::unique_ptr<Model> model;
    const nlohmann::json& p = j.at("params");
    switch (spec.family) {
        case Family::lr: model = load_linear(p); break;
        case Family::sgd_svm: model = load_sgd_svm(p); break;
        case Family::tree: model = load_tree(p); break;
        case Family::rf: model = load_forest(p); break;
        case Family::knn: model = load_knn(p); break;
        case Family::mlp: model = load_mlp(p); break;
        case Family::gbc: model = load_gbc(p); break;
    }
    model->bind(spec, j.at("feature_names").get<std::vector<std::string>>());
    return model;
}

}  // namespace etchforge::models
