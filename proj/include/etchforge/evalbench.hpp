#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <string>
#include <vector>

#include "etchforge/events.hpp"
#include "etchforge/labeling.hpp"
#include "etchforge/models.hpp"
#include "etchforge/pipeline.hpp"

namespace etchforge {

enum class TaskKind { ttf_regression, health_regression, interval_classification };

std::string to_string(TaskKind t);
TaskKind task_kind_from_string(const std::string& s);

// --- benchmarks -----------------------------------------------------------
// All three predict TTF; the health task rescales them by the historic mean
// segment length so they live on the same [0,1] scale as the target.

/// B1, naive: the mean training TTF, constant everywhere.
double benchmark_b1_constant(const std::vector<LabeledRun>& labeled,
                             const std::vector<std::size_t>& train_rows);

/// B2, visionary: per-segment mean of the *true* eval TTF (peeks at the
/// future by construction).
Eigen::VectorXd benchmark_b2(const std::vector<LabeledRun>& labeled,
                             const std::vector<std::size_t>& eval_rows);

/// Mean total productive hours of the complete training segments (B3's x).
double historic_mean_segment_hours(const std::vector<Segment>& segments,
                                   const std::set<std::size_t>& train_segments);

/// B3, realistic: max(0, xbar - productive hours elapsed in the segment up
/// to and including each eval run).
Eigen::VectorXd benchmark_b3(const EventLog& log, const std::vector<Segment>& segments,
                             const std::vector<LabeledRun>& labeled,
                             const std::vector<std::size_t>& eval_rows, double xbar);

// --- folds ----------------------------------------------------------------

struct FoldAssignment {
    std::map<std::string, int> fold_of_segment;  // complete segments only
    int k = 4;
    std::uint64_t seed = 0;
};

/// Seeded shuffle of the complete segment ids, assigned round-robin; fold
/// sizes differ by at most one. Throws TooFewSegments.
FoldAssignment grouped_kfold(const std::vector<Segment>& segments, int k, std::uint64_t seed);

// --- metrics ----------------------------------------------------------------

double rmse(const Eigen::VectorXd& prediction, const Eigen::VectorXd& truth);

/// (x - b3) / b3; negative values improve on the benchmark. Throws
/// ZeroBenchmark when b3 == 0.
double relative_rmse(double x, double b3);

struct PrfMetric {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Precision/recall/F1 with the 0/0 -> 0 convention.
PrfMetric prf1(const std::vector<std::uint8_t>& predicted, const std::vector<std::uint8_t>& truth);

// --- the cross-validated experiment -----------------------------------------

struct EvalConfig {
    int k_folds = 4;
    std::uint64_t fold_seed = 0;
    std::vector<double> bounds;  // classification; empty = pipeline interval bounds
    PipelineParams pipeline;
};

struct RegressionRow {
    std::string model;        // family name or B1/B2/B3
    std::string feature_set;  // "-" for benchmarks
    std::vector<double> fold_rmse;
    std::vector<double> fold_rel;
    double pooled_rmse = 0.0;
    double pooled_rel = 0.0;
};

struct ClassificationCell {
    std::vector<PrfMetric> fold_prf;
    PrfMetric pooled;
};

struct ClassificationRow {
    std::string model;
    std::string feature_set;
    std::map<double, ClassificationCell> per_bound;
};

struct PlotPoint {
    std::string run_id;
    double start = 0.0;
    double truth = 0.0;
    double prediction = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
    double b3 = 0.0;
};

struct EvalReport {
    std::string task;
    int k_folds = 4;
    std::uint64_t fold_seed = 0;
    std::vector<std::string> feature_sets;
    std::vector<std::string> models;
    std::vector<double> bounds;
    std::vector<RegressionRow> regression_rows;
    std::vector<ClassificationRow> classification_rows;
    std::string best_model;  // lowest pooled RMSE / highest pooled F1 among model rows
    std::string best_feature_set;
    std::vector<PlotPoint> plot;  // regression tasks: pooled test predictions of the best row

    nlohmann::json to_json() const;
    std::string table_csv() const;  // benchmark + model columns per feature set
    std::string plot_csv() const;

    const RegressionRow& regression_row(const std::string& model, const std::string& feature_set) const;
    const ClassificationRow& classification_row(const std::string& model,
                                                const std::string& feature_set) const;
};

/// Runs the grouped k-fold experiment: per fold, fits transforms and models
/// on the training folds only, predicts the held-out fold, and aggregates
/// per-fold plus pooled (concatenated) metrics. Benchmarks follow the same
/// train/test discipline except the intentionally visionary B2.
EvalReport run_task(TaskKind task, const std::vector<FeatureSpec>& feature_specs,
                    const std::vector<models::Spec>& model_specs, const EventLog& log,
                    const LabeledDataset& dataset, const EvalConfig& config);

}  // namespace etchforge
