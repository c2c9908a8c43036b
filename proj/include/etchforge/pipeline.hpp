#pragma once

#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "etchforge/events.hpp"
#include "etchforge/features.hpp"
#include "etchforge/labeling.hpp"
#include "etchforge/preprocess.hpp"

namespace etchforge {

/// Tunables shared across the labeling / preprocessing / feature stages.
struct PipelineParams {
    double min_segment_hours = 5.0;
    std::vector<double> interval_bounds = default_interval_bounds();
    double correlation_threshold = 0.95;
    double penalty_epsilon_hours = 1.0;
    int window_runs = 10;
};

struct LabeledDataset {
    std::vector<Segment> segments;
    std::vector<LabeledRun> labeled;
    CleaningReport cleaning;

    /// Labeled-row ids of non-censored runs, in (segment, position) order.
    std::vector<std::size_t> supervised_rows() const;
};

/// segment -> ttf -> health -> interval labels -> short-segment cleaning.
LabeledDataset build_labeled_dataset(const EventLog& log, const PipelineParams& params);

/// Every statistic a feature materialization needs, fitted strictly from the
/// given training rows. Transforming other rows never updates it.
struct FittedTransforms {
    RecipeStats stats;
    PruneReport prune;
    PenaltyTable alarm_penalties;
    PenaltyTable violation_penalties;
    std::map<std::string, std::string> limit_sensors;  // violation code -> sensor, training folds only
    std::vector<std::string> recipe_vocab;             // sorted training recipes
    int window_runs = 10;

    static FittedTransforms fit(const EventLog& log, const LabeledDataset& dataset,
                                const std::vector<std::size_t>& train_rows, const PipelineParams& params);

    FeatureMatrix features(const FeatureSpec& spec, const EventLog& log, const LabeledDataset& dataset,
                           const std::vector<std::size_t>& rows) const;

    /// Full value dump; also the vehicle for bit-identity leakage checks.
    nlohmann::json to_json() const;
};

nlohmann::json penalty_table_to_json(const PenaltyTable& table);
nlohmann::json prune_report_to_json(const PruneReport& report);
nlohmann::json recipe_stats_to_json(const RecipeStats& stats);

}  // namespace etchforge
