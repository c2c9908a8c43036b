#include "etchforge/pipeline.hpp"

#include <set>

#include "etchforge/errors.hpp"

namespace etchforge {

std::vector<std::size_t> LabeledDataset::supervised_rows() const {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < labeled.size(); ++i) {
        if (!labeled[i].censored) rows.push_back(i);
    }
    return rows;
}

LabeledDataset build_labeled_dataset(const EventLog& log, const PipelineParams& params) {
    auto segments = segment_chambers(log);
    auto labeled = compute_ttf(log, segments);
    labeled = compute_health(std::move(labeled));
    labeled = compute_interval_labels(std::move(labeled), params.interval_bounds);
    auto cleaned = clean_short_segments(std::move(labeled), std::move(segments), params.min_segment_hours);
    return {std::move(cleaned.segments), std::move(cleaned.labeled), std::move(cleaned.report)};
}

FittedTransforms FittedTransforms::fit(const EventLog& log, const LabeledDataset& dataset,
                                       const std::vector<std::size_t>& train_rows,
                                       const PipelineParams& params) {
    if (train_rows.empty()) throw InvalidConfig("FittedTransforms::fit needs at least one training row");

    FittedTransforms t;
    t.window_runs = params.window_runs;

    std::vector<std::size_t> train_run_rows;
    train_run_rows.reserve(train_rows.size());
    std::set<std::string> recipes;
    for (std::size_t row : train_rows) {
        const std::size_t run_index = dataset.labeled.at(row).run_index;
        train_run_rows.push_back(run_index);
        recipes.insert(log.runs.at(run_index).recipe_id);
    }
    t.recipe_vocab.assign(recipes.begin(), recipes.end());

    t.stats = fit_recipe_stats(log.runs, train_run_rows);
    const Eigen::MatrixXd train_matrix = standardize(log.runs, train_run_rows, t.stats);
    t.prune = prune_correlated(train_matrix, t.stats.sensor_names, params.correlation_threshold);

    t.alarm_penalties = fit_penalties(coded_events(log.alarms), PenaltyTable::Source::alarm, log,
                                      dataset.segments, dataset.labeled, train_rows,
                                      params.penalty_epsilon_hours);
    t.violation_penalties = fit_penalties(coded_events(log.violations), PenaltyTable::Source::violation, log,
                                          dataset.segments, dataset.labeled, train_rows,
                                          params.penalty_epsilon_hours);

    // Limit definitions observed in training segments only.
    const SegmentLookup lookup(dataset.segments);
    std::set<std::size_t> train_segments;
    for (std::size_t row : train_rows) train_segments.insert(dataset.labeled.at(row).segment_index);
    for (const auto& v : log.violations) {
        const std::size_t s = lookup.segment_of(v.chamber_id, v.time);
        if (s != SegmentLookup::npos && train_segments.count(s)) t.limit_sensors[v.code] = v.sensor;
    }

    return t;
}

FeatureMatrix FittedTransforms::features(const FeatureSpec& spec, const EventLog& log,
                                         const LabeledDataset& dataset,
                                         const std::vector<std::size_t>& rows) const {
    FeatureInputs in;
    in.log = &log;
    in.segments = &dataset.segments;
    in.labeled = &dataset.labeled;
    in.stats = &stats;
    in.prune = &prune;
    in.alarm_penalties = &alarm_penalties;
    in.violation_penalties = &violation_penalties;
    in.limit_sensors = &limit_sensors;
    in.recipe_vocab = recipe_vocab;

    FeatureSpec windowed = spec;
    windowed.window_runs = window_runs;
    return materialize(windowed, in, rows);
}

nlohmann::json penalty_table_to_json(const PenaltyTable& table) {
    return {{"source", table.source == PenaltyTable::Source::alarm ? "alarm" : "violation"},
            {"epsilon_hours", table.epsilon_hours},
            {"penalty", table.penalty},
            {"median_ttf", table.median_ttf},
            {"occurrences", table.occurrences},
            {"ignored_events", table.ignored_events}};
}

nlohmann::json prune_report_to_json(const PruneReport& report) {
    nlohmann::json dropped = nlohmann::json::array();
    for (const auto& d : report.dropped) {
        dropped.push_back({{"dropped", d.dropped}, {"kept_correlate", d.kept_correlate}, {"abs_correlation", d.abs_correlation}});
    }
    return {{"threshold", report.threshold},
            {"kept", report.kept},
            {"dropped", dropped},
            {"zero_variance", report.zero_variance}};
}

nlohmann::json recipe_stats_to_json(const RecipeStats& stats) {
    nlohmann::json recipes = nlohmann::json::object();
    for (const auto& [recipe, sensors] : stats.by_recipe) {
        nlohmann::json per_sensor = nlohmann::json::object();
        for (const auto& [sensor, s] : sensors) {
            per_sensor[sensor] = {{"mean", s.mean}, {"std", s.stddev}, {"count", s.count}};
        }
        recipes[recipe] = per_sensor;
    }
    return {{"sensors", stats.sensor_names}, {"recipes", recipes}};
}

nlohmann::json FittedTransforms::to_json() const {
    return {{"stats", recipe_stats_to_json(stats)},
            {"prune", prune_report_to_json(prune)},
            {"alarm_penalties", penalty_table_to_json(alarm_penalties)},
            {"violation_penalties", penalty_table_to_json(violation_penalties)},
            {"limit_sensors", limit_sensors},
            {"recipe_vocab", recipe_vocab},
            {"window_runs", window_runs}};
}

}  // namespace etchforge
