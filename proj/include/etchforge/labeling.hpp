#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "etchforge/events.hpp"

namespace etchforge {

/// A maximal span of one chamber's life between consecutive breakdowns.
/// Leading (start of observation to first breakdown) and trailing (last
/// breakdown to end of observation) spans are kept but flagged censored:
/// their total lifetime is not fully observed.
struct Segment {
    std::string segment_id;
    std::string chamber_id;
    double start = 0.0;
    std::optional<double> breakdown_time;  // absent only for the trailing segment
    bool censored = false;
    double total_productive_hours = 0.0;   // sum of member run durations
    std::vector<std::size_t> run_indices;  // into EventLog::runs, start order
};

struct LabeledRun {
    std::size_t run_index = 0;    // into EventLog::runs
    std::size_t segment_index = 0;
    std::string segment_id;
    bool censored = false;
    double ttf = std::numeric_limits<double>::quiet_NaN();     // hours; NaN while censored
    double health = std::numeric_limits<double>::quiet_NaN();  // [0,1]; NaN while censored
    std::map<double, bool> interval_labels;                    // upper bound -> ttf <= bound
};

/// The ten interval upper bounds used for breakdown-window classification.
std::vector<double> default_interval_bounds();

/// Partitions each chamber's runs into segments delimited by breakdown state
/// changes. A chamber without breakdowns yields a single censored segment.
std::vector<Segment> segment_chambers(const EventLog& log);

/// Assigns each run the sum of the durations of all later runs in its
/// segment (a descending counter hitting 0 at the last run before the
/// breakdown). Runs in censored segments carry no TTF and are flagged.
std::vector<LabeledRun> compute_ttf(const EventLog& log, const std::vector<Segment>& segments);

/// Rescales TTF within each complete segment to [0,1] by its maximum
/// (1 = fresh, 0 = breakdown). Single-run segments get health 0.
std::vector<LabeledRun> compute_health(std::vector<LabeledRun> labeled);

/// interval_labels[x] = (ttf <= x); bounds must be strictly increasing.
std::vector<LabeledRun> compute_interval_labels(std::vector<LabeledRun> labeled,
                                                const std::vector<double>& bounds);

struct CleaningReport {
    double min_hours = 0.0;
    std::vector<std::string> removed_segments;
    std::size_t removed_runs = 0;
};

struct CleanedDataset {
    std::vector<LabeledRun> labeled;
    std::vector<Segment> segments;
    CleaningReport report;
};

/// Drops complete segments shorter than `min_hours` of productive time along
/// with their runs (equipment-start artifacts). Throws EmptyResult when
/// nothing survives.
CleanedDataset clean_short_segments(std::vector<LabeledRun> labeled, std::vector<Segment> segments,
                                    double min_hours);

}  // namespace etchforge
