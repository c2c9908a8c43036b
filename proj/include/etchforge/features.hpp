#pragma once

#include <Eigen/Core>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "etchforge/events.hpp"
#include "etchforge/labeling.hpp"
#include "etchforge/preprocess.hpp"

namespace etchforge {

/// Uniform view of an alarm or limit-violation occurrence.
struct CodedEvent {
    std::string chamber_id;
    double time = 0.0;
    std::string code;
};

std::vector<CodedEvent> coded_events(const std::vector<AlarmEvent>& alarms);
std::vector<CodedEvent> coded_events(const std::vector<LimitViolationEvent>& violations);

/// Maps (chamber, time) to the segment covering it. The first segment of a
/// chamber absorbs earlier times; the trailing one absorbs later times.
class SegmentLookup {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    explicit SegmentLookup(const std::vector<Segment>& segments);
    std::size_t segment_of(const std::string& chamber, double time) const;

private:
    struct Span {
        double lo;
        double hi;
        std::size_t index;
    };
    std::map<std::string, std::vector<Span>> spans_;
};

/// Per-code severity weights: AP = 1 / max(median TTF at occurrences, eps).
struct PenaltyTable {
    enum class Source { alarm, violation };

    Source source = Source::alarm;
    double epsilon_hours = 1.0;
    std::map<std::string, double> penalty;     // codes seen in training
    std::map<std::string, double> median_ttf;
    std::map<std::string, int> occurrences;
    int ignored_events = 0;  // events with no segment or no preceding run

    /// 0 for codes never seen in training.
    double at(const std::string& code) const {
        const auto it = penalty.find(code);
        return it == penalty.end() ? 0.0 : it->second;
    }
};

/// Fits penalties from training rows only: each event is assigned the TTF of
/// the nearest preceding-or-equal run in its segment, medians are taken per
/// code, and AP = 1/max(median, eps). Events in segments outside the
/// training rows are out of scope and skipped.
PenaltyTable fit_penalties(const std::vector<CodedEvent>& events, PenaltyTable::Source source,
                           const EventLog& log, const std::vector<Segment>& segments,
                           const std::vector<LabeledRun>& labeled, const std::vector<std::size_t>& train_rows,
                           double epsilon_hours = 1.0);

enum class FeatureGroup { APC_V, APC_R, LV_P, AL_P, DIPS };

std::string to_string(FeatureGroup g);

/// One of the FS1..FS7 feature-set combinations.
struct FeatureSpec {
    std::string name;
    std::set<FeatureGroup> groups;
    int window_runs = 10;
};

/// FS1 = APC_V+APC_R, FS2 = APC_V+LV_P, FS3 = APC_V+APC_R+LV_P+AL_P,
/// FS4 = FS3+DIPS, FS5 = APC_V+LV_P+AL_P, FS6 = LV_P+AL_P, FS7 = AL_P.
FeatureSpec feature_spec(const std::string& name, int window_runs = 10);
std::vector<std::string> feature_spec_names();

struct FeatureMatrix {
    Eigen::MatrixXd values;  // one row per requested labeled run
    std::vector<std::string> names;
    std::vector<FeatureGroup> provenance;  // per column

    Eigen::Index find(const std::string& name) const;  // -1 when absent
};

/// Block of engineered columns for one group, concatenated by materialize().
struct FeatureBlock {
    Eigen::MatrixXd values;
    std::vector<std::string> names;
};

/// Raw and penalty-weighted cumulative event counters per run (reset at
/// segment start) plus windowed gradient sum / gradient max.
FeatureBlock counter_features(const std::vector<CodedEvent>& events, const std::string& prefix,
                              const EventLog& log, const std::vector<Segment>& segments,
                              const std::vector<LabeledRun>& labeled, const std::vector<std::size_t>& rows,
                              const PenaltyTable& penalties, int window_runs);

/// Recipe mix over the trailing window: fraction per known recipe, an
/// "other" bucket for unseen ones, and the number of recipe switches.
FeatureBlock recipe_mix_features(const EventLog& log, const std::vector<Segment>& segments,
                                 const std::vector<LabeledRun>& labeled, const std::vector<std::size_t>& rows,
                                 const std::vector<std::string>& recipe_vocab, int window_runs);

/// Kept standardized sensor columns that carry at least one limit
/// definition. Throws EmptySelection when no kept column is referenced.
FeatureBlock apcv_features(const Eigen::MatrixXd& standardized, const RecipeStats& stats,
                           const PruneReport& prune, const std::map<std::string, std::string>& limit_sensors);

/// Count and max magnitude of voltage dips over the trailing window.
FeatureBlock dip_features(const EventLog& log, const std::vector<Segment>& segments,
                          const std::vector<LabeledRun>& labeled, const std::vector<std::size_t>& rows,
                          int window_runs);

/// Everything a feature-set materialization needs. All fitted members must
/// come from training folds only.
struct FeatureInputs {
    const EventLog* log = nullptr;
    const std::vector<Segment>* segments = nullptr;
    const std::vector<LabeledRun>* labeled = nullptr;
    const RecipeStats* stats = nullptr;
    const PruneReport* prune = nullptr;
    const PenaltyTable* alarm_penalties = nullptr;
    const PenaltyTable* violation_penalties = nullptr;
    const std::map<std::string, std::string>* limit_sensors = nullptr;
    std::vector<std::string> recipe_vocab;
};

/// Horizontal concatenation of exactly the groups named by `spec`, in the
/// fixed order APC_V, APC_R, LV_P, AL_P, DIPS. Throws on NaN/inf output.
FeatureMatrix materialize(const FeatureSpec& spec, const FeatureInputs& inputs,
                          const std::vector<std::size_t>& rows);

}  // namespace etchforge
