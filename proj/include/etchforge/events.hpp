#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace etchforge {

enum class AlarmCategory { warning, information, critical, error, other };
enum class ViolationSeverity { error, information };
enum class MachineState { standby, productive, breakdown, maintenance };

std::string to_string(AlarmCategory c);
std::string to_string(ViolationSeverity s);
std::string to_string(MachineState s);

/// Throw std::invalid_argument on anything outside the closed enum sets.
AlarmCategory alarm_category_from_string(const std::string& s);
ViolationSeverity violation_severity_from_string(const std::string& s);
MachineState machine_state_from_string(const std::string& s);

/// Sensor name -> value; nullopt means the parameter was not used in the run.
using SensorMap = std::map<std::string, std::optional<double>>;

/// One process run (per-wafer APC recording). Timestamps are hours from a
/// common epoch; calendar time is out of scope.
struct Run {
    std::string chamber_id;
    std::string run_id;
    std::string recipe_id;
    double start = 0.0;
    double duration = 0.0;  // > 0
    SensorMap sensors;

    double end() const { return start + duration; }

    bool operator==(const Run&) const = default;
};

struct AlarmEvent {
    std::string chamber_id;
    double time = 0.0;
    std::string code;
    AlarmCategory category = AlarmCategory::other;

    bool operator==(const AlarmEvent&) const = default;
};

struct LimitViolationEvent {
    std::string chamber_id;
    double time = 0.0;
    std::string code;
    ViolationSeverity severity = ViolationSeverity::information;
    std::string sensor;  // APC parameter whose limit was violated

    bool operator==(const LimitViolationEvent&) const = default;
};

struct StateChange {
    std::string chamber_id;
    double time = 0.0;
    MachineState state = MachineState::standby;

    bool operator==(const StateChange&) const = default;
};

struct VoltageDip {
    std::string chamber_id;
    double time = 0.0;
    double magnitude = 0.0;  // volts, > 0

    bool operator==(const VoltageDip&) const = default;
};

/// The five raw streams for one or more chambers.
struct EventLog {
    std::vector<Run> runs;
    std::vector<AlarmEvent> alarms;
    std::vector<LimitViolationEvent> violations;
    std::vector<StateChange> states;
    std::vector<VoltageDip> dips;

    /// Sorts every stream by (chamber, time) with deterministic tiebreakers.
    void sort_normalize();

    /// Sorted unique chamber ids seen in runs or states.
    std::vector<std::string> chamber_ids() const;

    bool operator==(const EventLog&) const = default;
};

}  // namespace etchforge
