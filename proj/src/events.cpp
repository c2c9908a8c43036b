#include "etchforge/events.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <tuple>

namespace etchforge {

std::string to_string(AlarmCategory c) {
    switch (c) {
        case AlarmCategory::warning: return "warning";
        case AlarmCategory::information: return "information";
        case AlarmCategory::critical: return "critical";
        case AlarmCategory::error: return "error";
        case AlarmCategory::other: return "other";
    }
    return "other";
}

std::string to_string(ViolationSeverity s) {
    return s == ViolationSeverity::error ? "error" : "information";
}

std::string to_string(MachineState s) {
    switch (s) {
        case MachineState::standby: return "standby";
        case MachineState::productive: return "productive";
        case MachineState::breakdown: return "breakdown";
        case MachineState::maintenance: return "maintenance";
    }
    return "standby";
}

AlarmCategory alarm_category_from_string(const std::string& s) {
    if (s == "warning") return AlarmCategory::warning;
    if (s == "information") return AlarmCategory::information;
    if (s == "critical") return AlarmCategory::critical;
    if (s == "error") return AlarmCategory::error;
    if (s == "other") return AlarmCategory::other;
    throw std::invalid_argument("unknown alarm category: " + s);
}

ViolationSeverity violation_severity_from_string(const std::string& s) {
    if (s == "error") return ViolationSeverity::error;
    if (s == "information") return ViolationSeverity::information;
    throw std::invalid_argument("unknown violation severity: " + s);
}

MachineState machine_state_from_string(const std::string& s) {
    if (s == "standby") return MachineState::standby;
    if (s == "productive") return MachineState::productive;
    if (s == "breakdown") return MachineState::breakdown;
    if (s == "maintenance") return MachineState::maintenance;
    throw std::invalid_argument("unknown machine state: " + s);
}

void EventLog::sort_normalize() {
    std::sort(runs.begin(), runs.end(), [](const Run& a, const Run& b) {
        return std::tie(a.chamber_id, a.start, a.run_id) < std::tie(b.chamber_id, b.start, b.run_id);
    });
    std::sort(alarms.begin(), alarms.end(), [](const AlarmEvent& a, const AlarmEvent& b) {
        return std::tie(a.chamber_id, a.time, a.code) < std::tie(b.chamber_id, b.time, b.code);
    });
    std::sort(violations.begin(), violations.end(),
              [](const LimitViolationEvent& a, const LimitViolationEvent& b) {
                  return std::tie(a.chamber_id, a.time, a.code) < std::tie(b.chamber_id, b.time, b.code);
              });
    std::sort(states.begin(), states.end(), [](const StateChange& a, const StateChange& b) {
        return std::tie(a.chamber_id, a.time) < std::tie(b.chamber_id, b.time);
    });
    std::sort(dips.begin(), dips.end(), [](const VoltageDip& a, const VoltageDip& b) {
        return std::tie(a.chamber_id, a.time, a.magnitude) < std::tie(b.chamber_id, b.time, b.magnitude);
    });
}

std::vector<std::string> EventLog::chamber_ids() const {
    std::set<std::string> ids;
    for (const auto& r : runs) ids.insert(r.chamber_id);
    for (const auto& s : states) ids.insert(s.chamber_id);
    return {ids.begin(), ids.end()};
}

}  // namespace etchforge
