#pragma once

// Hand-built logs shared across test files.

#include <string>
#include <vector>

#include "etchforge/events.hpp"

namespace fixtures {

inline etchforge::Run run(const std::string& chamber, const std::string& id, const std::string& recipe,
                          double start, double duration, etchforge::SensorMap sensors = {}) {
    etchforge::Run r;
    r.chamber_id = chamber;
    r.run_id = id;
    r.recipe_id = recipe;
    r.start = start;
    r.duration = duration;
    r.sensors = std::move(sensors);
    return r;
}

inline etchforge::StateChange breakdown(const std::string& chamber, double time) {
    return {chamber, time, etchforge::MachineState::breakdown};
}

inline etchforge::StateChange productive(const std::string& chamber, double time) {
    return {chamber, time, etchforge::MachineState::productive};
}

/// One chamber, runs of the given durations back to back starting at
/// `start`, bracketed by breakdowns so the runs form one complete segment
/// (the span before the first breakdown counts as censored).
inline etchforge::EventLog duration_chain(const std::vector<double>& durations, bool with_breakdown = true,
                                          double start = 10.0) {
    etchforge::EventLog log;
    log.states.push_back(productive("C1", start - 2.0));
    log.states.push_back(breakdown("C1", start - 1.0));
    log.states.push_back(productive("C1", start));
    double t = start;
    int i = 0;
    for (double d : durations) {
        log.runs.push_back(run("C1", "r" + std::to_string(i++), "R1", t, d));
        t += d;
    }
    if (with_breakdown) log.states.push_back(breakdown("C1", t + 0.01));
    log.sort_normalize();
    return log;
}

}  // namespace fixtures
