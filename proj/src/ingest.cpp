#include "etchforge/ingest.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>

#include "etchforge/errors.hpp"

namespace etchforge {
namespace {

using nlohmann::json;

bool blank(const std::string& line) {
    return line.find_first_not_of(" \t\r\n") == std::string::npos;
}

/// Applies `fn` to every non-blank line of `path`; wraps JSON errors into
/// MalformedRecord carrying the 1-based line number.
template <typename Fn>
void for_each_record(const std::filesystem::path& path, bool required, Fn fn) {
    std::ifstream in(path);
    if (!in) {
        if (required) throw MissingFile(path.string());
        return;
    }
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line)) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw MalformedRecord(path.filename().string(), lineno, e.what());
        }
        if (!j.is_object()) {
            throw MalformedRecord(path.filename().string(), lineno, "record is not a JSON object");
        }
        try {
            fn(j);
        } catch (const Error&) {
            throw;  // domain errors such as DuplicateRunId keep their type
        } catch (const std::exception& e) {
            throw MalformedRecord(path.filename().string(), lineno, e.what());
        }
    }
}

std::string require_string(const json& j, const char* key) {
    if (!j.contains(key)) throw std::invalid_argument(std::string("missing field '") + key + "'");
    const auto& v = j.at(key);
    if (!v.is_string()) throw std::invalid_argument(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

double require_number(const json& j, const char* key) {
    if (!j.contains(key)) throw std::invalid_argument(std::string("missing field '") + key + "'");
    const auto& v = j.at(key);
    if (!v.is_number()) throw std::invalid_argument(std::string("field '") + key + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw std::invalid_argument(std::string("field '") + key + "' must be finite");
    return x;
}

SensorMap parse_sensors(const json& j) {
    SensorMap out;
    if (!j.contains("sensors")) return out;
    const auto& s = j.at("sensors");
    if (!s.is_object()) throw std::invalid_argument("field 'sensors' must be an object");
    for (auto it = s.begin(); it != s.end(); ++it) {
        if (it.value().is_null()) {
            out[it.key()] = std::nullopt;
        } else if (it.value().is_number()) {
            out[it.key()] = it.value().get<double>();
        } else {
            throw std::invalid_argument("sensor '" + it.key() + "' must be a number or null");
        }
    }
    return out;
}

json sensors_to_json(const SensorMap& sensors) {
    json s = json::object();
    for (const auto& [name, value] : sensors) {
        if (value.has_value()) {
            s[name] = *value;
        } else {
            s[name] = nullptr;
        }
    }
    return s;
}

}  // namespace

EventLog parse_event_log(const std::filesystem::path& dir) {
    EventLog log;
    std::set<std::string> run_ids;

    for_each_record(dir / "runs.jsonl", true, [&](const json& j) {
        Run r;
        r.chamber_id = require_string(j, "chamber");
        r.run_id = require_string(j, "run");
        r.recipe_id = require_string(j, "recipe");
        r.start = require_number(j, "start");
        r.duration = require_number(j, "duration");
        if (r.duration <= 0.0) throw std::invalid_argument("duration must be > 0");
        r.sensors = parse_sensors(j);
        if (!run_ids.insert(r.run_id).second) throw DuplicateRunId(r.run_id);
        log.runs.push_back(std::move(r));
    });

    for_each_record(dir / "alarms.jsonl", true, [&](const json& j) {
        AlarmEvent a;
        a.chamber_id = require_string(j, "chamber");
        a.time = require_number(j, "time");
        a.code = require_string(j, "code");
        a.category = alarm_category_from_string(require_string(j, "category"));
        log.alarms.push_back(std::move(a));
    });

    for_each_record(dir / "violations.jsonl", true, [&](const json& j) {
        LimitViolationEvent v;
        v.chamber_id = require_string(j, "chamber");
        v.time = require_number(j, "time");
        v.code = require_string(j, "code");
        v.severity = violation_severity_from_string(require_string(j, "severity"));
        v.sensor = require_string(j, "sensor");
        log.violations.push_back(std::move(v));
    });

    for_each_record(dir / "states.jsonl", true, [&](const json& j) {
        StateChange s;
        s.chamber_id = require_string(j, "chamber");
        s.time = require_number(j, "time");
        s.state = machine_state_from_string(require_string(j, "state"));
        log.states.push_back(std::move(s));
    });

    for_each_record(dir / "dips.jsonl", false, [&](const json& j) {
        VoltageDip d;
        d.chamber_id = require_string(j, "chamber");
        d.time = require_number(j, "time");
        d.magnitude = require_number(j, "magnitude");
        if (d.magnitude <= 0.0) throw std::invalid_argument("magnitude must be > 0");
        log.dips.push_back(std::move(d));
    });

    log.sort_normalize();
    return log;
}

void write_event_log(const EventLog& log, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    auto open = [&](const char* name) {
        std::ofstream out(dir / name, std::ios::trunc);
        if (!out) throw Error(std::string("cannot write ") + (dir / name).string());
        return out;
    };

    {
        auto out = open("runs.jsonl");
        for (const auto& r : log.runs) {
            json j{{"chamber", r.chamber_id}, {"run", r.run_id},      {"recipe", r.recipe_id},
                   {"start", r.start},       {"duration", r.duration}, {"sensors", sensors_to_json(r.sensors)}};
            out << j.dump() << '\n';
        }
    }
    {
        auto out = open("alarms.jsonl");
        for (const auto& a : log.alarms) {
            json j{{"chamber", a.chamber_id}, {"time", a.time}, {"code", a.code}, {"category", to_string(a.category)}};
            out << j.dump() << '\n';
        }
    }
    {
        auto out = open("violations.jsonl");
        for (const auto& v : log.violations) {
            json j{{"chamber", v.chamber_id},
                   {"time", v.time},
                   {"code", v.code},
                   {"severity", to_string(v.severity)},
                   {"sensor", v.sensor}};
            out << j.dump() << '\n';
        }
    }
    {
        auto out = open("states.jsonl");
        for (const auto& s : log.states) {
            json j{{"chamber", s.chamber_id}, {"time", s.time}, {"state", to_string(s.state)}};
            out << j.dump() << '\n';
        }
    }
    {
        auto out = open("dips.jsonl");
        for (const auto& d : log.dips) {
            json j{{"chamber", d.chamber_id}, {"time", d.time}, {"magnitude", d.magnitude}};
            out << j.dump() << '\n';
        }
    }
}

std::string to_string(IssueKind k) {
    switch (k) {
        case IssueKind::overlapping_runs: return "overlapping_runs";
        case IssueKind::repeated_state: return "repeated_state";
        case IssueKind::out_of_order_events: return "out_of_order_events";
        case IssueKind::breakdown_without_productive: return "breakdown_without_productive";
        case IssueKind::unknown_chamber: return "unknown_chamber";
        case IssueKind::nonpositive_duration: return "nonpositive_duration";
    }
    return "unknown";
}

std::vector<ValidationIssue> validate(const EventLog& log) {
    std::vector<ValidationIssue> issues;
    auto add = [&](IssueKind kind, const std::string& chamber, double time, std::string detail) {
        issues.push_back({kind, chamber, time, std::move(detail)});
    };

    const auto chambers = log.chamber_ids();
    const std::set<std::string> known(chambers.begin(), chambers.end());

    // Per-chamber run ordering and overlap. Runs are grouped manually so the
    // check also works on logs that were never sort-normalized.
    std::map<std::string, std::vector<const Run*>> runs_by_chamber;
    for (const auto& r : log.runs) runs_by_chamber[r.chamber_id].push_back(&r);
    for (auto& [chamber, runs] : runs_by_chamber) {
        std::vector<const Run*> sorted = runs;
        std::sort(sorted.begin(), sorted.end(),
                  [](const Run* a, const Run* b) { return a->start < b->start; });
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            if (sorted[i]->duration <= 0.0) {
                add(IssueKind::nonpositive_duration, chamber, sorted[i]->start,
                    "run " + sorted[i]->run_id + " has non-positive duration");
            }
            if (i > 0 && sorted[i]->start < sorted[i - 1]->end()) {
                add(IssueKind::overlapping_runs, chamber, sorted[i]->start,
                    "run " + sorted[i]->run_id + " overlaps run " + sorted[i - 1]->run_id);
            }
        }
    }

    // Event streams must be non-decreasing in time within each chamber.
    auto check_order = [&](const auto& events, const char* stream) {
        std::map<std::string, double> last;
        for (const auto& e : events) {
            auto it = last.find(e.chamber_id);
            if (it != last.end() && e.time < it->second) {
                add(IssueKind::out_of_order_events, e.chamber_id, e.time,
                    std::string(stream) + " events out of order");
            }
            last[e.chamber_id] = std::max(it == last.end() ? e.time : it->second, e.time);
        }
    };
    check_order(log.alarms, "alarm");
    check_order(log.violations, "violation");
    check_order(log.states, "state");
    check_order(log.dips, "dip");

    // State machine: consecutive states differ; a breakdown needs a
    // productive phase since the previous breakdown.
    std::map<std::string, std::vector<const StateChange*>> states_by_chamber;
    for (const auto& s : log.states) states_by_chamber[s.chamber_id].push_back(&s);
    for (auto& [chamber, states] : states_by_chamber) {
        std::vector<const StateChange*> sorted = states;
        std::stable_sort(sorted.begin(), sorted.end(),
                         [](const StateChange* a, const StateChange* b) { return a->time < b->time; });
        bool productive_seen = false;
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            if (i > 0 && sorted[i]->state == sorted[i - 1]->state) {
                add(IssueKind::repeated_state, chamber, sorted[i]->time,
                    "state " + to_string(sorted[i]->state) + " repeated");
            }
            if (sorted[i]->state == MachineState::productive) productive_seen = true;
            if (sorted[i]->state == MachineState::breakdown) {
                if (!productive_seen) {
                    add(IssueKind::breakdown_without_productive, chamber, sorted[i]->time,
                        "breakdown with no preceding productive state");
                }
                productive_seen = false;
            }
        }
    }

    // Chamber ids referenced by events must exist in runs or states.
    auto check_chamber = [&](const auto& events, const char* stream) {
        for (const auto& e : events) {
            if (!known.count(e.chamber_id)) {
                add(IssueKind::unknown_chamber, e.chamber_id, e.time,
                    std::string(stream) + " event references unknown chamber");
            }
        }
    };
    check_chamber(log.alarms, "alarm");
    check_chamber(log.violations, "violation");
    check_chamber(log.dips, "dip");

    return issues;
}

EventLog filter_recipes(const EventLog& log, const std::set<std::string>& productive_recipes) {
    if (productive_recipes.empty()) throw InvalidConfig("productive recipe set must not be empty");
    EventLog out = log;
    out.runs.clear();
    for (const auto& r : log.runs) {
        if (productive_recipes.count(r.recipe_id)) out.runs.push_back(r);
    }
    if (out.runs.empty()) throw EmptyResult("no runs left after recipe filtering");
    return out;
}

}  // namespace etchforge
