#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "etchforge/events.hpp"

namespace etchforge {

/// Reads runs/alarms/violations/states(.jsonl) plus optional dips.jsonl from
/// `dir` and returns a validated, sort-normalized EventLog. Unknown JSON
/// fields are ignored. Throws MalformedRecord, MissingFile, DuplicateRunId.
EventLog parse_event_log(const std::filesystem::path& dir);

/// Writes the five JSONL streams into `dir` (created if needed).
/// parse_event_log(write_event_log(log)) == sort-normalized log.
void write_event_log(const EventLog& log, const std::filesystem::path& dir);

enum class IssueKind {
    overlapping_runs,
    repeated_state,
    out_of_order_events,
    breakdown_without_productive,
    unknown_chamber,
    nonpositive_duration,
};

std::string to_string(IssueKind k);

struct ValidationIssue {
    IssueKind kind;
    std::string chamber_id;
    double time = 0.0;
    std::string detail;
};

/// Reports consistency findings without mutating or throwing; an empty
/// result means the log satisfies all cross-record invariants.
std::vector<ValidationIssue> validate(const EventLog& log);

/// Restricts runs to the given productive recipes; events are untouched.
/// Throws EmptyResult when no run survives.
EventLog filter_recipes(const EventLog& log, const std::set<std::string>& productive_recipes);

}  // namespace etchforge
