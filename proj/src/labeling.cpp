#include "etchforge/labeling.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "etchforge/errors.hpp"

namespace etchforge {

std::vector<double> default_interval_bounds() {
    return {8.0, 16.0, 24.0, 48.0, 72.0, 96.0, 120.0, 144.0, 168.0, 336.0};
}

std::vector<Segment> segment_chambers(const EventLog& log) {
    // Breakdown times per chamber delimit the segments; run membership is by
    // start time within the half-open interval [previous breakdown, breakdown).
    std::map<std::string, std::vector<double>> breakdowns;
    for (const auto& s : log.states) {
        if (s.state == MachineState::breakdown) breakdowns[s.chamber_id].push_back(s.time);
    }
    for (auto& [chamber, times] : breakdowns) std::sort(times.begin(), times.end());

    std::map<std::string, std::vector<std::size_t>> runs_by_chamber;
    for (std::size_t i = 0; i < log.runs.size(); ++i) runs_by_chamber[log.runs[i].chamber_id].push_back(i);
    for (auto& [chamber, idx] : runs_by_chamber) {
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return log.runs[a].start < log.runs[b].start;
        });
    }

    std::vector<Segment> segments;
    for (auto& [chamber, run_idx] : runs_by_chamber) {
        const auto bd_it = breakdowns.find(chamber);
        const std::vector<double> bd = bd_it == breakdowns.end() ? std::vector<double>{} : bd_it->second;

        // slot k holds runs between bd[k-1] and bd[k]; slot bd.size() trails.
        std::vector<std::vector<std::size_t>> slots(bd.size() + 1);
        for (std::size_t i : run_idx) {
            const double start = log.runs[i].start;
            const std::size_t k = std::upper_bound(bd.begin(), bd.end(), start) - bd.begin();
            slots[k].push_back(i);
        }

        int ordinal = 0;
        for (std::size_t k = 0; k < slots.size(); ++k) {
            const bool leading = (k == 0);
            const bool trailing = (k == bd.size());
            if (slots[k].empty() && (leading || trailing)) continue;  // no runs outside breakdown bounds

            Segment seg;
            char buf[16];
            std::snprintf(buf, sizeof(buf), "%03d", ordinal++);
            seg.segment_id = chamber + ":seg" + buf;
            seg.chamber_id = chamber;
            seg.start = leading ? (slots[k].empty() ? 0.0 : log.runs[slots[k].front()].start) : bd[k - 1];
            if (!trailing) seg.breakdown_time = bd[k];
            seg.censored = leading || trailing;
            seg.run_indices = slots[k];
            for (std::size_t i : slots[k]) seg.total_productive_hours += log.runs[i].duration;
            segments.push_back(std::move(seg));
        }
    }
    return segments;
}

std::vector<LabeledRun> compute_ttf(const EventLog& log, const std::vector<Segment>& segments) {
    std::vector<LabeledRun> labeled;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        const Segment& seg = segments[s];
        // Suffix sums of durations give the descending counter in one pass.
        double after = 0.0;
        std::vector<double> ttf(seg.run_indices.size());
        for (std::size_t i = seg.run_indices.size(); i-- > 0;) {
            ttf[i] = after;
            after += log.runs[seg.run_indices[i]].duration;
        }
        for (std::size_t i = 0; i < seg.run_indices.size(); ++i) {
            LabeledRun lr;
            lr.run_index = seg.run_indices[i];
            lr.segment_index = s;
            lr.segment_id = seg.segment_id;
            lr.censored = seg.censored;
            if (!seg.censored) lr.ttf = ttf[i];
            labeled.push_back(std::move(lr));
        }
    }
    return labeled;
}

std::vector<LabeledRun> compute_health(std::vector<LabeledRun> labeled) {
    std::map<std::size_t, double> max_ttf;
    for (const auto& lr : labeled) {
        if (lr.censored) continue;
        auto [it, inserted] = max_ttf.emplace(lr.segment_index, lr.ttf);
        if (!inserted) it->second = std::max(it->second, lr.ttf);
    }
    for (auto& lr : labeled) {
        if (lr.censored) continue;
        const double mx = max_ttf.at(lr.segment_index);
        lr.health = mx > 0.0 ? lr.ttf / mx : 0.0;
    }
    return labeled;
}

std::vector<LabeledRun> compute_interval_labels(std::vector<LabeledRun> labeled,
                                                const std::vector<double>& bounds) {
    if (bounds.empty()) throw InvalidConfig("interval bounds must not be empty");
    for (std::size_t i = 0; i < bounds.size(); ++i) {
        if (bounds[i] <= 0.0) throw InvalidConfig("interval bounds must be positive");
        if (i > 0 && bounds[i] <= bounds[i - 1]) throw InvalidConfig("interval bounds must be strictly increasing");
    }
    for (auto& lr : labeled) {
        lr.interval_labels.clear();
        if (lr.censored) continue;
        for (double b : bounds) lr.interval_labels[b] = lr.ttf <= b;
    }
    return labeled;
}

CleanedDataset clean_short_segments(std::vector<LabeledRun> labeled, std::vector<Segment> segments,
                                    double min_hours) {
    if (min_hours < 0.0) throw InvalidConfig("min_hours must be >= 0");

    CleanedDataset out;
    out.report.min_hours = min_hours;

    std::vector<bool> keep(segments.size(), true);
    for (std::size_t s = 0; s < segments.size(); ++s) {
        if (!segments[s].censored && segments[s].total_productive_hours < min_hours) {
            keep[s] = false;
            out.report.removed_segments.push_back(segments[s].segment_id);
        }
    }

    std::vector<std::size_t> remap(segments.size(), 0);
    for (std::size_t s = 0, next = 0; s < segments.size(); ++s) {
        if (keep[s]) {
            remap[s] = next++;
            out.segments.push_back(segments[s]);
        }
    }
    if (out.segments.empty()) throw EmptyResult("no segments left after cleaning");

    bool any_run = false;
    for (auto& lr : labeled) {
        if (!keep[lr.segment_index]) {
            ++out.report.removed_runs;
            continue;
        }
        lr.segment_index = remap[lr.segment_index];
        out.labeled.push_back(std::move(lr));
        any_run = true;
    }
    if (!any_run) throw EmptyResult("no labeled runs left after cleaning");
    return out;
}

}  // namespace etchforge
