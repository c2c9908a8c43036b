#include "etchforge/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "etchforge/errors.hpp"

namespace etchforge {
namespace {

/// (segment index, position within segment) for a labeled row.
struct SegmentPosition {
    std::size_t segment = 0;
    std::size_t position = 0;
};

std::vector<SegmentPosition> positions_of(const std::vector<Segment>& segments,
                                          const std::vector<LabeledRun>& labeled) {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> pos;  // (segment, run_index) -> position
    for (std::size_t s = 0; s < segments.size(); ++s) {
        for (std::size_t p = 0; p < segments[s].run_indices.size(); ++p) {
            pos[{s, segments[s].run_indices[p]}] = p;
        }
    }
    std::vector<SegmentPosition> out(labeled.size());
    for (std::size_t i = 0; i < labeled.size(); ++i) {
        out[i] = {labeled[i].segment_index, pos.at({labeled[i].segment_index, labeled[i].run_index})};
    }
    return out;
}

/// Events grouped by segment, time-sorted.
std::vector<std::vector<const CodedEvent*>> events_by_segment(const std::vector<CodedEvent>& events,
                                                              const std::vector<Segment>& segments,
                                                              const SegmentLookup& lookup,
                                                              int* orphans = nullptr) {
    std::vector<std::vector<const CodedEvent*>> by_segment(segments.size());
    for (const auto& e : events) {
        const std::size_t s = lookup.segment_of(e.chamber_id, e.time);
        if (s == SegmentLookup::npos) {
            if (orphans) ++*orphans;
            continue;
        }
        by_segment[s].push_back(&e);
    }
    for (auto& v : by_segment) {
        std::sort(v.begin(), v.end(),
                  [](const CodedEvent* a, const CodedEvent* b) { return a->time < b->time; });
    }
    return by_segment;
}

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

void check_finite(const FeatureMatrix& m, const std::string& what) {
    if (!m.values.allFinite()) throw Error("feature matrix '" + what + "' contains NaN or infinite entries");
}

}  // namespace

std::vector<CodedEvent> coded_events(const std::vector<AlarmEvent>& alarms) {
    std::vector<CodedEvent> out;
    out.reserve(alarms.size());
    for (const auto& a : alarms) out.push_back({a.chamber_id, a.time, a.code});
    return out;
}

std::vector<CodedEvent> coded_events(const std::vector<LimitViolationEvent>& violations) {
    std::vector<CodedEvent> out;
    out.reserve(violations.size());
    for (const auto& v : violations) out.push_back({v.chamber_id, v.time, v.code});
    return out;
}

SegmentLookup::SegmentLookup(const std::vector<Segment>& segments) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const Segment& s = segments[i];
        spans_[s.chamber_id].push_back({s.start, s.breakdown_time.value_or(inf), i});
    }
    for (auto& [chamber, spans] : spans_) {
        std::sort(spans.begin(), spans.end(), [](const Span& a, const Span& b) { return a.lo < b.lo; });
        spans.front().lo = -inf;  // first observed segment absorbs earlier times
    }
}

std::size_t SegmentLookup::segment_of(const std::string& chamber, double time) const {
    const auto it = spans_.find(chamber);
    if (it == spans_.end()) return npos;
    const auto& spans = it->second;
    auto pos = std::upper_bound(spans.begin(), spans.end(), time,
                                [](double t, const Span& s) { return t < s.lo; });
    if (pos == spans.begin()) return npos;
    --pos;
    return time < pos->hi ? pos->index : npos;
}

PenaltyTable fit_penalties(const std::vector<CodedEvent>& events, PenaltyTable::Source source,
                           const EventLog& log, const std::vector<Segment>& segments,
                           const std::vector<LabeledRun>& labeled, const std::vector<std::size_t>& train_rows,
                           double epsilon_hours) {
    if (epsilon_hours <= 0.0) throw InvalidConfig("epsilon_hours must be > 0");

    PenaltyTable table;
    table.source = source;
    table.epsilon_hours = epsilon_hours;

    // TTF per (segment, position) for the training rows.
    const auto positions = positions_of(segments, labeled);
    std::map<std::pair<std::size_t, std::size_t>, double> ttf_at;
    std::set<std::size_t> train_segments;
    for (std::size_t row : train_rows) {
        const LabeledRun& lr = labeled.at(row);
        if (lr.censored) continue;
        ttf_at[{positions[row].segment, positions[row].position}] = lr.ttf;
        train_segments.insert(positions[row].segment);
    }

    const SegmentLookup lookup(segments);
    std::map<std::string, std::vector<double>> ttfs_per_code;
    for (const auto& e : events) {
        const std::size_t s = lookup.segment_of(e.chamber_id, e.time);
        if (s == SegmentLookup::npos) {
            ++table.ignored_events;
            continue;
        }
        if (!train_segments.count(s)) continue;  // not training data

        // Nearest preceding-or-equal run by start time.
        const auto& runs = segments[s].run_indices;
        auto pos = std::upper_bound(runs.begin(), runs.end(), e.time, [&](double t, std::size_t ri) {
            return t < log.runs[ri].start;
        });
        if (pos == runs.begin()) {
            ++table.ignored_events;  // event before any run of the segment
            continue;
        }
        const std::size_t position = static_cast<std::size_t>(pos - runs.begin()) - 1;
        const auto ttf_it = ttf_at.find({s, position});
        if (ttf_it == ttf_at.end()) {
            ++table.ignored_events;
            continue;
        }
        ttfs_per_code[e.code].push_back(ttf_it->second);
    }

    for (auto& [code, ttfs] : ttfs_per_code) {
        table.occurrences[code] = static_cast<int>(ttfs.size());
        const double med = median(std::move(ttfs));
        table.median_ttf[code] = med;
        table.penalty[code] = 1.0 / std::max(med, epsilon_hours);
    }
    return table;
}

std::string to_string(FeatureGroup g) {
    switch (g) {
        case FeatureGroup::APC_V: return "APC_V";
        case FeatureGroup::APC_R: return "APC_R";
        case FeatureGroup::LV_P: return "LV_P";
        case FeatureGroup::AL_P: return "AL_P";
        case FeatureGroup::DIPS: return "DIPS";
    }
    return "?";
}

FeatureSpec feature_spec(const std::string& name, int window_runs) {
    if (window_runs < 1) throw InvalidConfig("window_runs must be >= 1");
    using G = FeatureGroup;
    static const std::map<std::string, std::set<G>> kSets = {
        {"FS1", {G::APC_V, G::APC_R}},
        {"FS2", {G::APC_V, G::LV_P}},
        {"FS3", {G::APC_V, G::APC_R, G::LV_P, G::AL_P}},
        {"FS4", {G::APC_V, G::APC_R, G::LV_P, G::AL_P, G::DIPS}},
        {"FS5", {G::APC_V, G::LV_P, G::AL_P}},
        {"FS6", {G::LV_P, G::AL_P}},
        {"FS7", {G::AL_P}},
    };
    const auto it = kSets.find(name);
    if (it == kSets.end()) throw InvalidConfig("unknown feature set: " + name);
    return {name, it->second, window_runs};
}

std::vector<std::string> feature_spec_names() {
    return {"FS1", "FS2", "FS3", "FS4", "FS5", "FS6", "FS7"};
}

Eigen::Index FeatureMatrix::find(const std::string& name) const {
    for (std::size_t j = 0; j < names.size(); ++j) {
        if (names[j] == name) return static_cast<Eigen::Index>(j);
    }
    return -1;
}

FeatureBlock counter_features(const std::vector<CodedEvent>& events, const std::string& prefix,
                              const EventLog& log, const std::vector<Segment>& segments,
                              const std::vector<LabeledRun>& labeled, const std::vector<std::size_t>& rows,
                              const PenaltyTable& penalties, int window_runs) {
    if (window_runs < 1) throw InvalidConfig("window_runs must be >= 1");

    const SegmentLookup lookup(segments);
    const auto by_segment = events_by_segment(events, segments, lookup);
    const auto positions = positions_of(segments, labeled);

    // Cumulative counters along each needed segment.
    std::set<std::size_t> needed;
    for (std::size_t row : rows) needed.insert(positions[row].segment);

    // raw[s][p], weighted[s][p]: counters at each run position of segment s.
    std::map<std::size_t, std::vector<double>> raw, weighted;
    for (std::size_t s : needed) {
        const auto& runs = segments[s].run_indices;
        const auto& evts = by_segment[s];
        std::vector<double> r(runs.size(), 0.0), w(runs.size(), 0.0);
        std::size_t e = 0;
        double racc = 0.0, wacc = 0.0;
        for (std::size_t p = 0; p < runs.size(); ++p) {
            const double run_end = log.runs[runs[p]].end();
            while (e < evts.size() && evts[e]->time <= run_end) {
                racc += 1.0;
                wacc += 1.0 + penalties.at(evts[e]->code);
                ++e;
            }
            r[p] = racc;
            w[p] = wacc;
        }
        raw[s] = std::move(r);
        weighted[s] = std::move(w);
    }

    FeatureBlock block;
    block.names = {prefix + "_counter", prefix + "_weighted", prefix + "_grad_sum", prefix + "_grad_max"};
    block.values.resize(static_cast<Eigen::Index>(rows.size()), 4);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto [s, p] = positions[rows[i]];
        const auto& w = weighted.at(s);
        const double wc = w[p];
        const double before_window = p >= static_cast<std::size_t>(window_runs)
                                         ? w[p - static_cast<std::size_t>(window_runs)]
                                         : 0.0;
        double grad_max = 0.0;
        const std::size_t first = p + 1 >= static_cast<std::size_t>(window_runs)
                                      ? p + 1 - static_cast<std::size_t>(window_runs)
                                      : 0;
        for (std::size_t q = first; q <= p; ++q) {
            const double step = w[q] - (q > 0 ? w[q - 1] : 0.0);
            grad_max = std::max(grad_max, step);
        }
        block.values(static_cast<Eigen::Index>(i), 0) = raw.at(s)[p];
        block.values(static_cast<Eigen::Index>(i), 1) = wc;
        block.values(static_cast<Eigen::Index>(i), 2) = wc - before_window;
        block.values(static_cast<Eigen::Index>(i), 3) = grad_max;
    }
    return block;
}

FeatureBlock recipe_mix_features(const EventLog& log, const std::vector<Segment>& segments,
                                 const std::vector<LabeledRun>& labeled, const std::vector<std::size_t>& rows,
                                 const std::vector<std::string>& recipe_vocab, int window_runs) {
    if (window_runs < 1) throw InvalidConfig("window_runs must be >= 1");

    const auto positions = positions_of(segments, labeled);

    std::map<std::string, std::size_t> vocab_index;
    for (std::size_t v = 0; v < recipe_vocab.size(); ++v) vocab_index[recipe_vocab[v]] = v;

    FeatureBlock block;
    for (const auto& r : recipe_vocab) block.names.push_back("recipe_frac_" + r);
    block.names.push_back("recipe_frac_other");
    block.names.push_back("recipe_changes");
    block.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()),
                                         static_cast<Eigen::Index>(block.names.size()));

    const Eigen::Index other_col = static_cast<Eigen::Index>(recipe_vocab.size());
    const Eigen::Index changes_col = other_col + 1;

    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto [s, p] = positions[rows[i]];
        const auto& runs = segments[s].run_indices;
        const std::size_t first = p + 1 >= static_cast<std::size_t>(window_runs)
                                      ? p + 1 - static_cast<std::size_t>(window_runs)
                                      : 0;
        const double window = static_cast<double>(p - first + 1);
        double changes = 0.0;
        for (std::size_t q = first; q <= p; ++q) {
            const std::string& recipe = log.runs[runs[q]].recipe_id;
            const auto it = vocab_index.find(recipe);
            const Eigen::Index col = it == vocab_index.end() ? other_col : static_cast<Eigen::Index>(it->second);
            block.values(static_cast<Eigen::Index>(i), col) += 1.0 / window;
            if (q > first && log.runs[runs[q]].recipe_id != log.runs[runs[q - 1]].recipe_id) changes += 1.0;
        }
        block.values(static_cast<Eigen::Index>(i), changes_col) = changes;
    }
    return block;
}

FeatureBlock apcv_features(const Eigen::MatrixXd& standardized, const RecipeStats& stats,
                           const PruneReport& prune, const std::map<std::string, std::string>& limit_sensors) {
    std::set<std::string> limited;
    for (const auto& [code, sensor] : limit_sensors) limited.insert(sensor);

    std::map<std::string, Eigen::Index> column_of;
    for (std::size_t j = 0; j < stats.sensor_names.size(); ++j) {
        column_of[stats.sensor_names[j]] = static_cast<Eigen::Index>(j);
    }

    // Kept order preserves the original column order; limits on pruned or
    // unknown sensors simply select nothing for that sensor.
    std::vector<std::string> selected;
    for (const auto& name : prune.kept) {
        if (limited.count(name) && column_of.count(name)) selected.push_back(name);
    }
    if (selected.empty()) throw EmptySelection("no kept sensor column carries a limit definition");

    FeatureBlock block;
    block.names = selected;
    block.values.resize(standardized.rows(), static_cast<Eigen::Index>(selected.size()));
    for (std::size_t j = 0; j < selected.size(); ++j) {
        block.values.col(static_cast<Eigen::Index>(j)) = standardized.col(column_of.at(selected[j]));
    }
    return block;
}

FeatureBlock dip_features(const EventLog& log, const std::vector<Segment>& segments,
                          const std::vector<LabeledRun>& labeled, const std::vector<std::size_t>& rows,
                          int window_runs) {
    if (window_runs < 1) throw InvalidConfig("window_runs must be >= 1");

    const auto positions = positions_of(segments, labeled);

    std::map<std::string, std::vector<const VoltageDip*>> by_chamber;
    for (const auto& d : log.dips) by_chamber[d.chamber_id].push_back(&d);
    for (auto& [chamber, dips] : by_chamber) {
        std::sort(dips.begin(), dips.end(),
                  [](const VoltageDip* a, const VoltageDip* b) { return a->time < b->time; });
    }

    FeatureBlock block;
    block.names = {"dip_count", "dip_max_magnitude"};
    block.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), 2);

    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto [s, p] = positions[rows[i]];
        const Segment& seg = segments[s];
        const std::size_t first = p + 1 >= static_cast<std::size_t>(window_runs)
                                      ? p + 1 - static_cast<std::size_t>(window_runs)
                                      : 0;
        const double lo = log.runs[seg.run_indices[first]].start;
        const double hi = log.runs[seg.run_indices[p]].end();

        const auto it = by_chamber.find(seg.chamber_id);
        if (it == by_chamber.end()) continue;
        double count = 0.0, max_mag = 0.0;
        for (const VoltageDip* d : it->second) {
            if (d->time > hi) break;
            if (d->time < lo) continue;
            count += 1.0;
            max_mag = std::max(max_mag, d->magnitude);
        }
        block.values(static_cast<Eigen::Index>(i), 0) = count;
        block.values(static_cast<Eigen::Index>(i), 1) = max_mag;
    }
    return block;
}

FeatureMatrix materialize(const FeatureSpec& spec, const FeatureInputs& in,
                          const std::vector<std::size_t>& rows) {
    if (!in.log || !in.segments || !in.labeled) throw InvalidConfig("materialize: missing dataset inputs");

    std::vector<std::pair<FeatureGroup, FeatureBlock>> blocks;
    for (FeatureGroup g : {FeatureGroup::APC_V, FeatureGroup::APC_R, FeatureGroup::LV_P, FeatureGroup::AL_P,
                           FeatureGroup::DIPS}) {
        if (!spec.groups.count(g)) continue;
        switch (g) {
            case FeatureGroup::APC_V: {
                if (!in.stats || !in.prune || !in.limit_sensors) {
                    throw InvalidConfig("materialize: APC_V needs stats, prune report and limit map");
                }
                std::vector<std::size_t> run_rows;
                run_rows.reserve(rows.size());
                for (std::size_t row : rows) run_rows.push_back(in.labeled->at(row).run_index);
                const Eigen::MatrixXd std_matrix = standardize(in.log->runs, run_rows, *in.stats);
                blocks.emplace_back(g, apcv_features(std_matrix, *in.stats, *in.prune, *in.limit_sensors));
                break;
            }
            case FeatureGroup::APC_R:
                blocks.emplace_back(g, recipe_mix_features(*in.log, *in.segments, *in.labeled, rows,
                                                           in.recipe_vocab, spec.window_runs));
                break;
            case FeatureGroup::LV_P:
                if (!in.violation_penalties) throw InvalidConfig("materialize: LV_P needs violation penalties");
                blocks.emplace_back(g, counter_features(coded_events(in.log->violations), "lv", *in.log,
                                                        *in.segments, *in.labeled, rows,
                                                        *in.violation_penalties, spec.window_runs));
                break;
            case FeatureGroup::AL_P:
                if (!in.alarm_penalties) throw InvalidConfig("materialize: AL_P needs alarm penalties");
                blocks.emplace_back(g, counter_features(coded_events(in.log->alarms), "al", *in.log,
                                                        *in.segments, *in.labeled, rows, *in.alarm_penalties,
                                                        spec.window_runs));
                break;
            case FeatureGroup::DIPS:
                blocks.emplace_back(g, dip_features(*in.log, *in.segments, *in.labeled, rows, spec.window_runs));
                break;
        }
    }

    Eigen::Index total = 0;
    for (const auto& [g, b] : blocks) total += b.values.cols();

    FeatureMatrix out;
    out.values.resize(static_cast<Eigen::Index>(rows.size()), total);
    Eigen::Index at = 0;
    for (const auto& [g, b] : blocks) {
        out.values.middleCols(at, b.values.cols()) = b.values;
        for (const auto& name : b.names) {
            out.names.push_back(name);
            out.provenance.push_back(g);
        }
        at += b.values.cols();
    }
    check_finite(out, spec.name);
    return out;
}

}  // namespace etchforge
