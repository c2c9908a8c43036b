#include <doctest.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "etchforge/errors.hpp"
#include "etchforge/features.hpp"
#include "etchforge/ingest.hpp"
#include "etchforge/labeling.hpp"
#include "etchforge/sim.hpp"

using namespace etchforge;
namespace fs = std::filesystem;

namespace {

SimConfig small_config(std::uint64_t seed) {
    SimConfig c;
    c.seed = seed;
    c.n_chambers = 2;
    c.horizon_hours = 800;
    c.mean_segment_hours = 80;
    c.mean_run_hours = 2.0;
    return c;
}

std::string serialized(const EventLog& log) {
    const fs::path dir = fs::temp_directory_path() / ("etchforge_sim_" + std::to_string(::getpid()));
    write_event_log(log, dir);
    std::ostringstream os;
    for (const char* name : {"runs.jsonl", "alarms.jsonl", "violations.jsonl", "states.jsonl", "dips.jsonl"}) {
        std::ifstream in(dir / name);
        os << in.rdbuf() << '\x01';
    }
    fs::remove_all(dir);
    return os.str();
}

}  // namespace

TEST_CASE("simulate: identical config produces byte-identical serialized logs") {
    const EventLog a = simulate(small_config(7));
    const EventLog b = simulate(small_config(7));
    CHECK(a == b);
    CHECK(serialized(a) == serialized(b));
}

TEST_CASE("simulate: different seeds differ") {
    CHECK_FALSE(simulate(small_config(1)) == simulate(small_config(2)));
}

TEST_CASE("simulate: rejects zero counts and non-positive horizon") {
    SimConfig c = small_config(1);
    c.n_chambers = 0;
    CHECK_THROWS_AS(simulate(c), InvalidConfig);
    c = small_config(1);
    c.horizon_hours = 0.0;
    CHECK_THROWS_AS(simulate(c), InvalidConfig);
    c = small_config(1);
    c.n_sensors = 0;
    CHECK_THROWS_AS(simulate(c), InvalidConfig);
}

TEST_CASE("simulate: breakdown count stays in the calibrated band") {
    // Band established by a 100-seed Monte-Carlo sweep of this exact config.
    for (std::uint64_t seed : {0u, 13u, 42u, 99u}) {
        SimConfig c;
        c.seed = seed;
        c.n_chambers = 1;
        c.mean_segment_hours = 100;
        c.horizon_hours = 1000;
        const EventLog log = simulate(c);
        int breakdowns = 0;
        for (const auto& s : log.states) breakdowns += s.state == MachineState::breakdown ? 1 : 0;
        CHECK(breakdowns >= 5);
        CHECK(breakdowns <= 20);
    }
}

TEST_CASE("simulate: duplicate fraction 0.2 of 30 sensors plants exactly 6 duplicate columns") {
    SimConfig c = small_config(3);
    c.n_sensors = 30;
    c.duplicate_sensor_fraction = 0.2;
    const PlantedTruth truth = planted_truth(c);
    CHECK(truth.duplicate_pairs.size() == 6);

    // and the log's sensor columns really are exact copies
    const EventLog log = simulate(c);
    for (const auto& [dup, source] : truth.duplicate_pairs) {
        const std::string dup_name = sensor_name(dup, c.n_sensors);
        const std::string source_name = sensor_name(source, c.n_sensors);
        for (const auto& run : log.runs) {
            CHECK(run.sensors.at(dup_name) == run.sensors.at(source_name));
        }
    }
}

TEST_CASE("planted_truth: consistent with the generated log") {
    const SimConfig c = small_config(11);
    const PlantedTruth truth = planted_truth(c);

    SUBCASE("duplicate pairs point at existing sensor columns, source before duplicate") {
        for (const auto& [dup, source] : truth.duplicate_pairs) {
            CHECK(source < dup);
            CHECK(dup < c.n_sensors);
        }
    }
    SUBCASE("informative and noise sensors partition disjointly") {
        std::set<int> informative(truth.informative_sensors.begin(), truth.informative_sensors.end());
        for (int j : truth.noise_sensors) CHECK_FALSE(informative.count(j));
        CHECK_FALSE(truth.informative_sensors.empty());
        CHECK_FALSE(truth.noise_sensors.empty());
    }
    SUBCASE("every emitted alarm code has a hazard weight entry; degradation > 0") {
        const EventLog log = simulate(c);
        for (const auto& a : log.alarms) {
            REQUIRE(truth.alarm_hazard_weights.count(a.code));
            CHECK(truth.alarm_hazard_weights.at(a.code) >= 0.0);
        }
        bool any_degradation = false, any_background = false;
        for (const auto& [code, w] : truth.alarm_hazard_weights) {
            (w > 0.0 ? any_degradation : any_background) = true;
        }
        CHECK(any_degradation);
        CHECK(any_background);
    }
}

TEST_CASE("simulate: timestamps stay inside the horizon") {
    const SimConfig c = small_config(19);
    const EventLog log = simulate(c);
    auto in_horizon = [&](double t) { return t >= 0.0 && t <= c.horizon_hours; };
    for (const auto& r : log.runs) {
        CHECK(in_horizon(r.start));
        CHECK(in_horizon(r.end()));
    }
    for (const auto& a : log.alarms) CHECK(in_horizon(a.time));
    for (const auto& v : log.violations) CHECK(in_horizon(v.time));
    for (const auto& s : log.states) CHECK(in_horizon(s.time));
    for (const auto& d : log.dips) CHECK(in_horizon(d.time));
}

TEST_CASE("simulate: every breakdown is preceded by a run in its segment") {
    const EventLog log = simulate(small_config(23));
    const auto segments = segment_chambers(log);
    for (const auto& seg : segments) {
        if (seg.breakdown_time.has_value() && !seg.censored) {
            CHECK_FALSE(seg.run_indices.empty());
        }
    }
}

TEST_CASE("simulate: hazard grows across segment life (alarm rate last vs first decile)") {
    SimConfig config = small_config(29);
    config.horizon_hours = 1800;  // enough complete segments to average over
    const EventLog log = simulate(config);
    const auto segments = segment_chambers(log);
    const SegmentLookup lookup(segments);

    double first_decile_rate_sum = 0.0, last_decile_rate_sum = 0.0;
    int counted_segments = 0;

    std::vector<std::vector<const AlarmEvent*>> alarms_by_segment(segments.size());
    for (const auto& a : log.alarms) {
        const std::size_t s = lookup.segment_of(a.chamber_id, a.time);
        if (s != SegmentLookup::npos) alarms_by_segment[s].push_back(&a);
    }

    for (std::size_t s = 0; s < segments.size(); ++s) {
        const Segment& seg = segments[s];
        if (seg.censored || seg.run_indices.empty() || seg.total_productive_hours < 20.0) continue;
        const double lo = log.runs[seg.run_indices.front()].start;
        const double hi = log.runs[seg.run_indices.back()].end();
        const double span = hi - lo;
        if (span <= 0.0) continue;
        int first = 0, last = 0;
        for (const AlarmEvent* a : alarms_by_segment[s]) {
            if (a->time <= lo + 0.1 * span) ++first;
            if (a->time >= hi - 0.1 * span) ++last;
        }
        first_decile_rate_sum += first;
        last_decile_rate_sum += last;
        ++counted_segments;
    }
    REQUIRE(counted_segments >= 20);
    CHECK(last_decile_rate_sum / counted_segments >= first_decile_rate_sum / counted_segments);
}
