#include <doctest.h>

#include "etchforge/errors.hpp"
#include "etchforge/labeling.hpp"
#include "etchforge/sim.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace etchforge;

TEST_CASE("segment_chambers: breakdowns at 100 and 250 with runs throughout give censored/complete/censored") {
    EventLog log;
    log.states.push_back(fixtures::productive("C1", 0.0));
    log.states.push_back(fixtures::breakdown("C1", 100.0));
    log.states.push_back(fixtures::breakdown("C1", 250.0));
    for (int i = 0; i < 30; ++i) {
        log.runs.push_back(fixtures::run("C1", "r" + std::to_string(i), "R1", 10.0 * i + 1.0, 5.0));
    }
    log.sort_normalize();

    const auto segments = segment_chambers(log);
    REQUIRE(segments.size() == 3);
    CHECK(segments[0].censored);
    CHECK(segments[0].breakdown_time == 100.0);
    CHECK_FALSE(segments[1].censored);
    CHECK(segments[1].breakdown_time == 250.0);
    CHECK(segments[2].censored);
    CHECK_FALSE(segments[2].breakdown_time.has_value());

    std::size_t total_runs = 0;
    for (const auto& s : segments) total_runs += s.run_indices.size();
    CHECK(total_runs == log.runs.size());
}

TEST_CASE("segment_chambers: no breakdowns yields one censored segment with every run") {
    EventLog log;
    log.runs.push_back(fixtures::run("C1", "r1", "R1", 0.0, 1.0));
    log.runs.push_back(fixtures::run("C1", "r2", "R1", 2.0, 1.0));
    log.sort_normalize();
    const auto segments = segment_chambers(log);
    REQUIRE(segments.size() == 1);
    CHECK(segments[0].censored);
    CHECK(segments[0].run_indices.size() == 2);
}

TEST_CASE("segment_chambers: four breakdowns with runs on both flanks give five segments") {
    EventLog log;
    log.states.push_back(fixtures::productive("C1", 0.0));
    for (double bd : {100.0, 200.0, 300.0, 400.0}) log.states.push_back(fixtures::breakdown("C1", bd));
    for (int i = 0; i < 45; ++i) {
        log.runs.push_back(fixtures::run("C1", "r" + std::to_string(i), "R1", 10.0 * i + 1.0, 5.0));
    }
    log.sort_normalize();
    const auto segments = segment_chambers(log);
    CHECK(segments.size() == 5);
    int complete = 0;
    for (const auto& s : segments) complete += s.censored ? 0 : 1;
    CHECK(complete == 3);  // leading and trailing spans are censored
}

TEST_CASE("compute_ttf: durations [2,3,1] then breakdown give ttfs [4,1,0]") {
    const EventLog log = fixtures::duration_chain({2.0, 3.0, 1.0});
    const auto segments = segment_chambers(log);
    const auto labeled = compute_ttf(log, segments);
    REQUIRE(labeled.size() == 3);
    CHECK(labeled[0].ttf == doctest::Approx(4.0));
    CHECK(labeled[1].ttf == doctest::Approx(1.0));
    CHECK(labeled[2].ttf == doctest::Approx(0.0));
    for (const auto& lr : labeled) CHECK_FALSE(lr.censored);
}

TEST_CASE("compute_ttf: single-run segment has ttf 0") {
    const EventLog log = fixtures::duration_chain({7.0});
    const auto labeled = compute_ttf(log, segment_chambers(log));
    REQUIRE(labeled.size() == 1);
    CHECK(labeled[0].ttf == 0.0);
}

TEST_CASE("compute_ttf: censored runs carry no label") {
    EventLog log;
    log.runs.push_back(fixtures::run("C1", "r1", "R1", 0.0, 1.0));  // before any breakdown
    log.sort_normalize();
    const auto labeled = compute_ttf(log, segment_chambers(log));
    REQUIRE(labeled.size() == 1);
    CHECK(labeled[0].censored);
}

TEST_CASE("compute_ttf: agrees exactly with the O(n^2) oracle on simulated logs") {
    for (std::uint64_t seed : {2u, 17u}) {
        SimConfig c;
        c.seed = seed;
        c.n_chambers = 2;
        c.horizon_hours = 500;
        c.mean_segment_hours = 60;
        c.mean_run_hours = 2.0;
        const EventLog log = simulate(c);
        const auto segments = segment_chambers(log);
        const auto labeled = compute_ttf(log, segments);

        std::map<std::size_t, std::vector<double>> oracle;  // segment -> position-ordered ttf
        for (std::size_t s = 0; s < segments.size(); ++s) {
            oracle[s] = oracles::brute_force_ttf(log, segments[s]);
        }
        std::map<std::size_t, std::size_t> cursor;
        for (const auto& lr : labeled) {
            const std::size_t pos = cursor[lr.segment_index]++;
            if (lr.censored) continue;
            CHECK(lr.ttf == oracle.at(lr.segment_index)[pos]);  // exact, no tolerance
        }
    }
}

TEST_CASE("compute_ttf: consecutive differences equal the next run's duration") {
    const EventLog log = fixtures::duration_chain({1.5, 2.5, 0.5, 3.0});
    const auto segments = segment_chambers(log);
    const auto labeled = compute_ttf(log, segments);
    for (std::size_t i = 0; i + 1 < labeled.size(); ++i) {
        const double next_duration = log.runs[labeled[i + 1].run_index].duration;
        CHECK(labeled[i].ttf - labeled[i + 1].ttf == doctest::Approx(next_duration));
    }
}

TEST_CASE("compute_health: ttfs [4,1,0] map to [1.0, 0.25, 0.0]") {
    const EventLog log = fixtures::duration_chain({2.0, 3.0, 1.0});
    const auto labeled = compute_health(compute_ttf(log, segment_chambers(log)));
    CHECK(labeled[0].health == doctest::Approx(1.0));
    CHECK(labeled[1].health == doctest::Approx(0.25));
    CHECK(labeled[2].health == doctest::Approx(0.0));
}

TEST_CASE("compute_health: single-run segment gets health 0") {
    const EventLog log = fixtures::duration_chain({7.0});
    const auto labeled = compute_health(compute_ttf(log, segment_chambers(log)));
    CHECK(labeled[0].health == 0.0);
}

TEST_CASE("compute_health: bounds and per-segment extremes on simulated data") {
    SimConfig c;
    c.seed = 31;
    c.n_chambers = 2;
    c.horizon_hours = 600;
    c.mean_segment_hours = 70;
    c.mean_run_hours = 2.0;
    const EventLog log = simulate(c);
    const auto segments = segment_chambers(log);
    const auto labeled = compute_health(compute_ttf(log, segments));

    std::map<std::size_t, double> max_h, min_h;
    std::map<std::size_t, std::size_t> count;
    for (const auto& lr : labeled) {
        if (lr.censored) continue;
        CHECK(lr.health >= 0.0);
        CHECK(lr.health <= 1.0);
        auto [it_max, new_max] = max_h.emplace(lr.segment_index, lr.health);
        if (!new_max) it_max->second = std::max(it_max->second, lr.health);
        auto [it_min, new_min] = min_h.emplace(lr.segment_index, lr.health);
        if (!new_min) it_min->second = std::min(it_min->second, lr.health);
        ++count[lr.segment_index];
    }
    for (const auto& [seg, n] : count) {
        if (n < 2) continue;
        CHECK(max_h.at(seg) == 1.0);  // exact per the scaling rule
        CHECK(min_h.at(seg) == 0.0);
    }
}

TEST_CASE("compute_interval_labels") {
    EventLog log = fixtures::duration_chain({10.0, 10.0});
    auto labeled = compute_ttf(log, segment_chambers(log));

    SUBCASE("ttf 10 against bounds 8/16/24") {
        labeled = compute_interval_labels(std::move(labeled), {8.0, 16.0, 24.0});
        const auto& labels = labeled[0].interval_labels;  // first run: ttf = 10
        CHECK_FALSE(labels.at(8.0));
        CHECK(labels.at(16.0));
        CHECK(labels.at(24.0));
    }
    SUBCASE("ttf 0 is true at every bound") {
        labeled = compute_interval_labels(std::move(labeled), {8.0, 16.0, 24.0});
        for (const auto& [bound, value] : labeled[1].interval_labels) CHECK(value);
    }
    SUBCASE("labels are monotone in the bound") {
        labeled = compute_interval_labels(std::move(labeled), default_interval_bounds());
        for (const auto& lr : labeled) {
            bool seen_true = false;
            for (const auto& [bound, value] : lr.interval_labels) {
                if (seen_true) CHECK(value);
                seen_true = seen_true || value;
            }
        }
    }
    SUBCASE("non-increasing bounds are rejected") {
        CHECK_THROWS_AS(compute_interval_labels(std::move(labeled), {8.0, 8.0}), InvalidConfig);
    }
    SUBCASE("default bounds list has ten entries") { CHECK(default_interval_bounds().size() == 10); }
}

TEST_CASE("clean_short_segments") {
    SUBCASE("min_hours 0 is the identity") {
        const EventLog log = fixtures::duration_chain({2.0, 3.0});
        auto segments = segment_chambers(log);
        auto labeled = compute_ttf(log, segments);
        const auto cleaned = clean_short_segments(labeled, segments, 0.0);
        CHECK(cleaned.labeled.size() == labeled.size());
        CHECK(cleaned.segments.size() == segments.size());
        CHECK(cleaned.report.removed_segments.empty());
    }

    SUBCASE("2h segment removed, 80h segment kept at min 5") {
        EventLog log;
        log.states.push_back(fixtures::productive("C1", 0.0));
        log.states.push_back(fixtures::breakdown("C1", 10.0));
        log.runs.push_back(fixtures::run("C1", "a1", "R1", 11.0, 2.0));  // 2h segment
        log.states.push_back(fixtures::breakdown("C1", 14.0));
        for (int i = 0; i < 8; ++i) {
            log.runs.push_back(fixtures::run("C1", "b" + std::to_string(i), "R1", 15.0 + 10.0 * i, 10.0));
        }
        log.states.push_back(fixtures::breakdown("C1", 96.0));
        log.sort_normalize();

        auto segments = segment_chambers(log);
        auto labeled = compute_ttf(log, segments);
        const auto cleaned = clean_short_segments(labeled, segments, 5.0);
        REQUIRE(cleaned.report.removed_segments.size() == 1);
        CHECK(cleaned.report.removed_runs == 1);
        std::size_t complete = 0;
        for (const auto& s : cleaned.segments) complete += s.censored ? 0 : 1;
        CHECK(complete == 1);
        // surviving labels still point at the right segments
        for (const auto& lr : cleaned.labeled) {
            CHECK(cleaned.segments.at(lr.segment_index).segment_id == lr.segment_id);
        }
    }

    SUBCASE("nothing surviving raises EmptyResult") {
        const EventLog log = fixtures::duration_chain({1.0});
        auto segments = segment_chambers(log);
        auto labeled = compute_ttf(log, segments);
        CHECK_THROWS_AS(clean_short_segments(labeled, segments, 100.0), EmptyResult);
    }
}
