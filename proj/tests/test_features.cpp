#include <doctest.h>

#include <numeric>

#include "etchforge/errors.hpp"
#include "etchforge/features.hpp"
#include "etchforge/pipeline.hpp"
#include "etchforge/sim.hpp"
#include "fixtures.hpp"

using namespace etchforge;

namespace {

/// Three 1h runs starting at 10, breakdown after; alarms configurable.
struct CounterFixture {
    EventLog log;
    std::vector<Segment> segments;
    std::vector<LabeledRun> labeled;
    std::vector<std::size_t> rows;

    explicit CounterFixture(std::vector<AlarmEvent> alarms, int n_runs = 3) {
        log = fixtures::duration_chain(std::vector<double>(n_runs, 1.0));
        log.alarms = std::move(alarms);
        log.sort_normalize();
        segments = segment_chambers(log);
        labeled = compute_ttf(log, segments);
        rows.resize(labeled.size());
        std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
};

}  // namespace

TEST_CASE("fit_penalties: occurrence ttfs {2,4,6} give median 4 and AP 0.25") {
    // Runs of 2h each: ttfs are [6,4,2,0]; alarms during runs 1..3.
    EventLog log = fixtures::duration_chain({2.0, 2.0, 2.0, 2.0});
    log.alarms = {{"C1", 10.5, "X", AlarmCategory::warning},
                  {"C1", 12.5, "X", AlarmCategory::warning},
                  {"C1", 14.5, "X", AlarmCategory::warning}};
    log.sort_normalize();
    const auto segments = segment_chambers(log);
    const auto labeled = compute_ttf(log, segments);
    std::vector<std::size_t> rows(labeled.size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});

    const auto table = fit_penalties(coded_events(log.alarms), PenaltyTable::Source::alarm, log, segments,
                                     labeled, rows, 1.0);
    CHECK(table.median_ttf.at("X") == doctest::Approx(4.0));
    CHECK(table.penalty.at("X") == doctest::Approx(0.25));
    CHECK(table.occurrences.at("X") == 3);
}

TEST_CASE("fit_penalties: code at ttf 0 only is clamped to AP 1/epsilon") {
    EventLog log = fixtures::duration_chain({2.0, 2.0});
    log.alarms = {{"C1", 13.5, "SHUTDOWN", AlarmCategory::critical}};  // during last run, ttf 0
    log.sort_normalize();
    const auto segments = segment_chambers(log);
    const auto labeled = compute_ttf(log, segments);
    std::vector<std::size_t> rows(labeled.size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});

    const auto table = fit_penalties(coded_events(log.alarms), PenaltyTable::Source::alarm, log, segments,
                                     labeled, rows, 1.0);
    CHECK(table.penalty.at("SHUTDOWN") == doctest::Approx(1.0));
}

TEST_CASE("fit_penalties: unseen code contributes penalty 0") {
    PenaltyTable table;
    CHECK(table.at("NEVER_SEEN") == 0.0);
}

TEST_CASE("fit_penalties: events before any run are counted as ignored") {
    EventLog log = fixtures::duration_chain({2.0, 2.0});
    // duration_chain puts a bracketing breakdown at start-1 = 9; an event at
    // 9.5 is inside the complete segment but precedes its first run.
    log.alarms = {{"C1", 9.5, "EARLY", AlarmCategory::other}};
    log.sort_normalize();
    const auto segments = segment_chambers(log);
    const auto labeled = compute_ttf(log, segments);
    std::vector<std::size_t> rows(labeled.size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});

    const auto table = fit_penalties(coded_events(log.alarms), PenaltyTable::Source::alarm, log, segments,
                                     labeled, rows, 1.0);
    CHECK(table.ignored_events == 1);
    CHECK_FALSE(table.penalty.count("EARLY"));
}

TEST_CASE("counter_features: weighted counter [1.5, 1.5, 2.75] and window-2 gradients") {
    CounterFixture fx({{"C1", 10.5, "P", AlarmCategory::warning},   // during run 0
                       {"C1", 12.5, "Q", AlarmCategory::warning}});  // during run 2
    PenaltyTable penalties;
    penalties.penalty = {{"P", 0.5}, {"Q", 0.25}};

    const FeatureBlock block = counter_features(coded_events(fx.log.alarms), "al", fx.log, fx.segments,
                                                fx.labeled, fx.rows, penalties, 2);
    REQUIRE(block.values.rows() == 3);
    const Eigen::Index weighted = 1, grad_sum = 2, grad_max = 3;
    CHECK(block.values(0, weighted) == doctest::Approx(1.5));
    CHECK(block.values(1, weighted) == doctest::Approx(1.5));
    CHECK(block.values(2, weighted) == doctest::Approx(2.75));
    CHECK(block.values(2, grad_sum) == doctest::Approx(1.25));   // wc(2) - wc(0)
    CHECK(block.values(2, grad_max) == doctest::Approx(1.25));
    CHECK(block.values(0, 0) == doctest::Approx(1.0));  // raw counter
    CHECK(block.values(2, 0) == doctest::Approx(2.0));
}

TEST_CASE("counter_features: no events means all-zero columns") {
    CounterFixture fx({});
    PenaltyTable penalties;
    const FeatureBlock block = counter_features({}, "al", fx.log, fx.segments, fx.labeled, fx.rows,
                                                penalties, 10);
    CHECK(block.values.isZero(0.0));
}

TEST_CASE("counter_features: weighted counter is non-decreasing and resets per segment") {
    SimConfig c;
    c.seed = 8;
    c.n_chambers = 1;
    c.horizon_hours = 400;
    c.mean_segment_hours = 60;
    c.mean_run_hours = 2.0;
    const EventLog log = simulate(c);
    const auto segments = segment_chambers(log);
    const auto labeled = compute_ttf(log, segments);
    std::vector<std::size_t> rows(labeled.size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    PenaltyTable penalties;  // weights default to 0 -> weighted == raw
    const FeatureBlock block = counter_features(coded_events(log.alarms), "al", log, segments, labeled, rows,
                                                penalties, 10);

    double prev = 0.0;
    std::size_t prev_segment = static_cast<std::size_t>(-1);
    std::size_t first_rows_with_zero = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double wc = block.values(static_cast<Eigen::Index>(i), 1);
        if (labeled[i].segment_index != prev_segment) {
            prev_segment = labeled[i].segment_index;
            prev = 0.0;
            first_rows_with_zero += wc <= 1e-12 ? 1 : 0;  // may already count events at segment start
        }
        CHECK(wc >= prev);
        prev = wc;
    }
    CHECK(first_rows_with_zero > 0);
}

TEST_CASE("counter_features: removing a code's events lowers the counter linearly") {
    CounterFixture fx({{"C1", 10.5, "P", AlarmCategory::warning},
                       {"C1", 11.5, "P", AlarmCategory::warning},
                       {"C1", 12.5, "Q", AlarmCategory::warning}});
    PenaltyTable penalties;
    penalties.penalty = {{"P", 0.5}, {"Q", 0.25}};
    const FeatureBlock with = counter_features(coded_events(fx.log.alarms), "al", fx.log, fx.segments,
                                               fx.labeled, fx.rows, penalties, 10);

    EventLog no_p = fx.log;
    no_p.alarms.erase(std::remove_if(no_p.alarms.begin(), no_p.alarms.end(),
                                     [](const AlarmEvent& a) { return a.code == "P"; }),
                      no_p.alarms.end());
    const FeatureBlock without = counter_features(coded_events(no_p.alarms), "al", fx.log, fx.segments,
                                                  fx.labeled, fx.rows, penalties, 10);

    // each removed P occurrence removed (1 + 0.5) from every later counter
    CHECK(with.values(0, 1) - without.values(0, 1) == doctest::Approx(1.5));
    CHECK(with.values(1, 1) - without.values(1, 1) == doctest::Approx(3.0));
    CHECK(with.values(2, 1) - without.values(2, 1) == doctest::Approx(3.0));
}

TEST_CASE("recipe_mix_features: window 4 over recipes [A,A,B,A]") {
    EventLog log;
    log.states.push_back(fixtures::productive("C1", 8.0));
    log.states.push_back(fixtures::breakdown("C1", 9.0));
    const char* recipes[] = {"A", "A", "B", "A"};
    for (int i = 0; i < 4; ++i) {
        log.runs.push_back(fixtures::run("C1", "r" + std::to_string(i), recipes[i], 10.0 + i, 1.0));
    }
    log.states.push_back(fixtures::breakdown("C1", 14.5));
    log.sort_normalize();
    const auto segments = segment_chambers(log);
    const auto labeled = compute_ttf(log, segments);
    std::vector<std::size_t> rows(labeled.size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});

    const FeatureBlock block = recipe_mix_features(log, segments, labeled, rows, {"A", "B"}, 4);
    REQUIRE(block.names == std::vector<std::string>{"recipe_frac_A", "recipe_frac_B", "recipe_frac_other",
                                                    "recipe_changes"});
    CHECK(block.values(3, 0) == doctest::Approx(0.75));
    CHECK(block.values(3, 1) == doctest::Approx(0.25));
    CHECK(block.values(3, 3) == doctest::Approx(2.0));  // A->B and B->A

    SUBCASE("first run of segment uses a window of one") {
        CHECK(block.values(0, 0) == doctest::Approx(1.0));
        CHECK(block.values(0, 3) == 0.0);
    }
    SUBCASE("unseen recipe lands in the other bucket") {
        const FeatureBlock other = recipe_mix_features(log, segments, labeled, rows, {"A"}, 4);
        CHECK(other.values(3, 1) == doctest::Approx(0.25));  // frac_other
    }
}

TEST_CASE("recipe_mix_features: single recipe everywhere") {
    const EventLog log = fixtures::duration_chain({1.0, 1.0, 1.0});
    const auto segments = segment_chambers(log);
    const auto labeled = compute_ttf(log, segments);
    std::vector<std::size_t> rows(labeled.size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    const FeatureBlock block = recipe_mix_features(log, segments, labeled, rows, {"R1"}, 10);
    for (Eigen::Index i = 0; i < block.values.rows(); ++i) {
        CHECK(block.values(i, 0) == doctest::Approx(1.0));
        CHECK(block.values(i, 2) == 0.0);  // changes
    }
}

TEST_CASE("apcv_features: selects exactly the kept sensors that carry limits") {
    RecipeStats stats;
    stats.sensor_names = {"s00", "s04", "s09"};
    PruneReport prune;
    prune.kept = {"s00", "s04", "s09"};
    Eigen::MatrixXd m(2, 3);
    m << 1, 2, 3, 4, 5, 6;

    SUBCASE("limits on s04 and s09 select two columns") {
        const std::map<std::string, std::string> limits{{"V1", "s04"}, {"V2", "s09"}};
        const FeatureBlock block = apcv_features(m, stats, prune, limits);
        CHECK(block.names == std::vector<std::string>{"s04", "s09"});
        CHECK(block.values(1, 0) == 5.0);
    }
    SUBCASE("limit on a pruned sensor is not substituted by its correlate") {
        PruneReport pruned;
        pruned.kept = {"s00", "s09"};
        pruned.dropped = {{"s04", "s00", 1.0}};
        const std::map<std::string, std::string> limits{{"V1", "s04"}, {"V2", "s09"}};
        const FeatureBlock block = apcv_features(m, stats, pruned, limits);
        CHECK(block.names == std::vector<std::string>{"s09"});
    }
    SUBCASE("no limits at all raises EmptySelection") {
        CHECK_THROWS_AS(apcv_features(m, stats, prune, {}), EmptySelection);
    }
}

TEST_CASE("dip_features") {
    CounterFixture fx({});
    SUBCASE("no dips -> zeros") {
        const FeatureBlock block = dip_features(fx.log, fx.segments, fx.labeled, fx.rows, 10);
        CHECK(block.values.isZero(0.0));
    }
    SUBCASE("one dip of magnitude 12.5 in window") {
        EventLog log = fx.log;
        log.dips = {{"C1", 10.5, 12.5}};
        const FeatureBlock block = dip_features(log, fx.segments, fx.labeled, fx.rows, 10);
        CHECK(block.values(0, 0) == 1.0);
        CHECK(block.values(0, 1) == doctest::Approx(12.5));
        CHECK(block.values(2, 0) == 1.0);  // still inside the 10-run window
    }
    SUBCASE("two dips: count 2, max 7") {
        EventLog log = fx.log;
        log.dips = {{"C1", 10.2, 3.0}, {"C1", 11.4, 7.0}};
        const FeatureBlock block = dip_features(log, fx.segments, fx.labeled, fx.rows, 10);
        CHECK(block.values(2, 0) == 2.0);
        CHECK(block.values(2, 1) == doctest::Approx(7.0));
    }
}

TEST_CASE("feature_spec: the seven combinations match their definitions") {
    using G = FeatureGroup;
    CHECK(feature_spec("FS1").groups == std::set<G>{G::APC_V, G::APC_R});
    CHECK(feature_spec("FS2").groups == std::set<G>{G::APC_V, G::LV_P});
    CHECK(feature_spec("FS3").groups == std::set<G>{G::APC_V, G::APC_R, G::LV_P, G::AL_P});
    CHECK(feature_spec("FS4").groups == std::set<G>{G::APC_V, G::APC_R, G::LV_P, G::AL_P, G::DIPS});
    CHECK(feature_spec("FS5").groups == std::set<G>{G::APC_V, G::LV_P, G::AL_P});
    CHECK(feature_spec("FS6").groups == std::set<G>{G::LV_P, G::AL_P});
    CHECK(feature_spec("FS7").groups == std::set<G>{G::AL_P});
    CHECK_THROWS_AS(feature_spec("FS8"), InvalidConfig);
}

namespace {

/// Simulated dataset + transforms fitted on all supervised rows.
struct MaterializeFixture {
    EventLog log;
    LabeledDataset dataset;
    FittedTransforms transforms;
    std::vector<std::size_t> rows;

    MaterializeFixture() {
        SimConfig c;
        c.seed = 21;
        c.n_chambers = 2;
        c.horizon_hours = 400;
        c.mean_segment_hours = 60;
        c.mean_run_hours = 2.0;
        log = simulate(c);
        PipelineParams params;
        dataset = build_labeled_dataset(log, params);
        rows = dataset.supervised_rows();
        transforms = FittedTransforms::fit(log, dataset, rows, params);
    }

    FeatureMatrix make(const std::string& name) const {
        return transforms.features(feature_spec(name), log, dataset, rows);
    }
};

std::set<std::string> name_set(const FeatureMatrix& m) {
    return {m.names.begin(), m.names.end()};
}

}  // namespace

TEST_CASE("materialize: group composition algebra of FS1..FS7") {
    const MaterializeFixture fx;
    const auto fs1 = fx.make("FS1");
    const auto fs3 = fx.make("FS3");
    const auto fs4 = fx.make("FS4");
    const auto fs5 = fx.make("FS5");
    const auto fs6 = fx.make("FS6");
    const auto fs7 = fx.make("FS7");

    SUBCASE("FS7 carries only alarm-counter columns") {
        for (const auto g : fs7.provenance) CHECK(g == FeatureGroup::AL_P);
        CHECK(fs7.names == std::vector<std::string>{"al_counter", "al_weighted", "al_grad_sum", "al_grad_max"});
    }
    SUBCASE("FS4 is FS3 plus only DIPS columns") {
        auto s3 = name_set(fs3), s4 = name_set(fs4);
        for (const auto& n : s3) CHECK(s4.count(n));
        std::set<std::string> extra;
        for (const auto& n : s4) {
            if (!s3.count(n)) extra.insert(n);
        }
        CHECK(extra == std::set<std::string>{"dip_count", "dip_max_magnitude"});
    }
    SUBCASE("FS1 has no alarm or violation columns") {
        for (const auto g : fs1.provenance) {
            CHECK(g != FeatureGroup::AL_P);
            CHECK(g != FeatureGroup::LV_P);
        }
    }
    SUBCASE("FS3 = FS5 + APC_R columns and FS5 = FS6 + APC_V columns") {
        auto s3 = name_set(fs3), s5 = name_set(fs5), s6 = name_set(fs6);
        std::set<std::string> apcr, apcv;
        for (std::size_t j = 0; j < fs3.names.size(); ++j) {
            if (fs3.provenance[j] == FeatureGroup::APC_R) apcr.insert(fs3.names[j]);
        }
        for (std::size_t j = 0; j < fs5.names.size(); ++j) {
            if (fs5.provenance[j] == FeatureGroup::APC_V) apcv.insert(fs5.names[j]);
        }
        std::set<std::string> expect3 = s5;
        expect3.insert(apcr.begin(), apcr.end());
        CHECK(s3 == expect3);
        std::set<std::string> expect5 = s6;
        expect5.insert(apcv.begin(), apcv.end());
        CHECK(s5 == expect5);
    }
    SUBCASE("matrices carry no NaN and align with the requested rows") {
        CHECK(fs4.values.allFinite());
        CHECK(static_cast<std::size_t>(fs4.values.rows()) == fx.rows.size());
    }
}

TEST_CASE("materialize: no look-ahead, truncating the log preserves earlier rows") {
    const MaterializeFixture fx;

    // Truncate at the end of some complete segment so labels are unchanged
    // for everything before it.
    double cut = 0.0;
    std::string cut_chamber;
    for (const auto& seg : fx.dataset.segments) {
        if (!seg.censored && seg.breakdown_time.has_value()) {
            cut = *seg.breakdown_time + 0.5;
            cut_chamber = seg.chamber_id;
        }
    }
    REQUIRE(cut > 0.0);

    EventLog truncated;
    for (const auto& r : fx.log.runs) {
        if (r.end() <= cut) truncated.runs.push_back(r);
    }
    for (const auto& a : fx.log.alarms) {
        if (a.time <= cut) truncated.alarms.push_back(a);
    }
    for (const auto& v : fx.log.violations) {
        if (v.time <= cut) truncated.violations.push_back(v);
    }
    for (const auto& s : fx.log.states) {
        if (s.time <= cut) truncated.states.push_back(s);
    }
    for (const auto& d : fx.log.dips) {
        if (d.time <= cut) truncated.dips.push_back(d);
    }
    truncated.sort_normalize();

    PipelineParams params;
    const LabeledDataset tr_dataset = build_labeled_dataset(truncated, params);
    const auto tr_rows = tr_dataset.supervised_rows();
    const FittedTransforms tr_transforms = FittedTransforms::fit(truncated, tr_dataset, tr_rows, params);

    // Feature values must agree run by run wherever both datasets carry the
    // run, using the SAME fitted transforms (fitted on the truncated data).
    const FeatureMatrix full = tr_transforms.features(feature_spec("FS4"), fx.log, fx.dataset, fx.rows);
    const FeatureMatrix trunc = tr_transforms.features(feature_spec("FS4"), truncated, tr_dataset, tr_rows);

    std::map<std::string, Eigen::Index> full_row_of;
    for (std::size_t i = 0; i < fx.rows.size(); ++i) {
        full_row_of[fx.log.runs[fx.dataset.labeled[fx.rows[i]].run_index].run_id] =
            static_cast<Eigen::Index>(i);
    }
    REQUIRE(full.names == trunc.names);
    int compared = 0;
    for (std::size_t i = 0; i < tr_rows.size(); ++i) {
        const std::string& run_id = truncated.runs[tr_dataset.labeled[tr_rows[i]].run_index].run_id;
        const auto it = full_row_of.find(run_id);
        if (it == full_row_of.end()) continue;
        for (Eigen::Index j = 0; j < full.values.cols(); ++j) {
            CHECK(trunc.values(static_cast<Eigen::Index>(i), j) == full.values(it->second, j));
        }
        ++compared;
    }
    CHECK(compared > 100);
}
