#include "etchforge/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "etchforge/errors.hpp"
#include "etchforge/rng.hpp"

namespace etchforge {
namespace {

constexpr std::uint64_t kPlantSalt = 0x706c616e74ULL;    // structure stream
constexpr std::uint64_t kChamberSalt = 0x6368616dULL;    // one dynamics stream per chamber

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::string padded(const char* prefix, int value, int width) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%0*d", prefix, width, value);
    return buf;
}

int id_width(int n) { return std::max(2, static_cast<int>(std::to_string(std::max(n - 1, 1)).size())); }

/// Everything structural about the plant: sensor roles, recipe baselines and
/// per-code hazard parameters. Derived from the seed alone so that
/// planted_truth() can reproduce it without running the dynamics.
struct Plant {
    struct AlarmCode {
        std::string code;
        AlarmCategory category;
        double weight = 0.0;     // 0 => background code
        double threshold = 0.0;  // wear level where the hazard turns on
        double background = 0.0; // per-run probability for background codes
    };
    struct ViolationCode {
        std::string code;
        ViolationSeverity severity;
        std::string sensor;
        double weight = 0.0;
        double threshold = 0.0;
        double background = 0.0;
    };

    std::vector<int> dup_indices;          // ascending
    std::vector<int> dup_sources;          // same length; source < duplicate
    std::vector<int> informative;          // ascending, disjoint from noise
    std::vector<int> noise;                // ascending
    std::vector<double> noise_sd;          // per sensor
    std::vector<double> drift;             // per sensor, 0 unless informative
    std::vector<std::vector<double>> baseline;  // [recipe][sensor]
    std::vector<std::vector<bool>> used;        // [recipe][sensor]
    std::vector<double> recipe_duration_factor;
    std::vector<AlarmCode> alarm_codes;
    std::vector<ViolationCode> violation_codes;
};

Plant build_plant(const SimConfig& cfg) {
    Rng rng(mix_seed(cfg.seed ^ kPlantSalt));
    Plant plant;
    const int n = cfg.n_sensors;

    int n_dup = static_cast<int>(std::llround(cfg.duplicate_sensor_fraction * n));
    n_dup = std::clamp(n_dup, 0, n - 1);

    // Duplicates are drawn from indices >= 1 so every duplicate has at least
    // one base column before it to copy from.
    if (n_dup > 0) {
        auto picks = rng.sample_without_replacement(n - 1, n_dup);
        for (int p : picks) plant.dup_indices.push_back(p + 1);
    }
    std::vector<bool> is_dup(n, false);
    for (int d : plant.dup_indices) is_dup[d] = true;

    std::vector<int> base;
    for (int j = 0; j < n; ++j) {
        if (!is_dup[j]) base.push_back(j);
    }

    std::vector<bool> is_informative(n, false);
    for (int j : base) is_informative[j] = rng.bernoulli(0.4);
    if (base.size() >= 2) {
        const bool any_inf = std::any_of(base.begin(), base.end(), [&](int j) { return is_informative[j]; });
        const bool any_noise = std::any_of(base.begin(), base.end(), [&](int j) { return !is_informative[j]; });
        if (!any_inf) is_informative[base.front()] = true;
        if (!any_noise) is_informative[base.back()] = false;
    }
    for (int j : base) (is_informative[j] ? plant.informative : plant.noise).push_back(j);

    plant.noise_sd.resize(n);
    plant.drift.assign(n, 0.0);
    std::vector<double> center(n);
    for (int j = 0; j < n; ++j) {
        plant.noise_sd[j] = rng.uniform(0.5, 1.5);
        center[j] = rng.uniform(-3.0, 3.0);
    }
    for (int j : plant.informative) {
        const double magnitude = rng.uniform(2.5, 4.0) * plant.noise_sd[j];
        plant.drift[j] = rng.bernoulli(0.5) ? magnitude : -magnitude;
    }

    for (int d : plant.dup_indices) {
        std::vector<int> candidates;
        for (int j : base) {
            if (j < d) candidates.push_back(j);
        }
        plant.dup_sources.push_back(candidates[rng.below(candidates.size())]);
    }

    plant.baseline.assign(cfg.n_recipes, std::vector<double>(n, 0.0));
    plant.used.assign(cfg.n_recipes, std::vector<bool>(n, true));
    for (int r = 0; r < cfg.n_recipes; ++r) {
        for (int j = 0; j < n; ++j) {
            plant.baseline[r][j] = center[j] + rng.normal(0.0, 1.5);
            plant.used[r][j] = rng.bernoulli(0.88);
        }
    }
    plant.recipe_duration_factor.resize(cfg.n_recipes);
    for (int r = 0; r < cfg.n_recipes; ++r) plant.recipe_duration_factor[r] = rng.uniform(0.8, 1.25);

    // Alarm codes. Degradation codes get logistic hazards whose thresholds
    // are spread over the wear range, so some codes fire early in a
    // segment's life and some only right before breakdown.
    const int aw = id_width(cfg.n_alarm_codes + 100);
    std::vector<bool> alarm_deg(cfg.n_alarm_codes);
    for (int i = 0; i < cfg.n_alarm_codes; ++i) alarm_deg[i] = rng.bernoulli(0.7);
    if (cfg.n_alarm_codes >= 2) {
        if (std::none_of(alarm_deg.begin(), alarm_deg.end(), [](bool b) { return b; })) alarm_deg[0] = true;
        if (std::all_of(alarm_deg.begin(), alarm_deg.end(), [](bool b) { return b; })) alarm_deg.back() = false;
    }
    const int n_alarm_deg = static_cast<int>(std::count(alarm_deg.begin(), alarm_deg.end(), true));
    static constexpr AlarmCategory kCategories[] = {AlarmCategory::warning, AlarmCategory::information,
                                                    AlarmCategory::critical, AlarmCategory::error,
                                                    AlarmCategory::other};
    int deg_rank = 0;
    for (int i = 0; i < cfg.n_alarm_codes; ++i) {
        Plant::AlarmCode code;
        code.code = padded("A", 100 + i, aw);
        code.category = kCategories[rng.below(5)];
        if (alarm_deg[i]) {
            const double frac = n_alarm_deg > 1 ? static_cast<double>(deg_rank) / (n_alarm_deg - 1) : 0.75;
            code.threshold = std::clamp(0.30 + 0.65 * frac + rng.uniform(-0.03, 0.03), 0.25, 0.97);
            code.weight = rng.uniform(0.25, 0.55);
            ++deg_rank;
        } else {
            code.background = rng.uniform(0.004, 0.02);
        }
        plant.alarm_codes.push_back(std::move(code));
    }

    // Limit violations target specific sensors, mostly the informative ones
    // (experts define limits on parameters that matter).
    const int vw = id_width(cfg.n_violation_codes + 1);
    std::vector<bool> viol_deg(cfg.n_violation_codes);
    for (int i = 0; i < cfg.n_violation_codes; ++i) viol_deg[i] = rng.bernoulli(0.8);
    if (std::none_of(viol_deg.begin(), viol_deg.end(), [](bool b) { return b; })) viol_deg[0] = true;
    const int n_viol_deg = static_cast<int>(std::count(viol_deg.begin(), viol_deg.end(), true));
    deg_rank = 0;
    for (int i = 0; i < cfg.n_violation_codes; ++i) {
        Plant::ViolationCode code;
        code.code = padded("V", 1 + i, vw);
        code.severity = rng.bernoulli(0.6) ? ViolationSeverity::error : ViolationSeverity::information;
        const std::vector<int>& pool =
            (!plant.informative.empty() && (plant.noise.empty() || rng.bernoulli(0.8))) ? plant.informative
                                                                                        : plant.noise;
        code.sensor = sensor_name(pool[rng.below(pool.size())], n);
        if (viol_deg[i]) {
            const double frac = n_viol_deg > 1 ? static_cast<double>(deg_rank) / (n_viol_deg - 1) : 0.7;
            code.threshold = std::clamp(0.20 + 0.72 * frac + rng.uniform(-0.03, 0.03), 0.15, 0.95);
            code.weight = rng.uniform(0.3, 0.7);
            ++deg_rank;
        } else {
            code.background = rng.uniform(0.002, 0.01);
        }
        plant.violation_codes.push_back(std::move(code));
    }

    return plant;
}

}  // namespace

void SimConfig::check() const {
    if (n_chambers < 1 || n_recipes < 1 || n_sensors < 1 || n_alarm_codes < 1 || n_violation_codes < 1) {
        throw InvalidConfig("all counts must be >= 1");
    }
    if (horizon_hours <= 0.0) throw InvalidConfig("horizon_hours must be > 0");
    if (mean_segment_hours <= 0.0) throw InvalidConfig("mean_segment_hours must be > 0");
    if (mean_run_hours <= 0.0) throw InvalidConfig("mean_run_hours must be > 0");
    if (hazard_steepness <= 0.0) throw InvalidConfig("hazard_steepness must be > 0");
    if (duplicate_sensor_fraction < 0.0 || duplicate_sensor_fraction > 1.0) {
        throw InvalidConfig("duplicate_sensor_fraction must lie in [0,1]");
    }
    if (short_segment_fraction < 0.0 || short_segment_fraction > 1.0) {
        throw InvalidConfig("short_segment_fraction must lie in [0,1]");
    }
}

std::string sensor_name(int index, int n_sensors) {
    return padded("s", index, id_width(n_sensors));
}

EventLog simulate(const SimConfig& cfg) {
    cfg.check();
    const Plant plant = build_plant(cfg);
    EventLog log;

    const double lognorm_sigma = 0.45;
    const int cw = id_width(cfg.n_chambers + 1);

    for (int c = 0; c < cfg.n_chambers; ++c) {
        Rng rng(mix_seed(cfg.seed ^ kChamberSalt) ^ mix_seed(static_cast<std::uint64_t>(c) + 1));
        const std::string chamber = padded("C", c + 1, cw);
        int run_counter = 0;

        log.states.push_back({chamber, 0.0, MachineState::standby});
        double t = 0.0;
        bool horizon_reached = false;

        while (!horizon_reached) {
            // New productive segment.
            // Equipment-start artifacts: a few aborted runs followed by an
            // immediate shutdown, well under the cleaning threshold.
            const bool short_segment = rng.bernoulli(cfg.short_segment_fraction);
            const double short_run_hours = 0.6;
            const double target_hours = short_segment
                                            ? rng.uniform(0.5, 3.0)
                                            : cfg.mean_segment_hours *
                                                  rng.lognormal(-0.5 * lognorm_sigma * lognorm_sigma, lognorm_sigma);
            const double expected_runs =
                std::max(target_hours / (short_segment ? short_run_hours : cfg.mean_run_hours), 2.0);
            const double mean_increment = 1.0 / expected_runs;

            double wear = 0.0;
            int recipe = static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.n_recipes)));
            double run_start = t + rng.uniform(0.5, 2.0);
            bool first_run = true;

            while (true) {
                const double duration =
                    short_segment
                        ? short_run_hours * rng.uniform(0.5, 1.5)
                        : cfg.mean_run_hours * plant.recipe_duration_factor[recipe] * rng.uniform(0.85, 1.15);
                if (run_start + duration > cfg.horizon_hours) {
                    horizon_reached = true;
                    break;
                }
                if (first_run) {
                    log.states.push_back({chamber, run_start, MachineState::productive});
                    first_run = false;
                }

                wear += rng.erlang(4, mean_increment);
                const double run_end = run_start + duration;

                Run run;
                run.chamber_id = chamber;
                run.run_id = chamber + "-r" + padded("", run_counter++, 6);
                run.recipe_id = padded("R", recipe + 1, id_width(cfg.n_recipes + 1));
                run.start = run_start;
                run.duration = duration;

                // Base sensor columns first, duplicates copied afterwards so a
                // duplicate always mirrors a column that precedes it.
                std::vector<std::optional<double>> cells(cfg.n_sensors);
                std::vector<bool> is_dup(cfg.n_sensors, false);
                for (std::size_t k = 0; k < plant.dup_indices.size(); ++k) is_dup[plant.dup_indices[k]] = true;
                for (int j = 0; j < cfg.n_sensors; ++j) {
                    if (is_dup[j]) continue;
                    if (!plant.used[recipe][j] || rng.bernoulli(0.02)) {
                        cells[j] = std::nullopt;
                        continue;
                    }
                    cells[j] = plant.baseline[recipe][j] + plant.drift[j] * std::min(wear, 1.2) +
                               plant.noise_sd[j] * rng.normal();
                }
                for (std::size_t k = 0; k < plant.dup_indices.size(); ++k) {
                    cells[plant.dup_indices[k]] = cells[plant.dup_sources[k]];
                }
                for (int j = 0; j < cfg.n_sensors; ++j) run.sensors[sensor_name(j, cfg.n_sensors)] = cells[j];
                log.runs.push_back(std::move(run));

                for (const auto& code : plant.alarm_codes) {
                    const double p = code.weight > 0.0
                                         ? code.weight * sigmoid(cfg.hazard_steepness * (wear - code.threshold))
                                         : code.background;
                    if (rng.bernoulli(p)) {
                        log.alarms.push_back({chamber, rng.uniform(run_start, run_end), code.code, code.category});
                    }
                }
                for (const auto& code : plant.violation_codes) {
                    const double p = code.weight > 0.0
                                         ? code.weight * sigmoid(cfg.hazard_steepness * (wear - code.threshold))
                                         : code.background;
                    if (rng.bernoulli(p)) {
                        log.violations.push_back(
                            {chamber, rng.uniform(run_start, run_end), code.code, code.severity, code.sensor});
                    }
                }
                if (rng.bernoulli(0.004 + 0.012 * std::min(wear, 1.0))) {
                    log.dips.push_back(
                        {chamber, rng.uniform(run_start, run_end), 5.0 + std::abs(rng.normal()) * 8.0});
                }

                if (rng.bernoulli(0.15)) recipe = static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.n_recipes)));

                if (wear >= 1.0) {
                    // Breakdown closes the segment; repair returns the chamber
                    // to standby before the next one starts.
                    const double bd = run_end + 0.02;
                    if (bd > cfg.horizon_hours) {
                        horizon_reached = true;
                        break;
                    }
                    log.states.push_back({chamber, bd, MachineState::breakdown});
                    const double maint = bd + 0.3;
                    const double standby = maint + rng.uniform(3.0, 10.0);
                    if (maint <= cfg.horizon_hours) log.states.push_back({chamber, maint, MachineState::maintenance});
                    if (standby <= cfg.horizon_hours) {
                        log.states.push_back({chamber, standby, MachineState::standby});
                        t = standby;
                    } else {
                        horizon_reached = true;
                    }
                    break;
                }

                run_start = run_end + rng.uniform(0.02, 0.1) * cfg.mean_run_hours;
            }
        }
    }

    log.sort_normalize();
    return log;
}

PlantedTruth planted_truth(const SimConfig& cfg) {
    cfg.check();
    const Plant plant = build_plant(cfg);
    PlantedTruth truth;
    truth.informative_sensors = plant.informative;
    truth.noise_sensors = plant.noise;
    for (std::size_t k = 0; k < plant.dup_indices.size(); ++k) {
        truth.duplicate_pairs.emplace_back(plant.dup_indices[k], plant.dup_sources[k]);
    }
    for (const auto& code : plant.alarm_codes) truth.alarm_hazard_weights[code.code] = code.weight;
    for (const auto& code : plant.violation_codes) {
        truth.violation_hazard_weights[code.code] = code.weight;
        truth.violation_sensor[code.code] = code.sensor;
    }
    return truth;
}

}  // namespace etchforge
