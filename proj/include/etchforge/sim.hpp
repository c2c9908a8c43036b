#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "etchforge/events.hpp"

namespace etchforge {

/// Knobs of the synthetic plant. Identical configs produce bit-identical
/// event logs.
struct SimConfig {
    std::uint64_t seed = 42;
    int n_chambers = 4;
    double horizon_hours = 6000.0;
    int n_recipes = 4;
    int n_sensors = 30;
    int n_alarm_codes = 12;
    int n_violation_codes = 6;
    double mean_segment_hours = 400.0;
    double hazard_steepness = 14.0;
    double duplicate_sensor_fraction = 0.2;

    // Shape knobs; defaults give desk-scale logs with enough segments for
    // cross-validated evaluation.
    double mean_run_hours = 5.0;
    double short_segment_fraction = 0.05;  // segments cut below 5 productive hours

    void check() const;  // throws InvalidConfig
};

/// Latent generator state, exposed for verification only. Pipeline code must
/// never consume this.
struct PlantedTruth {
    std::vector<int> informative_sensors;            // drift follows wear
    std::vector<int> noise_sensors;                  // no wear signal
    std::vector<std::pair<int, int>> duplicate_pairs;  // (duplicate, source), source < duplicate
    std::map<std::string, double> alarm_hazard_weights;      // 0 for background codes
    std::map<std::string, double> violation_hazard_weights;  // 0 for background codes
    std::map<std::string, std::string> violation_sensor;     // code -> sensor under the limit
};

std::string sensor_name(int index, int n_sensors);

/// Generates the five event streams for all chambers over the horizon.
EventLog simulate(const SimConfig& config);

PlantedTruth planted_truth(const SimConfig& config);

}  // namespace etchforge
