#include "etchforge/preprocess.hpp"

#include <cmath>
#include <numeric>
#include <set>

#include "etchforge/errors.hpp"

namespace etchforge {
namespace {

std::vector<std::size_t> all_rows(std::size_t n) {
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return rows;
}

}  // namespace

RecipeStats fit_recipe_stats(const std::vector<Run>& runs, const std::vector<std::size_t>& rows) {
    if (rows.empty()) throw InvalidConfig("fit_recipe_stats needs at least one run");

    // Two-pass mean/variance keeps the arithmetic simple and exact enough for
    // the 1e-9 standardization contract.
    std::map<std::string, std::map<std::string, std::vector<double>>> values;
    std::set<std::string> sensors;
    for (std::size_t i : rows) {
        const Run& r = runs.at(i);
        for (const auto& [name, value] : r.sensors) {
            sensors.insert(name);
            if (value.has_value()) values[r.recipe_id][name].push_back(*value);
        }
    }

    RecipeStats stats;
    stats.sensor_names.assign(sensors.begin(), sensors.end());
    for (std::size_t i : rows) stats.by_recipe.try_emplace(runs.at(i).recipe_id);  // recipes with all-null rows still count as seen
    for (const auto& [recipe, per_sensor] : values) {
        for (const auto& [sensor, xs] : per_sensor) {
            SensorStats s;
            s.count = static_cast<int>(xs.size());
            const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
            s.mean = mean;
            if (xs.size() > 1) {
                double ss = 0.0;
                for (double x : xs) ss += (x - mean) * (x - mean);
                s.stddev = std::sqrt(ss / (xs.size() - 1));
            }
            stats.by_recipe[recipe][sensor] = s;
        }
    }
    return stats;
}

RecipeStats fit_recipe_stats(const std::vector<Run>& runs) {
    return fit_recipe_stats(runs, all_rows(runs.size()));
}

Eigen::MatrixXd standardize(const std::vector<Run>& runs, const std::vector<std::size_t>& rows,
                            const RecipeStats& stats) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()),
                                              static_cast<Eigen::Index>(stats.sensor_names.size()));
    for (Eigen::Index out = 0; out < m.rows(); ++out) {
        const Run& r = runs.at(rows[static_cast<std::size_t>(out)]);
        const auto recipe_it = stats.by_recipe.find(r.recipe_id);
        if (recipe_it == stats.by_recipe.end()) throw UnknownRecipe(r.recipe_id);
        const auto& per_sensor = recipe_it->second;
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const std::string& sensor = stats.sensor_names[static_cast<std::size_t>(j)];
            const auto cell = r.sensors.find(sensor);
            if (cell == r.sensors.end() || !cell->second.has_value()) continue;  // missing -> 0
            const auto stat_it = per_sensor.find(sensor);
            if (stat_it == per_sensor.end()) continue;  // never observed in training -> treat as missing
            const SensorStats& s = stat_it->second;
            m(out, j) = s.stddev > 0.0 ? (*cell->second - s.mean) / s.stddev : 0.0;
        }
    }
    return m;
}

Eigen::MatrixXd standardize(const std::vector<Run>& runs, const RecipeStats& stats) {
    return standardize(runs, all_rows(runs.size()), stats);
}

PruneReport prune_correlated(const Eigen::MatrixXd& matrix, const std::vector<std::string>& names,
                             double threshold) {
    if (static_cast<std::size_t>(matrix.cols()) != names.size()) {
        throw InvalidConfig("prune_correlated: name count does not match column count");
    }
    if (threshold <= 0.0 || threshold > 1.0) throw InvalidConfig("correlation threshold must lie in (0,1]");

    PruneReport report;
    report.threshold = threshold;

    const Eigen::Index n = matrix.rows();
    const Eigen::MatrixXd centered = matrix.rowwise() - matrix.colwise().mean();
    const Eigen::VectorXd norms = centered.colwise().norm();

    std::vector<Eigen::Index> kept_idx;
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
        if (n < 2 || norms(j) == 0.0) {
            // Correlation against a constant column is undefined; keep and flag.
            report.zero_variance.push_back(names[static_cast<std::size_t>(j)]);
            report.kept.push_back(names[static_cast<std::size_t>(j)]);
            kept_idx.push_back(j);
            continue;
        }
        bool dropped = false;
        for (Eigen::Index k : kept_idx) {
            if (norms(k) == 0.0) continue;  // treated as correlation 0
            const double rho = centered.col(j).dot(centered.col(k)) / (norms(j) * norms(k));
            if (std::abs(rho) >= threshold) {
                report.dropped.push_back(
                    {names[static_cast<std::size_t>(j)], names[static_cast<std::size_t>(k)], std::abs(rho)});
                dropped = true;
                break;
            }
        }
        if (!dropped) {
            report.kept.push_back(names[static_cast<std::size_t>(j)]);
            kept_idx.push_back(j);
        }
    }
    return report;
}

double missing_rate(const std::vector<Run>& runs) {
    std::set<std::string> sensors;
    for (const auto& r : runs) {
        for (const auto& [name, _] : r.sensors) sensors.insert(name);
    }
    const std::size_t cells = runs.size() * sensors.size();
    if (cells == 0) return 0.0;

    std::size_t missing = 0;
    for (const auto& r : runs) {
        for (const auto& name : sensors) {
            const auto it = r.sensors.find(name);
            if (it == r.sensors.end() || !it->second.has_value()) ++missing;
        }
    }
    return static_cast<double>(missing) / static_cast<double>(cells);
}

}  // namespace etchforge
