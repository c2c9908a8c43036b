#pragma once

#include <Eigen/Core>
#include <map>
#include <string>
#include <vector>

#include "etchforge/events.hpp"

namespace etchforge {

struct SensorStats {
    double mean = 0.0;
    double stddev = 0.0;  // sample (n-1) standard deviation; 0 for a single observation
    int count = 0;
};

/// Per-(recipe, sensor) standardization statistics. Fit on training rows
/// only; transforming never updates them.
struct RecipeStats {
    std::map<std::string, std::map<std::string, SensorStats>> by_recipe;
    std::vector<std::string> sensor_names;  // sorted union over training runs

    bool has_recipe(const std::string& recipe) const { return by_recipe.count(recipe) > 0; }
};

/// Fits mean/std per (recipe, sensor) pair from non-null values of the
/// selected rows.
RecipeStats fit_recipe_stats(const std::vector<Run>& runs, const std::vector<std::size_t>& rows);
RecipeStats fit_recipe_stats(const std::vector<Run>& runs);

/// Returns the rows x sensor matrix of standardized values: (x-mean)/std per
/// the run's recipe, 0 where std is 0, and 0 for missing values (imputed at
/// the recipe mean). Throws UnknownRecipe for recipes absent from the stats.
Eigen::MatrixXd standardize(const std::vector<Run>& runs, const std::vector<std::size_t>& rows,
                            const RecipeStats& stats);
Eigen::MatrixXd standardize(const std::vector<Run>& runs, const RecipeStats& stats);

struct DroppedColumn {
    std::string dropped;
    std::string kept_correlate;
    double abs_correlation = 0.0;
};

struct PruneReport {
    std::vector<std::string> kept;  // original column order
    std::vector<DroppedColumn> dropped;
    std::vector<std::string> zero_variance;  // kept but flagged; correlation undefined
    double threshold = 0.95;
};

/// Greedy first-kept-wins scan in column order: a column is dropped iff its
/// absolute Pearson correlation with an already-kept column reaches the
/// threshold. Deterministic for a fixed column order.
PruneReport prune_correlated(const Eigen::MatrixXd& matrix, const std::vector<std::string>& names,
                             double threshold = 0.95);

/// Fraction of missing sensor cells over rows x (union of sensor names).
double missing_rate(const std::vector<Run>& runs);

}  // namespace etchforge
