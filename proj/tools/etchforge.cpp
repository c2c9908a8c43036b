// etchforge: stage-wise predictive-maintenance pipeline for plasma-etch
// event logs. Subcommands cover the whole chain: simulate -> validate ->
// label -> features/penalties -> train -> evaluate. Every stage writes a
// manifest with input hashes so downstream stages refuse stale artifacts.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "etchforge/artifacts.hpp"
#include "etchforge/errors.hpp"
#include "etchforge/evalbench.hpp"
#include "etchforge/ingest.hpp"
#include "etchforge/models.hpp"
#include "etchforge/pipeline.hpp"
#include "etchforge/sim.hpp"

namespace {

using nlohmann::json;
namespace ef = etchforge;
namespace fs = std::filesystem;

constexpr const char* kToolVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// ---------------------------------------------------------------------------
// configuration file

struct CliConfig {
    ef::SimConfig sim;
    ef::PipelineParams pipeline;
    std::vector<std::string> productive_recipes;  // empty = keep every recipe

    int k_folds = 4;
    std::uint64_t eval_seed = 0;
    std::string task = "ttf_regression";
    // default grid keeps the full chain under a minute at the default
    // simulator scale; list all seven sets in a config file for the full sweep
    std::vector<std::string> feature_sets = {"FS1", "FS3", "FS6", "FS7"};
    std::vector<double> eval_bounds;             // empty = pipeline interval bounds
    std::vector<ef::models::Spec> model_specs;   // empty = task defaults
};

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, _] : j.items()) {
        if (!allowed.count(key)) throw ef::InvalidConfig("unknown config key '" + where + key + "'");
    }
}

ef::models::Spec parse_model_spec(const json& j) {
    reject_unknown(j, {"family", "seed", "hyper"}, "models[].");
    ef::models::Spec spec;
    spec.family = ef::models::family_from_string(j.at("family").get<std::string>());
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("hyper")) spec.hyper = j.at("hyper").get<std::map<std::string, double>>();
    return spec;
}

CliConfig load_config(const std::string& path) {
    CliConfig config;
    if (path.empty()) return config;

    std::ifstream in(path);
    if (!in) throw ef::MissingFile(path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ef::InvalidConfig(std::string("config: ") + e.what());
    }

    reject_unknown(j, {"sim", "labeling", "preprocess", "features", "models", "evaluation"}, "");

    if (j.contains("sim")) {
        const json& s = j["sim"];
        reject_unknown(s,
                       {"seed", "n_chambers", "horizon_hours", "n_recipes", "n_sensors", "n_alarm_codes",
                        "n_violation_codes", "mean_segment_hours", "hazard_steepness",
                        "duplicate_sensor_fraction", "mean_run_hours", "short_segment_fraction"},
                       "sim.");
        auto get = [&](const char* key, auto& into) {
            if (s.contains(key)) into = s.at(key).get<std::decay_t<decltype(into)>>();
        };
        get("seed", config.sim.seed);
        get("n_chambers", config.sim.n_chambers);
        get("horizon_hours", config.sim.horizon_hours);
        get("n_recipes", config.sim.n_recipes);
        get("n_sensors", config.sim.n_sensors);
        get("n_alarm_codes", config.sim.n_alarm_codes);
        get("n_violation_codes", config.sim.n_violation_codes);
        get("mean_segment_hours", config.sim.mean_segment_hours);
        get("hazard_steepness", config.sim.hazard_steepness);
        get("duplicate_sensor_fraction", config.sim.duplicate_sensor_fraction);
        get("mean_run_hours", config.sim.mean_run_hours);
        get("short_segment_fraction", config.sim.short_segment_fraction);
    }
    if (j.contains("labeling")) {
        const json& s = j["labeling"];
        reject_unknown(s, {"min_segment_hours", "interval_bounds"}, "labeling.");
        if (s.contains("min_segment_hours")) config.pipeline.min_segment_hours = s.at("min_segment_hours");
        if (s.contains("interval_bounds")) {
            config.pipeline.interval_bounds = s.at("interval_bounds").get<std::vector<double>>();
        }
    }
    if (j.contains("preprocess")) {
        const json& s = j["preprocess"];
        reject_unknown(s, {"correlation_threshold", "productive_recipes"}, "preprocess.");
        if (s.contains("correlation_threshold")) {
            config.pipeline.correlation_threshold = s.at("correlation_threshold");
        }
        if (s.contains("productive_recipes")) {
            config.productive_recipes = s.at("productive_recipes").get<std::vector<std::string>>();
        }
    }
    if (j.contains("features")) {
        const json& s = j["features"];
        reject_unknown(s, {"window_runs", "penalty_epsilon_hours"}, "features.");
        if (s.contains("window_runs")) config.pipeline.window_runs = s.at("window_runs");
        if (s.contains("penalty_epsilon_hours")) {
            config.pipeline.penalty_epsilon_hours = s.at("penalty_epsilon_hours");
        }
    }
    if (j.contains("models")) {
        for (const auto& m : j["models"]) config.model_specs.push_back(parse_model_spec(m));
    }
    if (j.contains("evaluation")) {
        const json& s = j["evaluation"];
        reject_unknown(s, {"k_folds", "seed", "task", "feature_sets", "bounds"}, "evaluation.");
        if (s.contains("k_folds")) config.k_folds = s.at("k_folds");
        if (s.contains("seed")) config.eval_seed = s.at("seed");
        if (s.contains("task")) config.task = s.at("task");
        if (s.contains("feature_sets")) config.feature_sets = s.at("feature_sets").get<std::vector<std::string>>();
        if (s.contains("bounds")) config.eval_bounds = s.at("bounds").get<std::vector<double>>();
    }
    return config;
}

std::vector<ef::models::Spec> default_model_grid(ef::TaskKind task) {
    using F = ef::models::Family;
    std::vector<F> families = task == ef::TaskKind::interval_classification
                                  ? std::vector<F>{F::sgd_svm, F::tree, F::rf, F::mlp, F::gbc, F::knn}
                                  : std::vector<F>{F::lr, F::sgd_svm, F::tree, F::rf, F::mlp};
    std::vector<ef::models::Spec> specs;
    for (F f : families) {
        ef::models::Spec spec;
        spec.family = f;
        specs.push_back(spec);
    }
    return specs;
}

// ---------------------------------------------------------------------------
// manifests

json sim_config_json(const ef::SimConfig& c) {
    return {{"seed", c.seed},
            {"n_chambers", c.n_chambers},
            {"horizon_hours", c.horizon_hours},
            {"n_recipes", c.n_recipes},
            {"n_sensors", c.n_sensors},
            {"n_alarm_codes", c.n_alarm_codes},
            {"n_violation_codes", c.n_violation_codes},
            {"mean_segment_hours", c.mean_segment_hours},
            {"hazard_steepness", c.hazard_steepness},
            {"duplicate_sensor_fraction", c.duplicate_sensor_fraction},
            {"mean_run_hours", c.mean_run_hours},
            {"short_segment_fraction", c.short_segment_fraction}};
}

json pipeline_params_json(const ef::PipelineParams& p) {
    return {{"min_segment_hours", p.min_segment_hours},
            {"interval_bounds", p.interval_bounds},
            {"correlation_threshold", p.correlation_threshold},
            {"penalty_epsilon_hours", p.penalty_epsilon_hours},
            {"window_runs", p.window_runs}};
}

const std::vector<std::string> kStreamFiles = {"runs.jsonl", "alarms.jsonl", "violations.jsonl",
                                               "states.jsonl", "dips.jsonl"};

json hash_streams(const std::filesystem::path& dir) {
    json hashes = json::object();
    for (const auto& name : kStreamFiles) {
        if (std::filesystem::exists(dir / name)) hashes[name] = ef::hash_file(dir / name);
    }
    return hashes;
}

void write_manifest(const std::filesystem::path& dir, const std::string& stage, const json& config,
                    const json& inputs, const json& outputs) {
    json manifest{{"stage", stage},
                  {"version", kToolVersion},
                  {"config", config},
                  {"inputs", inputs},
                  {"outputs", outputs}};
    std::ofstream out(dir / (stage + ".manifest.json"), std::ios::trunc);
    if (!out) throw ef::Error("cannot write manifest in " + dir.string());
    out << manifest.dump(2) << '\n';
}

/// Compares the raw-stream hashes recorded by the label stage against the
/// current --in directory. Upstream drift is a hard error.
void check_upstream(const std::filesystem::path& labeled_dir, const std::filesystem::path& in_dir) {
    const auto manifest_path = labeled_dir / "label.manifest.json";
    if (!std::filesystem::exists(manifest_path)) return;  // hand-built artifacts are allowed
    std::ifstream in(manifest_path);
    json manifest;
    try {
        manifest = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ef::Error(std::string("unreadable manifest: ") + e.what());
    }
    const json current = hash_streams(in_dir);
    if (manifest.contains("inputs") && manifest["inputs"] != current) {
        throw ef::Error("labeled artifacts in " + labeled_dir.string() +
                        " were built from different raw streams than " + in_dir.string() +
                        " (manifest hash mismatch)");
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ef::Error("cannot write " + path.string());
    out << text;
}

// ---------------------------------------------------------------------------
// stages

int cmd_simulate(const CliConfig& config, const std::string& out_dir) {
    const ef::EventLog log = ef::simulate(config.sim);
    ef::write_event_log(log, out_dir);
    write_manifest(out_dir, "simulate", sim_config_json(config.sim), json::object(), hash_streams(out_dir));
    std::cout << "simulate: " << log.runs.size() << " runs, " << log.alarms.size() << " alarms, "
              << log.violations.size() << " violations, " << log.states.size() << " state changes, "
              << log.dips.size() << " dips -> " << out_dir << "\n";
    return kExitOk;
}

int cmd_validate(const std::string& in_dir) {
    const ef::EventLog log = ef::parse_event_log(in_dir);
    const auto issues = ef::validate(log);
    for (const auto& issue : issues) {
        std::cout << to_string(issue.kind) << " chamber=" << issue.chamber_id << " t=" << issue.time << " "
                  << issue.detail << "\n";
    }
    std::cout << "validate: " << issues.size() << " issue(s) in " << log.runs.size() << " runs\n";
    return kExitOk;
}

ef::EventLog load_log(const CliConfig& config, const std::string& in_dir) {
    ef::EventLog log = ef::parse_event_log(in_dir);
    if (!config.productive_recipes.empty()) {
        log = ef::filter_recipes(log, {config.productive_recipes.begin(), config.productive_recipes.end()});
    }
    return log;
}

int cmd_label(const CliConfig& config, const std::string& in_dir, const std::string& out_dir) {
    const ef::EventLog log = load_log(config, in_dir);
    const ef::LabeledDataset dataset = ef::build_labeled_dataset(log, config.pipeline);
    std::filesystem::create_directories(out_dir);
    ef::write_labeled_dataset(dataset, log, out_dir);

    json outputs{{"labeled.jsonl", ef::hash_file(std::filesystem::path(out_dir) / "labeled.jsonl")},
                 {"segments.jsonl", ef::hash_file(std::filesystem::path(out_dir) / "segments.jsonl")}};
    json config_json = pipeline_params_json(config.pipeline);
    config_json["cleaning"] = {{"removed_segments", dataset.cleaning.removed_segments},
                               {"removed_runs", dataset.cleaning.removed_runs}};
    write_manifest(out_dir, "label", config_json, hash_streams(in_dir), outputs);

    std::size_t complete = 0;
    for (const auto& s : dataset.segments) complete += s.censored ? 0 : 1;
    std::cout << "label: " << dataset.labeled.size() << " runs in " << dataset.segments.size() << " segments ("
              << complete << " complete), " << dataset.cleaning.removed_segments.size()
              << " short segment(s) removed -> " << out_dir << "\n";
    return kExitOk;
}

struct LoadedDataset {
    ef::EventLog log;
    ef::LabeledDataset dataset;
};

LoadedDataset load_dataset(const CliConfig& config, const std::string& in_dir,
                           const std::string& labeled_dir) {
    check_upstream(labeled_dir, in_dir);
    LoadedDataset out{load_log(config, in_dir), {}};
    out.dataset = ef::read_labeled_dataset(out.log, labeled_dir);
    return out;
}

int cmd_features(const CliConfig& config, const std::string& in_dir, const std::string& labeled_dir,
                 const std::string& spec_name, const std::string& out_dir,
                 const std::string& prune_report_path) {
    auto [log, dataset] = load_dataset(config, in_dir, labeled_dir);
    const auto rows = dataset.supervised_rows();
    const auto transforms = ef::FittedTransforms::fit(log, dataset, rows, config.pipeline);
    const ef::FeatureSpec spec = ef::feature_spec(spec_name, config.pipeline.window_runs);
    const ef::FeatureMatrix matrix = transforms.features(spec, log, dataset, rows);

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    ef::write_feature_csv(matrix, log, dataset, rows, dir / "features.csv");
    ef::write_feature_provenance(matrix, dir / "features.provenance.json");
    const fs::path prune_path =
        prune_report_path.empty() ? dir / "prune_report.json" : fs::path(prune_report_path);
    write_text(prune_path, ef::prune_report_to_json(transforms.prune).dump(2) + "\n");
    write_text(dir / "recipe_stats.json", ef::recipe_stats_to_json(transforms.stats).dump(2) + "\n");

    json config_json = pipeline_params_json(config.pipeline);
    config_json["feature_set"] = spec_name;
    json outputs{{"features.csv", ef::hash_file(dir / "features.csv")}};
    write_manifest(dir, "features", config_json, hash_streams(in_dir), outputs);

    std::cout << "features: " << matrix.values.rows() << " rows x " << matrix.values.cols() << " columns ("
              << spec_name << "), missing sensor rate " << ef::missing_rate(log.runs) << " -> " << out_dir
              << "\n";
    return kExitOk;
}

int cmd_penalties(const CliConfig& config, const std::string& in_dir, const std::string& labeled_dir,
                  const std::string& out_dir) {
    auto [log, dataset] = load_dataset(config, in_dir, labeled_dir);
    const auto rows = dataset.supervised_rows();
    const auto alarms = ef::fit_penalties(ef::coded_events(log.alarms), ef::PenaltyTable::Source::alarm, log,
                                          dataset.segments, dataset.labeled, rows,
                                          config.pipeline.penalty_epsilon_hours);
    const auto violations = ef::fit_penalties(ef::coded_events(log.violations),
                                              ef::PenaltyTable::Source::violation, log, dataset.segments,
                                              dataset.labeled, rows, config.pipeline.penalty_epsilon_hours);

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    write_text(dir / "penalties.csv", ef::penalties_csv(alarms, violations));
    write_text(dir / "penalties.json",
               json{{"alarms", ef::penalty_table_to_json(alarms)},
                    {"violations", ef::penalty_table_to_json(violations)}}
                       .dump(2) +
                   "\n");
    write_manifest(dir, "penalties", pipeline_params_json(config.pipeline), hash_streams(in_dir),
                   json{{"penalties.csv", ef::hash_file(dir / "penalties.csv")}});

    std::cout << "penalties: " << alarms.penalty.size() << " alarm code(s), " << violations.penalty.size()
              << " violation code(s) -> " << out_dir << "\n";
    return kExitOk;
}

int cmd_train(const CliConfig& config, const std::string& in_dir, const std::string& labeled_dir,
              const std::string& task_name, double bound, const std::string& spec_name,
              const std::string& family, std::uint64_t seed, const std::string& out_dir) {
    auto [log, dataset] = load_dataset(config, in_dir, labeled_dir);
    const ef::TaskKind task = ef::task_kind_from_string(task_name);
    const auto rows = dataset.supervised_rows();
    const auto transforms = ef::FittedTransforms::fit(log, dataset, rows, config.pipeline);
    const ef::FeatureSpec spec = ef::feature_spec(spec_name, config.pipeline.window_runs);
    const ef::FeatureMatrix matrix = transforms.features(spec, log, dataset, rows);

    ef::models::Spec model_spec;
    model_spec.family = ef::models::family_from_string(family);
    model_spec.task = task == ef::TaskKind::interval_classification ? ef::models::Task::classification
                                                                    : ef::models::Task::regression;
    model_spec.seed = seed;

    Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& lr = dataset.labeled.at(rows[i]);
        switch (task) {
            case ef::TaskKind::ttf_regression: y(static_cast<Eigen::Index>(i)) = lr.ttf; break;
            case ef::TaskKind::health_regression: y(static_cast<Eigen::Index>(i)) = lr.health; break;
            case ef::TaskKind::interval_classification:
                y(static_cast<Eigen::Index>(i)) = lr.ttf <= bound ? 1.0 : 0.0;
                break;
        }
    }

    const auto model = ef::models::fit(model_spec, matrix, y);
    json doc = ef::models::model_to_json(*model);
    doc["feature_set"] = spec_name;
    doc["trained_task"] = task_name;
    if (task == ef::TaskKind::interval_classification) doc["interval_bound_hours"] = bound;

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    write_text(dir / "model.json", doc.dump(2) + "\n");
    json config_json = pipeline_params_json(config.pipeline);
    config_json["model"] = {{"family", family}, {"feature_set", spec_name}, {"task", task_name}, {"seed", seed}};
    write_manifest(dir, "train", config_json, hash_streams(in_dir),
                   json{{"model.json", ef::hash_file(dir / "model.json")}});

    std::cout << "train: " << family << " on " << spec_name << " (" << rows.size() << " rows) -> " << out_dir
              << "\n";
    return kExitOk;
}

int cmd_evaluate(const CliConfig& config, const std::string& in_dir, const std::string& labeled_dir,
                 const std::string& task_name, const std::string& out_dir) {
    auto [log, dataset] = load_dataset(config, in_dir, labeled_dir);
    const ef::TaskKind task = ef::task_kind_from_string(task_name);

    std::vector<ef::FeatureSpec> feature_specs;
    for (const auto& name : config.feature_sets) {
        feature_specs.push_back(ef::feature_spec(name, config.pipeline.window_runs));
    }
    const std::vector<ef::models::Spec> model_specs =
        config.model_specs.empty() ? default_model_grid(task) : config.model_specs;

    ef::EvalConfig eval_config;
    eval_config.k_folds = config.k_folds;
    eval_config.fold_seed = config.eval_seed;
    eval_config.bounds = config.eval_bounds;
    eval_config.pipeline = config.pipeline;

    const ef::EvalReport report = ef::run_task(task, feature_specs, model_specs, log, dataset, eval_config);

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    write_text(dir / "report.json", report.to_json().dump(2) + "\n");
    write_text(dir / "table.csv", report.table_csv());
    if (!report.plot.empty()) write_text(dir / "plot.csv", report.plot_csv());

    json config_json = pipeline_params_json(config.pipeline);
    config_json["evaluation"] = {{"task", task_name},
                                 {"k_folds", config.k_folds},
                                 {"seed", config.eval_seed},
                                 {"feature_sets", config.feature_sets},
                                 {"bounds", eval_config.bounds}};
    json outputs{{"report.json", ef::hash_file(dir / "report.json")},
                 {"table.csv", ef::hash_file(dir / "table.csv")}};
    write_manifest(dir, "evaluate", config_json, hash_streams(in_dir), outputs);

    std::cout << "evaluate: " << task_name << ", best " << report.best_model << " on "
              << report.best_feature_set << " -> " << out_dir << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"synthetic plasma-etch fleet pipeline: simulate, label, engineer features, train and "
                 "evaluate TTF predictors"};
    app.require_subcommand(1);
    app.fallthrough();  // --config may follow the subcommand name

    std::string config_path;
    app.add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);

    std::string in_dir, labeled_dir, out_dir;
    std::string feature_set = "FS3", family = "RF", task_name = "ttf_regression";
    double bound = 24.0;
    std::uint64_t seed = 0;
    std::uint64_t sim_seed = 0;
    bool sim_seed_given = false;

    auto* simulate = app.add_subcommand("simulate", "generate a seeded synthetic event log");
    simulate->add_option("--seed", sim_seed, "simulator seed")->each([&](const std::string&) {
        sim_seed_given = true;
    });
    simulate->add_option("--out", out_dir, "output directory")->required();

    auto* validate = app.add_subcommand("validate", "parse a log directory and report consistency issues");
    validate->add_option("--in", in_dir, "event log directory")->required();

    auto* label = app.add_subcommand("label", "segment chambers and attach TTF/health/interval labels");
    label->add_option("--in", in_dir, "event log directory")->required();
    label->add_option("--out", out_dir, "output directory")->required();
    double min_segment_hours = -1.0;
    label->add_option("--min-segment-hours", min_segment_hours, "short-segment cleaning threshold");

    auto* features = app.add_subcommand("features", "materialize one feature-set combination as CSV");
    features->add_option("--in", in_dir, "event log directory")->required();
    features->add_option("--labeled", labeled_dir, "label stage output directory")->required();
    features->add_option("--spec", feature_set, "feature set FS1..FS7");
    features->add_option("--out", out_dir, "output directory")->required();
    int window_runs = -1;
    features->add_option("--window", window_runs, "trailing window length in runs");
    std::string prune_report_path;
    features->add_option("--prune-report", prune_report_path, "where to write the prune report JSON");

    auto* penalties = app.add_subcommand("penalties", "median-TTF / penalty report per event code");
    penalties->add_option("--in", in_dir, "event log directory")->required();
    penalties->add_option("--labeled", labeled_dir, "label stage output directory")->required();
    penalties->add_option("--out", out_dir, "output directory")->required();

    auto* train = app.add_subcommand("train", "fit one model on the full labeled dataset");
    train->add_option("--in", in_dir, "event log directory")->required();
    train->add_option("--labeled", labeled_dir, "label stage output directory")->required();
    train->add_option("--task", task_name, "ttf_regression | health_regression | interval_classification");
    train->add_option("--bound", bound, "interval bound in hours (classification)");
    train->add_option("--features", feature_set, "feature set FS1..FS7");
    train->add_option("--model", family, "LR | SGD_SVM | TREE | RF | KNN | MLP | GBC");
    train->add_option("--seed", seed, "model seed");
    train->add_option("--out", out_dir, "output directory")->required();

    auto* evaluate = app.add_subcommand("evaluate", "grouped k-fold benchmark evaluation");
    evaluate->add_option("--in", in_dir, "event log directory")->required();
    evaluate->add_option("--labeled", labeled_dir, "label stage output directory")->required();
    evaluate->add_option("--task", task_name, "ttf_regression | health_regression | interval_classification");
    std::vector<double> bounds_flag;
    evaluate->add_option("--bounds", bounds_flag, "interval bounds in hours (classification)")->delimiter(',');
    int folds_flag = -1;
    evaluate->add_option("--folds", folds_flag, "number of folds");
    std::uint64_t eval_seed = 0;
    bool eval_seed_given = false;
    evaluate->add_option("--seed", eval_seed, "fold assignment seed")->each([&](const std::string&) {
        eval_seed_given = true;
    });
    std::vector<std::string> feature_sets_flag;
    evaluate->add_option("--feature-sets", feature_sets_flag, "feature sets to evaluate")->delimiter(',');
    evaluate->add_option("--out", out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        CliConfig config = load_config(config_path);
        if (sim_seed_given) config.sim.seed = sim_seed;
        if (min_segment_hours >= 0.0) config.pipeline.min_segment_hours = min_segment_hours;
        if (window_runs > 0) config.pipeline.window_runs = window_runs;
        if (!bounds_flag.empty()) config.eval_bounds = bounds_flag;
        if (folds_flag > 0) config.k_folds = folds_flag;
        if (eval_seed_given) config.eval_seed = eval_seed;
        if (!feature_sets_flag.empty()) config.feature_sets = feature_sets_flag;

        if (simulate->parsed()) return cmd_simulate(config, out_dir);
        if (validate->parsed()) return cmd_validate(in_dir);
        if (label->parsed()) return cmd_label(config, in_dir, out_dir);
        if (features->parsed()) {
            return cmd_features(config, in_dir, labeled_dir, feature_set, out_dir, prune_report_path);
        }
        if (penalties->parsed()) return cmd_penalties(config, in_dir, labeled_dir, out_dir);
        if (train->parsed()) {
            return cmd_train(config, in_dir, labeled_dir, task_name, bound, feature_set, family, seed, out_dir);
        }
        if (evaluate->parsed()) return cmd_evaluate(config, in_dir, labeled_dir, task_name, out_dir);
        std::cerr << "no subcommand given\n";
        return kExitUsage;
    } catch (const etchforge::InvalidConfig& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
