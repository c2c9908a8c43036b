#include "etchforge/evalbench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <tuple>

#include "etchforge/errors.hpp"
#include "etchforge/rng.hpp"

namespace etchforge {

std::string to_string(TaskKind t) {
    switch (t) {
        case TaskKind::ttf_regression: return "ttf_regression";
        case TaskKind::health_regression: return "health_regression";
        case TaskKind::interval_classification: return "interval_classification";
    }
    return "?";
}

TaskKind task_kind_from_string(const std::string& s) {
    for (TaskKind t : {TaskKind::ttf_regression, TaskKind::health_regression,
                       TaskKind::interval_classification}) {
        if (to_string(t) == s) return t;
    }
    throw InvalidConfig("unknown task: " + s);
}

double benchmark_b1_constant(const std::vector<LabeledRun>& labeled,
                             const std::vector<std::size_t>& train_rows) {
    if (train_rows.empty()) throw InvalidConfig("benchmark_b1 needs at least one training run");
    double sum = 0.0;
    for (std::size_t row : train_rows) sum += labeled.at(row).ttf;
    return sum / static_cast<double>(train_rows.size());
}

Eigen::VectorXd benchmark_b2(const std::vector<LabeledRun>& labeled,
                             const std::vector<std::size_t>& eval_rows) {
    std::map<std::size_t, std::pair<double, int>> per_segment;  // segment -> (sum, count)
    for (std::size_t row : eval_rows) {
        auto& [sum, count] = per_segment[labeled.at(row).segment_index];
        sum += labeled.at(row).ttf;
        ++count;
    }
    Eigen::VectorXd out(static_cast<Eigen::Index>(eval_rows.size()));
    for (std::size_t i = 0; i < eval_rows.size(); ++i) {
        const auto& [sum, count] = per_segment.at(labeled.at(eval_rows[i]).segment_index);
        out(static_cast<Eigen::Index>(i)) = sum / count;
    }
    return out;
}

double historic_mean_segment_hours(const std::vector<Segment>& segments,
                                   const std::set<std::size_t>& train_segments) {
    double sum = 0.0;
    int count = 0;
    for (std::size_t s : train_segments) {
        if (segments.at(s).censored) continue;
        sum += segments.at(s).total_productive_hours;
        ++count;
    }
    if (count == 0) throw InvalidConfig("benchmark_b3 needs at least one complete training segment");
    return sum / count;
}

Eigen::VectorXd benchmark_b3(const EventLog& log, const std::vector<Segment>& segments,
                             const std::vector<LabeledRun>& labeled,
                             const std::vector<std::size_t>& eval_rows, double xbar) {
    // Productive hours elapsed in the segment up to and including each run.
    std::map<std::size_t, std::map<std::size_t, double>> elapsed;  // segment -> run_index -> hours
    for (std::size_t row : eval_rows) {
        const std::size_t s = labeled.at(row).segment_index;
        if (elapsed.count(s)) continue;
        double acc = 0.0;
        for (std::size_t ri : segments.at(s).run_indices) {
            acc += log.runs.at(ri).duration;
            elapsed[s][ri] = acc;
        }
    }
    Eigen::VectorXd out(static_cast<Eigen::Index>(eval_rows.size()));
    for (std::size_t i = 0; i < eval_rows.size(); ++i) {
        const LabeledRun& lr = labeled.at(eval_rows[i]);
        out(static_cast<Eigen::Index>(i)) = std::max(0.0, xbar - elapsed.at(lr.segment_index).at(lr.run_index));
    }
    return out;
}

FoldAssignment grouped_kfold(const std::vector<Segment>& segments, int k, std::uint64_t seed) {
    if (k < 2) throw InvalidConfig("grouped_kfold needs k >= 2");
    std::vector<std::string> ids;
    for (const auto& s : segments) {
        if (!s.censored) ids.push_back(s.segment_id);
    }
    if (static_cast<int>(ids.size()) < k) {
        throw TooFewSegments("grouped_kfold: fewer complete segments than folds");
    }
    std::sort(ids.begin(), ids.end());
    Rng rng(mix_seed(seed ^ 0x666f6c64ULL));
    rng.shuffle(ids);

    FoldAssignment assignment;
    assignment.k = k;
    assignment.seed = seed;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        assignment.fold_of_segment[ids[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
    }
    return assignment;
}

double rmse(const Eigen::VectorXd& prediction, const Eigen::VectorXd& truth) {
    if (prediction.size() != truth.size() || prediction.size() == 0) {
        throw InvalidConfig("rmse: vectors must have equal positive length");
    }
    return std::sqrt((prediction - truth).squaredNorm() / static_cast<double>(truth.size()));
}

double relative_rmse(double x, double b3) {
    if (b3 == 0.0) throw ZeroBenchmark("relative_rmse: benchmark RMSE is zero");
    return (x - b3) / b3;
}

PrfMetric prf1(const std::vector<std::uint8_t>& predicted, const std::vector<std::uint8_t>& truth) {
    if (predicted.size() != truth.size()) throw InvalidConfig("prf1: vectors must have equal length");
    double tp = 0.0, fp = 0.0, fn = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (predicted[i] && truth[i]) {
            tp += 1.0;
        } else if (predicted[i] && !truth[i]) {
            fp += 1.0;
        } else if (!predicted[i] && truth[i]) {
            fn += 1.0;
        }
    }
    PrfMetric m;
    m.precision = tp + fp > 0.0 ? tp / (tp + fp) : 0.0;
    m.recall = tp + fn > 0.0 ? tp / (tp + fn) : 0.0;
    m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    return m;
}

namespace {

Eigen::VectorXd gather(const std::vector<LabeledRun>& labeled, const std::vector<std::size_t>& rows,
                       TaskKind task) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        y(static_cast<Eigen::Index>(i)) =
            task == TaskKind::health_regression ? labeled.at(rows[i]).health : labeled.at(rows[i]).ttf;
    }
    return y;
}

std::vector<std::uint8_t> threshold_labels(const Eigen::VectorXd& ttf, double bound) {
    std::vector<std::uint8_t> labels(static_cast<std::size_t>(ttf.size()));
    for (Eigen::Index i = 0; i < ttf.size(); ++i) labels[static_cast<std::size_t>(i)] = ttf(i) <= bound ? 1 : 0;
    return labels;
}

std::string csv_num(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

}  // namespace

const RegressionRow& EvalReport::regression_row(const std::string& model,
                                                const std::string& feature_set) const {
    for (const auto& r : regression_rows) {
        if (r.model == model && r.feature_set == feature_set) return r;
    }
    throw Error("regression row not found: " + model + "/" + feature_set);
}

const ClassificationRow& EvalReport::classification_row(const std::string& model,
                                                        const std::string& feature_set) const {
    for (const auto& r : classification_rows) {
        if (r.model == model && r.feature_set == feature_set) return r;
    }
    throw Error("classification row not found: " + model + "/" + feature_set);
}

EvalReport run_task(TaskKind task, const std::vector<FeatureSpec>& feature_specs,
                    const std::vector<models::Spec>& model_specs, const EventLog& log,
                    const LabeledDataset& dataset, const EvalConfig& config) {
    if (feature_specs.empty() || model_specs.empty()) {
        throw InvalidConfig("run_task needs at least one feature spec and one model spec");
    }
    const bool classification = task == TaskKind::interval_classification;
    const std::vector<double> bounds = classification
                                           ? (config.bounds.empty() ? config.pipeline.interval_bounds
                                                                    : config.bounds)
                                           : std::vector<double>{};

    EvalReport report;
    report.task = to_string(task);
    report.k_folds = config.k_folds;
    report.fold_seed = config.fold_seed;
    report.bounds = bounds;
    for (const auto& fs : feature_specs) report.feature_sets.push_back(fs.name);

    // Unique row names per model spec.
    std::vector<std::string> model_names;
    for (const auto& ms : model_specs) {
        std::string name = models::to_string(ms.family);
        int suffix = 2;
        while (std::find(model_names.begin(), model_names.end(), name) != model_names.end()) {
            name = models::to_string(ms.family) + "#" + std::to_string(suffix++);
        }
        model_names.push_back(name);
    }
    report.models = model_names;

    const FoldAssignment folds = grouped_kfold(dataset.segments, config.k_folds, config.fold_seed);
    const std::vector<std::size_t> rows = dataset.supervised_rows();

    auto fold_of_row = [&](std::size_t row) {
        return folds.fold_of_segment.at(dataset.labeled.at(row).segment_id);
    };

    // Pooled predictions in fold-major order.
    std::vector<std::size_t> pooled_rows;
    std::vector<double> pooled_truth;                       // regression target
    std::vector<double> pooled_b1, pooled_b2, pooled_b3;    // benchmark predictions (target scale)
    std::vector<double> pooled_b3_ttf;                      // classification thresholds use TTF space
    std::vector<double> pooled_b1_ttf, pooled_b2_ttf;
    std::vector<std::vector<std::vector<double>>> pooled_model(
        feature_specs.size(), std::vector<std::vector<double>>(model_specs.size()));
    // classification: [fs][model][bound] predicted labels, pooled
    std::vector<std::vector<std::vector<std::vector<std::uint8_t>>>> pooled_labels(
        feature_specs.size(),
        std::vector<std::vector<std::vector<std::uint8_t>>>(model_specs.size(),
                                                            std::vector<std::vector<std::uint8_t>>(bounds.size())));
    std::vector<std::vector<std::uint8_t>> pooled_truth_labels(bounds.size());
    std::vector<std::vector<std::vector<std::uint8_t>>> pooled_bench_labels(
        3, std::vector<std::vector<std::uint8_t>>(bounds.size()));

    // Per-fold metric stores.
    std::vector<std::vector<std::vector<double>>> fold_model_rmse(
        feature_specs.size(), std::vector<std::vector<double>>(model_specs.size()));
    std::vector<double> fold_b1_rmse, fold_b2_rmse, fold_b3_rmse;
    std::vector<std::vector<std::vector<std::vector<PrfMetric>>>> fold_model_prf(
        feature_specs.size(),
        std::vector<std::vector<std::vector<PrfMetric>>>(model_specs.size(),
                                                         std::vector<std::vector<PrfMetric>>(bounds.size())));
    std::vector<std::vector<std::vector<PrfMetric>>> fold_bench_prf(
        3, std::vector<std::vector<PrfMetric>>(bounds.size()));

    for (int f = 0; f < config.k_folds; ++f) {
        std::vector<std::size_t> train_rows, test_rows;
        for (std::size_t row : rows) {
            (fold_of_row(row) == f ? test_rows : train_rows).push_back(row);
        }
        if (train_rows.empty() || test_rows.empty()) {
            throw TooFewSegments("fold " + std::to_string(f) + " has an empty train or test side");
        }

        const FittedTransforms transforms =
            FittedTransforms::fit(log, dataset, train_rows, config.pipeline);

        std::set<std::size_t> train_segments;
        for (std::size_t row : train_rows) train_segments.insert(dataset.labeled.at(row).segment_index);
        const double xbar = historic_mean_segment_hours(dataset.segments, train_segments);

        // Benchmarks in TTF space.
        const double b1_ttf_const = benchmark_b1_constant(dataset.labeled, train_rows);
        Eigen::VectorXd b1_ttf = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(test_rows.size()),
                                                           b1_ttf_const);
        Eigen::VectorXd b2_ttf(static_cast<Eigen::Index>(test_rows.size()));
        {
            std::map<std::size_t, std::pair<double, int>> seg_ttf;
            for (std::size_t row : test_rows) {
                auto& [sum, count] = seg_ttf[dataset.labeled.at(row).segment_index];
                sum += dataset.labeled.at(row).ttf;
                ++count;
            }
            for (std::size_t i = 0; i < test_rows.size(); ++i) {
                const auto& [sum, count] = seg_ttf.at(dataset.labeled.at(test_rows[i]).segment_index);
                b2_ttf(static_cast<Eigen::Index>(i)) = sum / count;
            }
        }
        const Eigen::VectorXd b3_ttf = benchmark_b3(log, dataset.segments, dataset.labeled, test_rows, xbar);

        // Target-space benchmark views. For health the naive and visionary
        // benchmarks are means of the health target itself; the realistic
        // countdown is rescaled by xbar so it decays from 1 to 0.
        Eigen::VectorXd b1_t = b1_ttf, b2_t = b2_ttf, b3_t = b3_ttf;
        if (task == TaskKind::health_regression) {
            double sum = 0.0;
            for (std::size_t row : train_rows) sum += dataset.labeled.at(row).health;
            b1_t.setConstant(sum / static_cast<double>(train_rows.size()));

            std::map<std::size_t, std::pair<double, int>> seg_health;
            for (std::size_t row : test_rows) {
                auto& [s, c] = seg_health[dataset.labeled.at(row).segment_index];
                s += dataset.labeled.at(row).health;
                ++c;
            }
            for (std::size_t i = 0; i < test_rows.size(); ++i) {
                const auto& [s, c] = seg_health.at(dataset.labeled.at(test_rows[i]).segment_index);
                b2_t(static_cast<Eigen::Index>(i)) = s / c;
            }
            b3_t = b3_ttf / xbar;
        }

        const Eigen::VectorXd y_train = gather(dataset.labeled, train_rows, task);
        const Eigen::VectorXd y_test = gather(dataset.labeled, test_rows, task);
        Eigen::VectorXd ttf_train(static_cast<Eigen::Index>(train_rows.size()));
        Eigen::VectorXd ttf_test(static_cast<Eigen::Index>(test_rows.size()));
        for (std::size_t i = 0; i < train_rows.size(); ++i) {
            ttf_train(static_cast<Eigen::Index>(i)) = dataset.labeled.at(train_rows[i]).ttf;
        }
        for (std::size_t i = 0; i < test_rows.size(); ++i) {
            ttf_test(static_cast<Eigen::Index>(i)) = dataset.labeled.at(test_rows[i]).ttf;
        }

        if (!classification) {
            fold_b1_rmse.push_back(rmse(b1_t, y_test));
            fold_b2_rmse.push_back(rmse(b2_t, y_test));
            fold_b3_rmse.push_back(rmse(b3_t, y_test));
        } else {
            for (std::size_t bi = 0; bi < bounds.size(); ++bi) {
                const auto truth_labels = threshold_labels(ttf_test, bounds[bi]);
                pooled_truth_labels[bi].insert(pooled_truth_labels[bi].end(), truth_labels.begin(),
                                               truth_labels.end());
                const Eigen::VectorXd* bench_ttf[3] = {&b1_ttf, &b2_ttf, &b3_ttf};
                for (int bench = 0; bench < 3; ++bench) {
                    const auto labels = threshold_labels(*bench_ttf[bench], bounds[bi]);
                    fold_bench_prf[bench][bi].push_back(prf1(labels, truth_labels));
                    pooled_bench_labels[bench][bi].insert(pooled_bench_labels[bench][bi].end(),
                                                          labels.begin(), labels.end());
                }
            }
        }

        for (std::size_t i = 0; i < test_rows.size(); ++i) pooled_rows.push_back(test_rows[i]);
        for (Eigen::Index i = 0; i < y_test.size(); ++i) {
            pooled_truth.push_back(y_test(i));
            pooled_b1.push_back(b1_t(i));
            pooled_b2.push_back(b2_t(i));
            pooled_b3.push_back(b3_t(i));
            pooled_b1_ttf.push_back(b1_ttf(i));
            pooled_b2_ttf.push_back(b2_ttf(i));
            pooled_b3_ttf.push_back(b3_ttf(i));
        }

        for (std::size_t fsi = 0; fsi < feature_specs.size(); ++fsi) {
            const FeatureMatrix train_x = transforms.features(feature_specs[fsi], log, dataset, train_rows);
            const FeatureMatrix test_x = transforms.features(feature_specs[fsi], log, dataset, test_rows);

            for (std::size_t mi = 0; mi < model_specs.size(); ++mi) {
                models::Spec spec = model_specs[mi];
                spec.task = classification ? models::Task::classification : models::Task::regression;

                if (!classification) {
                    const auto model = models::fit(spec, train_x, y_train);
                    const Eigen::VectorXd pred = model->predict(test_x);
                    fold_model_rmse[fsi][mi].push_back(rmse(pred, y_test));
                    for (Eigen::Index i = 0; i < pred.size(); ++i) pooled_model[fsi][mi].push_back(pred(i));
                } else {
                    for (std::size_t bi = 0; bi < bounds.size(); ++bi) {
                        Eigen::VectorXd cls_train(ttf_train.size());
                        for (Eigen::Index i = 0; i < ttf_train.size(); ++i) {
                            cls_train(i) = ttf_train(i) <= bounds[bi] ? 1.0 : 0.0;
                        }
                        const auto model = models::fit(spec, train_x, cls_train);
                        const auto labels = model->predict_labels(test_x);
                        const auto truth_labels = threshold_labels(ttf_test, bounds[bi]);
                        fold_model_prf[fsi][mi][bi].push_back(prf1(labels, truth_labels));
                        pooled_labels[fsi][mi][bi].insert(pooled_labels[fsi][mi][bi].end(), labels.begin(),
                                                          labels.end());
                    }
                }
            }
        }
    }

    const auto to_vec = [](const std::vector<double>& v) {
        return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    };

    if (!classification) {
        const Eigen::VectorXd truth = to_vec(pooled_truth);
        const double b3_pooled_rmse = rmse(to_vec(pooled_b3), truth);

        auto add_bench_row = [&](const std::string& name, const std::vector<double>& fold_rmse_v,
                                 const std::vector<double>& pooled_pred) {
            RegressionRow row;
            row.model = name;
            row.feature_set = "-";
            row.fold_rmse = fold_rmse_v;
            for (std::size_t f = 0; f < fold_rmse_v.size(); ++f) {
                row.fold_rel.push_back(relative_rmse(fold_rmse_v[f], fold_b3_rmse[f]));
            }
            row.pooled_rmse = rmse(to_vec(pooled_pred), truth);
            row.pooled_rel = relative_rmse(row.pooled_rmse, b3_pooled_rmse);
            report.regression_rows.push_back(std::move(row));
        };
        add_bench_row("B1", fold_b1_rmse, pooled_b1);
        add_bench_row("B2", fold_b2_rmse, pooled_b2);
        add_bench_row("B3", fold_b3_rmse, pooled_b3);

        double best_rmse = std::numeric_limits<double>::infinity();
        for (std::size_t fsi = 0; fsi < feature_specs.size(); ++fsi) {
            for (std::size_t mi = 0; mi < model_specs.size(); ++mi) {
                RegressionRow row;
                row.model = model_names[mi];
                row.feature_set = feature_specs[fsi].name;
                row.fold_rmse = fold_model_rmse[fsi][mi];
                for (std::size_t f = 0; f < row.fold_rmse.size(); ++f) {
                    row.fold_rel.push_back(relative_rmse(row.fold_rmse[f], fold_b3_rmse[f]));
                }
                row.pooled_rmse = rmse(to_vec(pooled_model[fsi][mi]), truth);
                row.pooled_rel = relative_rmse(row.pooled_rmse, b3_pooled_rmse);
                if (row.pooled_rmse < best_rmse) {
                    best_rmse = row.pooled_rmse;
                    report.best_model = row.model;
                    report.best_feature_set = row.feature_set;
                }
                report.regression_rows.push_back(std::move(row));
            }
        }

        // Plot data for the best row, ordered by chamber and run start.
        std::size_t best_fsi = 0, best_mi = 0;
        for (std::size_t fsi = 0; fsi < feature_specs.size(); ++fsi) {
            for (std::size_t mi = 0; mi < model_specs.size(); ++mi) {
                if (feature_specs[fsi].name == report.best_feature_set && model_names[mi] == report.best_model) {
                    best_fsi = fsi;
                    best_mi = mi;
                }
            }
        }
        std::vector<std::size_t> order(pooled_rows.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const Run& ra = log.runs.at(dataset.labeled.at(pooled_rows[a]).run_index);
            const Run& rb = log.runs.at(dataset.labeled.at(pooled_rows[b]).run_index);
            return std::tie(ra.chamber_id, ra.start) < std::tie(rb.chamber_id, rb.start);
        });
        for (std::size_t o : order) {
            const Run& run = log.runs.at(dataset.labeled.at(pooled_rows[o]).run_index);
            report.plot.push_back({run.run_id, run.start, pooled_truth[o], pooled_model[best_fsi][best_mi][o],
                                   pooled_b1[o], pooled_b2[o], pooled_b3[o]});
        }
    } else {
        auto add_bench_row = [&](const std::string& name, int bench) {
            ClassificationRow row;
            row.model = name;
            row.feature_set = "-";
            for (std::size_t bi = 0; bi < bounds.size(); ++bi) {
                ClassificationCell cell;
                cell.fold_prf = fold_bench_prf[bench][bi];
                cell.pooled = prf1(pooled_bench_labels[bench][bi], pooled_truth_labels[bi]);
                row.per_bound[bounds[bi]] = std::move(cell);
            }
            report.classification_rows.push_back(std::move(row));
        };
        add_bench_row("B1", 0);
        add_bench_row("B2", 1);
        add_bench_row("B3", 2);

        double best_mean_f1 = -1.0;
        for (std::size_t fsi = 0; fsi < feature_specs.size(); ++fsi) {
            for (std::size_t mi = 0; mi < model_specs.size(); ++mi) {
                ClassificationRow row;
                row.model = model_names[mi];
                row.feature_set = feature_specs[fsi].name;
                double mean_f1 = 0.0;
                for (std::size_t bi = 0; bi < bounds.size(); ++bi) {
                    ClassificationCell cell;
                    cell.fold_prf = fold_model_prf[fsi][mi][bi];
                    cell.pooled = prf1(pooled_labels[fsi][mi][bi], pooled_truth_labels[bi]);
                    mean_f1 += cell.pooled.f1;
                    row.per_bound[bounds[bi]] = std::move(cell);
                }
                mean_f1 /= static_cast<double>(bounds.size());
                if (mean_f1 > best_mean_f1) {
                    best_mean_f1 = mean_f1;
                    report.best_model = row.model;
                    report.best_feature_set = row.feature_set;
                }
                report.classification_rows.push_back(std::move(row));
            }
        }
    }

    return report;
}

nlohmann::json EvalReport::to_json() const {
    nlohmann::json j;
    j["task"] = task;
    j["k_folds"] = k_folds;
    j["fold_seed"] = fold_seed;
    j["feature_sets"] = feature_sets;
    j["models"] = models;
    j["best_model"] = best_model;
    j["best_feature_set"] = best_feature_set;
    if (!bounds.empty()) j["bounds"] = bounds;

    if (!regression_rows.empty()) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& r : regression_rows) {
            rows.push_back({{"model", r.model},
                            {"feature_set", r.feature_set},
                            {"fold_rmse", r.fold_rmse},
                            {"fold_relative_rmse", r.fold_rel},
                            {"pooled_rmse", r.pooled_rmse},
                            {"pooled_relative_rmse", r.pooled_rel}});
        }
        j["regression"] = rows;
    }
    if (!classification_rows.empty()) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& r : classification_rows) {
            nlohmann::json per_bound = nlohmann::json::array();
            for (const auto& [bound, cell] : r.per_bound) {
                nlohmann::json folds = nlohmann::json::array();
                for (const auto& m : cell.fold_prf) {
                    folds.push_back({{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}});
                }
                per_bound.push_back({{"bound", bound},
                                     {"pooled", {{"precision", cell.pooled.precision},
                                                 {"recall", cell.pooled.recall},
                                                 {"f1", cell.pooled.f1}}},
                                     {"folds", folds}});
            }
            rows.push_back({{"model", r.model}, {"feature_set", r.feature_set}, {"intervals", per_bound}});
        }
        j["classification"] = rows;
    }
    return j;
}

std::string EvalReport::table_csv() const {
    std::ostringstream os;
    if (!regression_rows.empty()) {
        // Relative RMSE grid: one row per feature set, benchmarks first.
        os << "features,B1,B2,B3";
        for (const auto& m : models) os << ',' << m;
        os << '\n';
        const double b1 = regression_row("B1", "-").pooled_rel;
        const double b2 = regression_row("B2", "-").pooled_rel;
        const double b3 = regression_row("B3", "-").pooled_rel;
        for (const auto& fs : feature_sets) {
            os << fs << ',' << csv_num(b1) << ',' << csv_num(b2) << ',' << csv_num(b3);
            for (const auto& m : models) os << ',' << csv_num(regression_row(m, fs).pooled_rel);
            os << '\n';
        }
        return os.str();
    }

    os << "interval_hours,benchmark_p,benchmark_r,benchmark_f1,best_features,best_model,p,r,f1\n";
    for (double bound : bounds) {
        const auto& bench = classification_row("B3", "-").per_bound.at(bound).pooled;
        PrfMetric best;
        std::string best_model_name, best_fs;
        for (const auto& row : classification_rows) {
            if (row.feature_set == "-") continue;
            const auto& cell = row.per_bound.at(bound).pooled;
            if (cell.f1 > best.f1) {
                best = cell;
                best_model_name = row.model;
                best_fs = row.feature_set;
            }
        }
        os << csv_num(bound) << ',' << csv_num(bench.precision) << ',' << csv_num(bench.recall) << ','
           << csv_num(bench.f1) << ',' << best_fs << ',' << best_model_name << ',' << csv_num(best.precision)
           << ',' << csv_num(best.recall) << ',' << csv_num(best.f1) << '\n';
    }
    return os.str();
}

std::string EvalReport::plot_csv() const {
    std::ostringstream os;
    os << "run_id,start_hours,truth,prediction,b1,b2,b3\n";
    for (const auto& p : plot) {
        os << p.run_id << ',' << csv_num(p.start) << ',' << csv_num(p.truth) << ',' << csv_num(p.prediction)
           << ',' << csv_num(p.b1) << ',' << csv_num(p.b2) << ',' << csv_num(p.b3) << '\n';
    }
    return os.str();
}

}  // namespace etchforge
