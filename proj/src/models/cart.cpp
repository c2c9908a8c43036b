#include "etchforge/models/cart.hpp"

#include <algorithm>
#include <numeric>

#include "etchforge/errors.hpp"

namespace etchforge::models {
namespace {

constexpr double kMinGain = 1e-12;

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

}  // namespace

CartTree CartTree::fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<int>& rows,
                       const CartOptions& options, Rng* rng) {
    if (rows.empty()) throw InvalidConfig("CartTree::fit: empty row set");
    CartTree tree;
    std::vector<int> mutable_rows = rows;
    tree.build(X, y, mutable_rows, 0, options, rng);
    return tree;
}

int CartTree::build(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::vector<int>& rows, int depth,
                    const CartOptions& options, Rng* rng) {
    const int node_index = static_cast<int>(nodes_.size());
    nodes_.emplace_back();

    const int n = static_cast<int>(rows.size());
    double sum = 0.0;
    for (int r : rows) sum += y(r);
    const double mean = sum / n;
    nodes_[node_index].value = mean;

    if (depth >= options.max_depth || n < 2 * options.min_samples_leaf) return node_index;

    // Candidate features: all, or a seeded subset per split (random forest).
    std::vector<int> candidates;
    const int d = static_cast<int>(X.cols());
    if (options.features_per_split > 0 && options.features_per_split < d) {
        candidates = rng->sample_without_replacement(d, options.features_per_split);
    } else {
        candidates.resize(d);
        std::iota(candidates.begin(), candidates.end(), 0);
    }

    // Best split by sum-of-squares reduction. Iterating features and
    // thresholds in ascending order makes ties resolve to the lowest feature
    // index and threshold.
    SplitChoice best;
    std::vector<std::pair<double, double>> xy(n);  // (x, y) sorted per feature

    for (int f : candidates) {
        for (int i = 0; i < n; ++i) xy[i] = {X(rows[i], f), y(rows[i])};
        std::sort(xy.begin(), xy.end());

        double left_sum = 0.0;
        for (int i = 1; i < n; ++i) {
            left_sum += xy[i - 1].second;
            if (i < options.min_samples_leaf || n - i < options.min_samples_leaf) continue;
            if (xy[i - 1].first == xy[i].first) continue;  // no boundary here

            const double right_sum = sum - left_sum;
            // gain = parent SSE - (left SSE + right SSE); the y^2 terms cancel.
            const double gain = left_sum * left_sum / i + right_sum * right_sum / (n - i) - n * mean * mean;
            // strict > keeps the first (lowest feature, lowest threshold) among ties
            if (gain > kMinGain && gain > best.gain) {
                best.found = true;
                best.feature = f;
                best.threshold = 0.5 * (xy[i - 1].first + xy[i].first);
                best.gain = gain;
            }
        }
    }

    if (!best.found) return node_index;

    std::vector<int> left_rows, right_rows;
    left_rows.reserve(rows.size());
    right_rows.reserve(rows.size());
    for (int r : rows) {
        (X(r, best.feature) <= best.threshold ? left_rows : right_rows).push_back(r);
    }
    if (static_cast<int>(left_rows.size()) < options.min_samples_leaf ||
        static_cast<int>(right_rows.size()) < options.min_samples_leaf) {
        return node_index;  // duplicate x values can starve a side
    }

    rows.clear();
    rows.shrink_to_fit();

    nodes_[node_index].feature = best.feature;
    nodes_[node_index].threshold = best.threshold;
    const int left = build(X, y, left_rows, depth + 1, options, rng);
    nodes_[node_index].left = left;
    const int right = build(X, y, right_rows, depth + 1, options, rng);
    nodes_[node_index].right = right;
    return node_index;
}

int CartTree::leaf_of(const Eigen::MatrixXd& X, Eigen::Index row) const {
    int at = 0;
    while (nodes_[at].feature >= 0) {
        at = X(row, nodes_[at].feature) <= nodes_[at].threshold ? nodes_[at].left : nodes_[at].right;
    }
    return at;
}

double CartTree::predict_row(const Eigen::MatrixXd& X, Eigen::Index row) const {
    return nodes_[leaf_of(X, row)].value;
}

Eigen::VectorXd CartTree::predict(const Eigen::MatrixXd& X) const {
    Eigen::VectorXd out(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) out(i) = predict_row(X, i);
    return out;
}

void CartTree::set_leaf_value(int node, double value) { nodes_.at(node).value = value; }

nlohmann::json CartTree::to_json() const {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : nodes_) {
        nodes.push_back({{"feature", n.feature},
                         {"threshold", n.threshold},
                         {"left", n.left},
                         {"right", n.right},
                         {"value", n.value}});
    }
    return {{"nodes", nodes}};
}

CartTree CartTree::from_json(const nlohmann::json& j) {
    CartTree tree;
    for (const auto& n : j.at("nodes")) {
        CartNode node;
        node.feature = n.at("feature").get<int>();
        node.threshold = n.at("threshold").get<double>();
        node.left = n.at("left").get<int>();
        node.right = n.at("right").get<int>();
        node.value = n.at("value").get<double>();
        tree.nodes_.push_back(node);
    }
    if (tree.nodes_.empty()) throw Error("CartTree::from_json: empty tree");
    return tree;
}

}  // namespace etchforge::models
