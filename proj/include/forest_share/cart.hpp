#pragma once

// Small CART trainer used to generate self-contained fixtures. Split thresholds are the
// midpoints of adjacent distinct sorted feature values.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "forest_share/dataset.hpp"
#include "forest_share/forest.hpp"
#include "forest_share/random.hpp"

namespace forest_share {

struct CartParams {
  Task task = Task::classification;
  std::size_t n_trees = 1;
  std::size_t max_depth = 3;
  bool bootstrap = false;
  std::uint64_t seed = 0;
  /// Features examined per split; 0 means all of them.
  std::size_t max_features = 0;
  std::size_t min_samples_split = 2;
};

struct CartResult {
  Forest forest;
  PerTreeSamples samples;  // empty unless bootstrap
};

/// Threshold strictly separating lo < hi: lo <= t < hi.
inline double split_midpoint(double lo, double hi) {
  double t = std::midpoint(lo, hi);
  return t < hi ? t : lo;
}

namespace detail {

class CartBuilder {
 public:
  CartBuilder(const Dataset& data, const CartParams& params, std::size_t n_classes, Rng& rng)
      : data_(data), params_(params), labels_(data.labels()), n_classes_(n_classes), rng_(rng) {}

  Tree build(std::vector<RowIndex> rows) {
    Tree tree;
    tree.root = 0;
    grow(tree, rows, 0);
    return tree;
  }

 private:
  struct Split {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double gain = 0.0;
  };

  // Impurity scaled by sample count: n*gini for classification, SSE for regression.
  double scaled_impurity(const std::vector<double>& counts, double n, double sum, double sum_sq) const {
    if (n <= 0.0) return 0.0;
    if (params_.task == Task::regression) return std::max(0.0, sum_sq - sum * sum / n);
    double s = 0.0;
    for (double c : counts) s += c * c;
    return n - s / n;
  }

  Split best_split(const std::vector<RowIndex>& rows) {
    std::vector<std::size_t> features(data_.n_features());
    std::iota(features.begin(), features.end(), std::size_t{0});
    if (params_.max_features > 0 && params_.max_features < features.size()) {
      for (std::size_t i = 0; i < params_.max_features; ++i) {
        std::size_t j = i + uniform_index(rng_, features.size() - i);
        std::swap(features[i], features[j]);
      }
      features.resize(params_.max_features);
      std::sort(features.begin(), features.end());
    }

    const double n = static_cast<double>(rows.size());
    std::vector<double> total(n_classes_, 0.0);
    double sum = 0.0, sum_sq = 0.0;
    for (RowIndex r : rows) accumulate(total, sum, sum_sq, labels_[r], 1.0);
    const double parent = scaled_impurity(total, n, sum, sum_sq);

    Split best;
    std::vector<RowIndex> sorted = rows;
    for (std::size_t f : features) {
      std::stable_sort(sorted.begin(), sorted.end(),
                       [&](RowIndex a, RowIndex b) { return data_.at(a, f) < data_.at(b, f); });
      std::vector<double> left(n_classes_, 0.0);
      double lsum = 0.0, lsq = 0.0;
      for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        accumulate(left, lsum, lsq, labels_[sorted[i]], 1.0);
        const double lo = data_.at(sorted[i], f);
        const double hi = data_.at(sorted[i + 1], f);
        if (!(lo < hi)) continue;
        std::vector<double> right(n_classes_);
        for (std::size_t c = 0; c < n_classes_; ++c) right[c] = total[c] - left[c];
        const double nl = static_cast<double>(i + 1);
        const double child = scaled_impurity(left, nl, lsum, lsq) +
                             scaled_impurity(right, n - nl, sum - lsum, sum_sq - lsq);
        const double gain = parent - child;
        if (gain > 1e-12 && gain > best.gain) best = {true, f, split_midpoint(lo, hi), gain};
      }
    }
    return best;
  }

  void accumulate(std::vector<double>& counts, double& sum, double& sum_sq, double y, double w) const {
    if (params_.task == Task::classification)
      counts[static_cast<std::size_t>(y)] += w;
    else {
      sum += w * y;
      sum_sq += w * y * y;
    }
  }

  LeafValue leaf_value(const std::vector<RowIndex>& rows) const {
    if (params_.task == Task::classification) {
      std::vector<double> counts(n_classes_, 0.0);
      for (RowIndex r : rows) counts[static_cast<std::size_t>(labels_[r])] += 1.0;
      return counts;
    }
    double s = 0.0;
    for (RowIndex r : rows) s += labels_[r];
    return rows.empty() ? 0.0 : s / static_cast<double>(rows.size());
  }

  NodeId grow(Tree& tree, const std::vector<RowIndex>& rows, std::size_t depth) {
    const NodeId id = tree.nodes.size();
    tree.nodes.push_back(Node::make_leaf(leaf_value(rows)));
    if (depth >= params_.max_depth || rows.size() < params_.min_samples_split) return id;
    Split split = best_split(rows);
    if (!split.found) return id;

    std::vector<RowIndex> left, right;
    for (RowIndex r : rows) (data_.at(r, split.feature) <= split.threshold ? left : right).push_back(r);
    const NodeId l = grow(tree, left, depth + 1);
    const NodeId r = grow(tree, right, depth + 1);
    tree.nodes[id] = Node::make_internal(split.feature, split.threshold, l, r);
    return id;
  }

  const Dataset& data_;
  const CartParams& params_;
  const std::vector<double>& labels_;
  std::size_t n_classes_;
  Rng& rng_;
};

}  // namespace detail

/// Fits n_trees CART trees (Gini for classification, variance reduction for regression).
/// Deterministic for a fixed seed. Classification labels must be non-negative integers.
inline CartResult fit_cart_forest(const Dataset& data, const CartParams& params) {
  if (data.size() < 2) throw std::invalid_argument("fit_cart_forest: need at least 2 rows");
  if (!data.has_labels()) throw std::invalid_argument("fit_cart_forest: dataset has no labels");

  std::size_t n_classes = 0;
  if (params.task == Task::classification) {
    for (double y : data.labels()) {
      if (y < 0 || y != std::floor(y)) throw std::invalid_argument("classification labels must be class ids");
      n_classes = std::max(n_classes, static_cast<std::size_t>(y) + 1);
    }
  }

  CartResult result;
  Forest& forest = result.forest;
  forest.task = params.task;
  forest.n_features = data.n_features();
  forest.n_classes = n_classes;
  forest.aggregation.mode = params.task == Task::classification ? AggregationMode::majority : AggregationMode::mean;

  Rng rng(params.seed);
  detail::CartBuilder builder(data, params, n_classes, rng);
  for (std::size_t t = 0; t < params.n_trees; ++t) {
    std::vector<RowIndex> rows(data.size());
    if (params.bootstrap) {
      for (auto& r : rows) r = uniform_index(rng, data.size());
      result.samples.push_back(rows);
    } else {
      std::iota(rows.begin(), rows.end(), RowIndex{0});
    }
    forest.trees.push_back(builder.build(std::move(rows)));
  }
  if (params.bootstrap) forest.bootstrap_indices = result.samples;
  return result;
}

}  // namespace forest_share
