#pragma once

// Routing of feature vectors through the original forest and the per-node changeable
// threshold intervals [lower, upper) derived from the vectors passing through each node.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "forest_share/dataset.hpp"
#include "forest_share/forest.hpp"

namespace forest_share {

struct NodeRef {
  std::size_t tree = 0;
  NodeId node = 0;

  friend bool operator==(const NodeRef&, const NodeRef&) = default;
  friend auto operator<=>(const NodeRef&, const NodeRef&) = default;
};

/// Rows whose path passes through each node, indexed [tree][node]. Rows are ascending.
class NodeOccupancy {
 public:
  NodeOccupancy() = default;
  explicit NodeOccupancy(std::vector<std::vector<std::vector<RowIndex>>> rows) : rows_(std::move(rows)) {}

  const std::vector<RowIndex>& rows(std::size_t tree, NodeId node) const { return rows_[tree][node]; }
  const std::vector<RowIndex>& rows(NodeRef ref) const { return rows_[ref.tree][ref.node]; }
  std::size_t tree_count() const { return rows_.size(); }

 private:
  std::vector<std::vector<std::vector<RowIndex>>> rows_;
};

namespace detail {

inline void route_tree(const Tree& tree, const Dataset& data, std::span<const RowIndex> rows,
                       std::vector<std::vector<RowIndex>>& out) {
  out.assign(tree.nodes.size(), {});
  for (RowIndex r : rows) {
    auto x = data.row(r);
    NodeId h = tree.root;
    out[h].push_back(r);
    while (!tree.nodes[h].is_leaf()) {
      const Node& node = tree.nodes[h];
      h = node.condition.goes_left(x) ? node.left : node.right;
      out[h].push_back(r);
    }
  }
}

inline void check_dims(const Forest& forest, const Dataset& data) {
  if (data.n_features() != forest.n_features)
    throw std::invalid_argument("dataset has " + std::to_string(data.n_features()) + " features, forest expects " +
                                std::to_string(forest.n_features));
}

}  // namespace detail

/// Routes every dataset row through every tree.
inline NodeOccupancy route(const Forest& forest, const Dataset& data) {
  detail::check_dims(forest, data);
  std::vector<RowIndex> all(data.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  std::vector<std::vector<std::vector<RowIndex>>> occ(forest.trees.size());
  for (std::size_t t = 0; t < forest.trees.size(); ++t) detail::route_tree(forest.trees[t], data, all, occ[t]);
  return NodeOccupancy(std::move(occ));
}

/// Routes only samples[t] through tree t. Repeated indices (bootstrap draws) count once.
inline NodeOccupancy route(const Forest& forest, const Dataset& data, const PerTreeSamples& samples) {
  detail::check_dims(forest, data);
  if (samples.size() != forest.trees.size())
    throw std::invalid_argument("per-tree samples: expected " + std::to_string(forest.trees.size()) +
                                " lists, got " + std::to_string(samples.size()));
  std::vector<std::vector<std::vector<RowIndex>>> occ(forest.trees.size());
  for (std::size_t t = 0; t < forest.trees.size(); ++t) {
    std::vector<RowIndex> rows = samples[t];
    for (RowIndex r : rows)
      if (r >= data.size())
        throw std::out_of_range("per-tree samples: tree " + std::to_string(t) + " row index " + std::to_string(r) +
                                " out of range (n=" + std::to_string(data.size()) + ")");
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    detail::route_tree(forest.trees[t], data, rows, occ[t]);
  }
  return NodeOccupancy(std::move(occ));
}

struct ChangeableInterval {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  NodeRef node{};
  std::size_t feature = 0;

  bool contains(double v) const { return lower <= v && v < upper; }
};

/// Number of passing vectors allowed to switch branch at a node with `count` vectors.
inline std::size_t allowed_flips(double sigma, std::size_t count) {
  return static_cast<std::size_t>(std::floor(sigma * static_cast<double>(count)));
}

/// Changeable range of theta given the node's feature values (any order).
///
/// With m = floor(sigma * |values|): lower is the (m+1)-th largest value <= theta (-inf if
/// there are at most m of them), upper the (m+1)-th smallest value > theta (+inf likewise).
/// Any threshold in [lower, upper) flips at most m of the values.
inline ChangeableInterval changeable_interval(std::span<const double> values, double theta, double sigma) {
  if (!std::isfinite(theta)) throw std::invalid_argument("changeable_interval: non-finite threshold");
  if (!(sigma >= 0.0 && sigma < 1.0)) throw std::invalid_argument("changeable_interval: sigma must be in [0,1)");
  std::vector<double> left, right;
  for (double v : values) (v <= theta ? left : right).push_back(v);
  const std::size_t m = allowed_flips(sigma, values.size());

  ChangeableInterval iv;
  if (left.size() > m) {
    std::nth_element(left.begin(), left.begin() + static_cast<std::ptrdiff_t>(m), left.end(), std::greater<>());
    iv.lower = left[m];
  }
  if (right.size() > m) {
    std::nth_element(right.begin(), right.begin() + static_cast<std::ptrdiff_t>(m), right.end());
    iv.upper = right[m];
  }
  return iv;
}

/// Interval of one internal node against its occupancy (unclamped).
inline ChangeableInterval node_interval(const Forest& forest, const NodeOccupancy& occupancy, const Dataset& data,
                                        NodeRef ref, double sigma) {
  const Node& node = forest.trees[ref.tree].nodes[ref.node];
  const auto& rows = occupancy.rows(ref);
  std::vector<double> values;
  values.reserve(rows.size());
  for (RowIndex r : rows) values.push_back(data.at(r, node.condition.feature));
  ChangeableInterval iv = changeable_interval(values, node.condition.threshold, sigma);
  iv.node = ref;
  iv.feature = node.condition.feature;
  return iv;
}

using FeatureIntervals = std::vector<std::vector<ChangeableInterval>>;

/// Replaces infinite bounds by finite sentinels below/above every finite endpoint of the
/// feature: (min - 1) and (max + 1) over the routed values and the original thresholds.
/// All finite endpoints are data values, so intersection relations are unchanged.
inline void clamp_intervals(FeatureIntervals& lists, const Forest& forest, const NodeOccupancy& occupancy,
                            const Dataset& data) {
  const std::size_t d = lists.size();
  std::vector<double> lo(d, std::numeric_limits<double>::infinity());
  std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
  std::vector<char> routed(data.size(), 0);
  for (std::size_t t = 0; t < occupancy.tree_count(); ++t)
    for (RowIndex r : occupancy.rows(t, forest.trees[t].root)) routed[r] = 1;
  for (RowIndex r = 0; r < data.size(); ++r) {
    if (!routed[r]) continue;
    for (std::size_t f = 0; f < d; ++f) {
      lo[f] = std::min(lo[f], data.at(r, f));
      hi[f] = std::max(hi[f], data.at(r, f));
    }
  }
  for (std::size_t f = 0; f < d; ++f) {
    for (const auto& iv : lists[f]) {
      const double theta = forest.trees[iv.node.tree].nodes[iv.node.node].condition.threshold;
      lo[f] = std::min(lo[f], theta);
      hi[f] = std::max(hi[f], theta);
    }
    for (auto& iv : lists[f]) {
      if (std::isinf(iv.lower)) iv.lower = lo[f] - 1.0;
      if (std::isinf(iv.upper)) iv.upper = hi[f] + 1.0;
    }
  }
}

/// One interval per internal node, grouped by feature, in (tree, node) order.
inline FeatureIntervals collect_intervals(const Forest& forest, const NodeOccupancy& occupancy, const Dataset& data,
                                          double sigma, bool clamp = true) {
  FeatureIntervals lists(forest.n_features);
  for (std::size_t t = 0; t < forest.trees.size(); ++t) {
    const Tree& tree = forest.trees[t];
    for (NodeId h = 0; h < tree.nodes.size(); ++h) {
      if (tree.nodes[h].is_leaf()) continue;
      ChangeableInterval iv = node_interval(forest, occupancy, data, {t, h}, sigma);
      lists[iv.feature].push_back(iv);
    }
  }
  if (clamp) clamp_intervals(lists, forest, occupancy, data);
  return lists;
}

}  // namespace forest_share
