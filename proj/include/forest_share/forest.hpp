#pragma once

// Forest data model: trees of binary branching nodes with conditions x_i <= theta,
// prediction semantics and distinct-condition counting.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace forest_share {

using NodeId = std::size_t;
using RowIndex = std::size_t;

enum class Task { classification, regression };

enum class AggregationMode { majority, mean, weighted_sum };

/// Predicate x[feature] <= threshold; true routes to the left child.
struct BranchingCondition {
  std::size_t feature = 0;
  double threshold = 0.0;

  bool goes_left(std::span<const double> x) const { return x[feature] <= threshold; }
};

/// A leaf holds either a scalar (regression, boosted raw score) or a class-score vector.
using LeafValue = std::variant<double, std::vector<double>>;

enum class NodeKind { internal, leaf };

struct Node {
  NodeKind kind = NodeKind::leaf;
  BranchingCondition condition{};
  NodeId left = 0;
  NodeId right = 0;
  LeafValue value = 0.0;

  bool is_leaf() const { return kind == NodeKind::leaf; }

  static Node make_internal(std::size_t feature, double threshold, NodeId left, NodeId right) {
    Node n;
    n.kind = NodeKind::internal;
    n.condition = {feature, threshold};
    n.left = left;
    n.right = right;
    return n;
  }

  static Node make_leaf(LeafValue value) {
    Node n;
    n.kind = NodeKind::leaf;
    n.value = std::move(value);
    return n;
  }
};

struct Tree {
  std::vector<Node> nodes;
  NodeId root = 0;

  std::size_t internal_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes.begin(), nodes.end(), [](const Node& n) { return !n.is_leaf(); }));
  }
};

struct Aggregation {
  AggregationMode mode = AggregationMode::majority;
  std::vector<double> weights;  // weighted_sum only, one per tree
  double bias = 0.0;            // weighted_sum only
};

/// Per-tree lists of row indices (bootstrap samples).
using PerTreeSamples = std::vector<std::vector<RowIndex>>;

struct Forest {
  Task task = Task::classification;
  std::size_t n_features = 0;
  std::size_t n_classes = 0;  // classification only
  Aggregation aggregation;
  std::vector<Tree> trees;
  std::optional<PerTreeSamples> bootstrap_indices;

  std::size_t internal_count() const {
    std::size_t total = 0;
    for (const auto& t : trees) total += t.internal_count();
    return total;
  }
};

enum class ModelErrc {
  schema,
  dangling_child,
  cycle,
  orphan_node,
  feature_out_of_range,
  invalid_threshold,
  aggregation,
};

class ModelError : public std::runtime_error {
 public:
  ModelError(ModelErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ModelErrc code() const noexcept { return code_; }

 private:
  ModelErrc code_;
};

namespace detail {

inline std::string node_location(std::size_t tree, std::size_t node) {
  std::ostringstream os;
  os << "tree " << tree << ", node " << node;
  return os.str();
}

}  // namespace detail

/// Checks structural invariants: rooted binary tree per entry, finite thresholds,
/// feature ids below n_features, leaf payloads consistent with the task/aggregation.
inline void validate(const Forest& forest) {
  const auto& agg = forest.aggregation;
  if (agg.mode == AggregationMode::majority && forest.task != Task::classification)
    throw ModelError(ModelErrc::aggregation, "majority aggregation requires task=classification");
  if (agg.mode == AggregationMode::mean && forest.task != Task::regression)
    throw ModelError(ModelErrc::aggregation, "mean aggregation requires task=regression");
  if (agg.mode == AggregationMode::weighted_sum && agg.weights.size() != forest.trees.size())
    throw ModelError(ModelErrc::aggregation, "weighted_sum: weights length " +
                                                 std::to_string(agg.weights.size()) + " != tree count " +
                                                 std::to_string(forest.trees.size()));
  if (forest.bootstrap_indices && forest.bootstrap_indices->size() != forest.trees.size())
    throw ModelError(ModelErrc::schema, "bootstrap_indices must have one list per tree");

  for (std::size_t t = 0; t < forest.trees.size(); ++t) {
    const Tree& tree = forest.trees[t];
    const std::size_t n = tree.nodes.size();
    if (n == 0) throw ModelError(ModelErrc::schema, "tree " + std::to_string(t) + " has no nodes");
    if (tree.root >= n)
      throw ModelError(ModelErrc::dangling_child,
                       "tree " + std::to_string(t) + ": root id " + std::to_string(tree.root) + " out of range");

    for (std::size_t h = 0; h < n; ++h) {
      const Node& node = tree.nodes[h];
      if (node.is_leaf()) {
        if (forest.task == Task::regression && !std::holds_alternative<double>(node.value))
          throw ModelError(ModelErrc::schema, detail::node_location(t, h) + ": regression leaf must be scalar");
        if (const auto* v = std::get_if<std::vector<double>>(&node.value);
            v && forest.n_classes != 0 && v->size() != forest.n_classes)
          throw ModelError(ModelErrc::schema, detail::node_location(t, h) + ": leaf vector length != n_classes");
        continue;
      }
      if (node.left >= n || node.right >= n)
        throw ModelError(ModelErrc::dangling_child, detail::node_location(t, h) + ": child id out of range");
      if (node.condition.feature >= forest.n_features)
        throw ModelError(ModelErrc::feature_out_of_range,
                         detail::node_location(t, h) + ": feature " + std::to_string(node.condition.feature) +
                             " >= n_features " + std::to_string(forest.n_features));
      if (!std::isfinite(node.condition.threshold))
        throw ModelError(ModelErrc::invalid_threshold, detail::node_location(t, h) + ": non-finite threshold");
    }

    // Iterative DFS; any revisit is a cycle or a shared child.
    std::vector<char> seen(n, 0);
    std::vector<NodeId> stack{tree.root};
    std::size_t visited = 0;
    while (!stack.empty()) {
      NodeId h = stack.back();
      stack.pop_back();
      if (seen[h])
        throw ModelError(ModelErrc::cycle, detail::node_location(t, h) + ": cycle-detected (node reached twice)");
      seen[h] = 1;
      ++visited;
      const Node& node = tree.nodes[h];
      if (!node.is_leaf()) {
        stack.push_back(node.right);
        stack.push_back(node.left);
      }
    }
    if (visited != n) {
      auto it = std::find(seen.begin(), seen.end(), 0);
      throw ModelError(ModelErrc::orphan_node,
                       detail::node_location(t, static_cast<std::size_t>(it - seen.begin())) +
                           ": node unreachable from root");
    }
  }
}

/// Root-to-leaf node ids visited by x.
inline std::vector<NodeId> leaf_path(const Tree& tree, std::span<const double> x) {
  std::vector<NodeId> path;
  NodeId h = tree.root;
  path.push_back(h);
  while (!tree.nodes[h].is_leaf()) {
    const Node& node = tree.nodes[h];
    h = node.condition.goes_left(x) ? node.left : node.right;
    path.push_back(h);
  }
  return path;
}

inline NodeId reach_leaf(const Tree& tree, std::span<const double> x) {
  NodeId h = tree.root;
  while (!tree.nodes[h].is_leaf()) {
    const Node& node = tree.nodes[h];
    h = node.condition.goes_left(x) ? node.left : node.right;
  }
  return h;
}

namespace detail {

// Index of the maximum, ties to the smallest index.
inline std::size_t argmax(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c)
    if (scores[c] > scores[best]) best = c;
  return best;
}

inline std::size_t leaf_class(const LeafValue& v) {
  if (const auto* scores = std::get_if<std::vector<double>>(&v)) return argmax(*scores);
  return static_cast<std::size_t>(std::get<double>(v));
}

inline double leaf_scalar(const LeafValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  throw std::invalid_argument("expected a scalar leaf value");
}

}  // namespace detail

/// Forest output for x: a class id (as a double) for classification, a real for regression.
///
/// majority: per-tree argmax then plurality, ties to the smallest class id.
/// mean: average of scalar leaves.
/// weighted_sum: bias + sum_t w_t * leaf_t. Classification with scalar leaves is binary
/// (class 1 iff the raw score is > 0); with vector leaves the weighted class scores are
/// summed and the argmax taken.
inline double predict(const Forest& forest, std::span<const double> x) {
  const auto& agg = forest.aggregation;
  switch (agg.mode) {
    case AggregationMode::majority: {
      std::vector<double> votes(std::max<std::size_t>(forest.n_classes, 1), 0.0);
      for (const auto& tree : forest.trees) {
        std::size_t c = detail::leaf_class(tree.nodes[reach_leaf(tree, x)].value);
        if (c >= votes.size()) votes.resize(c + 1, 0.0);
        votes[c] += 1.0;
      }
      return static_cast<double>(detail::argmax(votes));
    }
    case AggregationMode::mean: {
      if (forest.trees.empty()) return 0.0;
      double sum = 0.0;
      for (const auto& tree : forest.trees) sum += detail::leaf_scalar(tree.nodes[reach_leaf(tree, x)].value);
      return sum / static_cast<double>(forest.trees.size());
    }
    case AggregationMode::weighted_sum: {
      bool vector_leaves = false;
      std::vector<double> scores(std::max<std::size_t>(forest.n_classes, 1), 0.0);
      double raw = agg.bias;
      for (std::size_t t = 0; t < forest.trees.size(); ++t) {
        const auto& tree = forest.trees[t];
        const LeafValue& v = tree.nodes[reach_leaf(tree, x)].value;
        if (const auto* s = std::get_if<std::vector<double>>(&v)) {
          vector_leaves = true;
          if (s->size() > scores.size()) scores.resize(s->size(), 0.0);
          for (std::size_t c = 0; c < s->size(); ++c) scores[c] += agg.weights[t] * (*s)[c];
        } else {
          raw += agg.weights[t] * std::get<double>(v);
        }
      }
      if (forest.task == Task::regression) return raw;
      if (vector_leaves) return static_cast<double>(detail::argmax(scores));
      return raw > 0.0 ? 1.0 : 0.0;
    }
  }
  return 0.0;
}

/// Number of distinct (feature, exact threshold bit pattern) pairs over all internal nodes.
inline std::size_t count_distinct_conditions(const Forest& forest) {
  std::set<std::pair<std::size_t, std::uint64_t>> distinct;
  for (const auto& tree : forest.trees)
    for (const auto& node : tree.nodes)
      if (!node.is_leaf())
        distinct.emplace(node.condition.feature, std::bit_cast<std::uint64_t>(node.condition.threshold));
  return distinct.size();
}

/// Distinct thresholds per feature (length n_features).
inline std::vector<std::size_t> distinct_conditions_per_feature(const Forest& forest) {
  std::vector<std::set<std::uint64_t>> per(forest.n_features);
  for (const auto& tree : forest.trees)
    for (const auto& node : tree.nodes)
      if (!node.is_leaf() && node.condition.feature < per.size())
        per[node.condition.feature].insert(std::bit_cast<std::uint64_t>(node.condition.threshold));
  std::vector<std::size_t> out;
  out.reserve(per.size());
  for (const auto& s : per) out.push_back(s.size());
  return out;
}

/// Same node graph, leaf payloads and aggregation; thresholds may differ.
inline bool same_topology(const Forest& a, const Forest& b) {
  if (a.trees.size() != b.trees.size() || a.n_features != b.n_features) return false;
  for (std::size_t t = 0; t < a.trees.size(); ++t) {
    const Tree& ta = a.trees[t];
    const Tree& tb = b.trees[t];
    if (ta.root != tb.root || ta.nodes.size() != tb.nodes.size()) return false;
    for (std::size_t h = 0; h < ta.nodes.size(); ++h) {
      const Node& na = ta.nodes[h];
      const Node& nb = tb.nodes[h];
      if (na.kind != nb.kind) return false;
      if (na.is_leaf()) continue;
      if (na.left != nb.left || na.right != nb.right || na.condition.feature != nb.condition.feature) return false;
    }
  }
  return true;
}

}  // namespace forest_share
