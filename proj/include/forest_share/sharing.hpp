#pragma once

// Forest simplification by sharing thresholds: exact / sigma-relaxed stabbing, the
// exception-allowing dynamic program, and the k-means threshold clustering baseline.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "forest_share/dataset.hpp"
#include "forest_share/forest.hpp"
#include "forest_share/kmeans1d.hpp"
#include "forest_share/path_analysis.hpp"
#include "forest_share/stabbing.hpp"

namespace forest_share {

enum class Method { exact, sigma, exceptions, kmeans };

enum class SampleScope { all_rows, per_tree };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::exact: return "exact";
    case Method::sigma: return "sigma";
    case Method::exceptions: return "exceptions";
    case Method::kmeans: return "kmeans";
  }
  return "exact";
}

inline std::optional<Method> parse_method(const std::string& s) {
  if (s == "exact") return Method::exact;
  if (s == "sigma") return Method::sigma;
  if (s == "exceptions") return Method::exceptions;
  if (s == "kmeans") return Method::kmeans;
  return std::nullopt;
}

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SharingConfig {
  Method method = Method::exact;
  double sigma = 0.0;
  double exception_ratio = 0.0;
  std::size_t k = 0;
  SampleScope scope = SampleScope::all_rows;

  void validate() const {
    if (!(sigma >= 0.0 && sigma < 1.0)) throw ConfigError("sigma must be in [0, 1)");
    if (!(exception_ratio >= 0.0 && exception_ratio < 1.0)) throw ConfigError("exception ratio must be in [0, 1)");
    if (method != Method::sigma && sigma != 0.0) throw ConfigError("sigma is only valid with method=sigma");
    if (method != Method::exceptions && exception_ratio != 0.0)
      throw ConfigError("exception ratio is only valid with method=exceptions");
    if (method == Method::kmeans && k == 0) throw ConfigError("kmeans requires k >= 1");
    if (method != Method::kmeans && k != 0) throw ConfigError("k is only valid with method=kmeans");
  }
};

/// Shared thresholds of one feature and the nodes rewritten to each.
struct FeatureSolution {
  std::size_t feature = 0;
  std::vector<double> points;
  std::vector<std::vector<NodeRef>> groups;
  std::vector<ChangeableInterval> intervals;  // clamped, in (tree, node) order
  std::size_t exception_budget = 0;
};

struct SharingResult {
  Forest forest;
  std::vector<FeatureSolution> solutions;  // ascending feature id, non-empty features only
};

namespace detail {

inline NodeOccupancy occupancy_for(const Forest& forest, const Dataset& data, SampleScope scope,
                                   const PerTreeSamples* samples) {
  if (scope == SampleScope::all_rows) return route(forest, data);
  if (samples) return route(forest, data, *samples);
  if (forest.bootstrap_indices) return route(forest, data, *forest.bootstrap_indices);
  throw ConfigError("per-tree scope requires bootstrap indices in the model or explicit samples");
}

inline std::vector<Interval> plain_intervals(const std::vector<ChangeableInterval>& list) {
  std::vector<Interval> out;
  out.reserve(list.size());
  for (const auto& iv : list) out.push_back({iv.lower, iv.upper});
  return out;
}

inline SharingResult share_with(const Forest& forest, const Dataset& data, const SharingConfig& config,
                                const PerTreeSamples* samples, double sigma, double exception_ratio) {
  const NodeOccupancy occ = occupancy_for(forest, data, config.scope, samples);
  const FeatureIntervals lists = collect_intervals(forest, occ, data, sigma);

  SharingResult result{forest, {}};
  for (std::size_t f = 0; f < lists.size(); ++f) {
    const auto& list = lists[f];
    if (list.empty()) continue;
    const auto plain = plain_intervals(list);
    const std::size_t c =
        static_cast<std::size_t>(std::floor(exception_ratio * static_cast<double>(list.size())));

    FeatureSolution fs;
    fs.feature = f;
    fs.intervals = list;
    StabbingSolution sol;
    if (exception_ratio > 0.0 && c < list.size()) {
      fs.exception_budget = c;
      sol = min_intset_wexc(plain, c);
    } else {
      sol = min_intset(plain);
    }
    fs.points = sol.points;
    for (std::size_t g = 0; g < sol.groups.size(); ++g) {
      auto& refs = fs.groups.emplace_back();
      for (std::size_t idx : sol.groups[g]) {
        const NodeRef ref = list[idx].node;
        refs.push_back(ref);
        result.forest.trees[ref.tree].nodes[ref.node].condition.threshold = sol.points[g];
      }
    }
    result.solutions.push_back(std::move(fs));
  }
  return result;
}

}  // namespace detail

/// Exact or sigma-relaxed sharing: per feature, a minimum stabbing set of the nodes'
/// changeable intervals replaces every threshold in a group by the group's point.
inline SharingResult min_dbn(const Forest& forest, const Dataset& data, const SharingConfig& config,
                             const PerTreeSamples* samples = nullptr) {
  config.validate();
  if (config.method != Method::exact && config.method != Method::sigma)
    throw ConfigError("min_dbn expects method exact or sigma");
  return detail::share_with(forest, data, config, samples, config.sigma, 0.0);
}

/// Sharing that lets up to floor(ratio * p_i) intervals of feature i go unstabbed; those nodes
/// take their nearest shared point.
inline SharingResult min_dbn_wexc(const Forest& forest, const Dataset& data, const SharingConfig& config,
                                  const PerTreeSamples* samples = nullptr) {
  config.validate();
  if (config.method != Method::exceptions) throw ConfigError("min_dbn_wexc expects method exceptions");
  return detail::share_with(forest, data, config, samples, 0.0, config.exception_ratio);
}

/// Replaces each feature's thresholds by the centers of an optimal 1-D k-means clustering of
/// that feature's threshold multiset.
inline Forest kmeans_share(const Forest& forest, std::size_t k) {
  if (k == 0) throw ConfigError("kmeans requires k >= 1");
  Forest out = forest;
  std::vector<std::vector<NodeRef>> refs(forest.n_features);
  std::vector<std::vector<double>> values(forest.n_features);
  for (std::size_t t = 0; t < forest.trees.size(); ++t)
    for (NodeId h = 0; h < forest.trees[t].nodes.size(); ++h) {
      const Node& node = forest.trees[t].nodes[h];
      if (node.is_leaf()) continue;
      refs[node.condition.feature].push_back({t, h});
      values[node.condition.feature].push_back(node.condition.threshold);
    }
  for (std::size_t f = 0; f < forest.n_features; ++f) {
    if (values[f].empty()) continue;
    const KMeans1dResult km = kmeans_1d_assign(values[f], k);
    for (std::size_t i = 0; i < refs[f].size(); ++i)
      out.trees[refs[f][i].tree].nodes[refs[f][i].node].condition.threshold = km.centers[km.assignment[i]];
  }
  return out;
}

/// Dispatches on config.method. For kmeans the dataset is unused and no solutions are reported.
inline SharingResult simplify(const Forest& forest, const Dataset& data, const SharingConfig& config,
                              const PerTreeSamples* samples = nullptr) {
  config.validate();
  switch (config.method) {
    case Method::exact:
    case Method::sigma: return min_dbn(forest, data, config, samples);
    case Method::exceptions: return min_dbn_wexc(forest, data, config, samples);
    case Method::kmeans: return {kmeans_share(forest, config.k), {}};
  }
  return {forest, {}};
}

}  // namespace forest_share
