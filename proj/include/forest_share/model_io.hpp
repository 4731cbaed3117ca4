#pragma once

// Model JSON reader/writer.
//
// {"task": "classification"|"regression", "n_features": int, "n_classes": int?,
//  "aggregation": {"mode": "majority"|"mean"|"weighted_sum", "weights": [..]?, "bias": num?},
//  "trees": [{"root": int, "nodes": [{"kind":"internal","feature":int,"threshold":num,
//                                     "left":int,"right":int} | {"kind":"leaf","value": num|[num,..]}]}],
//  "bootstrap_indices": [[int,..],..]?}

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "forest_share/forest.hpp"

namespace forest_share {

namespace detail {

using nlohmann::json;

[[noreturn]] inline void schema_error(const std::string& where, const std::string& what) {
  throw ModelError(ModelErrc::schema, where + ": " + what);
}

inline const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(where, std::string("missing field '") + key + "'");
  return *it;
}

inline std::size_t as_index(const json& v, const std::string& where, const char* key) {
  if (!v.is_number_integer() || v.get<long long>() < 0)
    schema_error(where, std::string("'") + key + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

inline double as_real(const json& v, const std::string& where, const char* key) {
  if (!v.is_number()) schema_error(where, std::string("'") + key + "' must be a number");
  return v.get<double>();
}

inline AggregationMode parse_mode(const std::string& s) {
  if (s == "majority") return AggregationMode::majority;
  if (s == "mean") return AggregationMode::mean;
  if (s == "weighted_sum") return AggregationMode::weighted_sum;
  schema_error("aggregation", "unknown mode '" + s + "'");
}

inline const char* mode_name(AggregationMode m) {
  switch (m) {
    case AggregationMode::majority: return "majority";
    case AggregationMode::mean: return "mean";
    case AggregationMode::weighted_sum: return "weighted_sum";
  }
  return "majority";
}

inline Node parse_node(const json& jn, const std::string& where) {
  if (!jn.is_object()) schema_error(where, "node must be an object");
  const auto& kind = require(jn, "kind", where);
  if (kind == "internal") {
    return Node::make_internal(as_index(require(jn, "feature", where), where, "feature"),
                               as_real(require(jn, "threshold", where), where, "threshold"),
                               as_index(require(jn, "left", where), where, "left"),
                               as_index(require(jn, "right", where), where, "right"));
  }
  if (kind == "leaf") {
    const auto& v = require(jn, "value", where);
    if (v.is_number()) return Node::make_leaf(v.get<double>());
    if (v.is_array()) {
      std::vector<double> scores;
      for (const auto& e : v) scores.push_back(as_real(e, where, "value"));
      return Node::make_leaf(std::move(scores));
    }
    schema_error(where, "'value' must be a number or an array of numbers");
  }
  schema_error(where, "'kind' must be \"internal\" or \"leaf\"");
}

}  // namespace detail

/// Parses and validates a model. Throws ModelError naming the offending tree/node.
inline Forest load_model(std::string_view text) {
  using detail::json;
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ModelError(ModelErrc::schema, std::string("model JSON parse error: ") + e.what());
  }
  if (!root.is_object()) detail::schema_error("model", "top level must be an object");

  Forest forest;
  const auto& task = detail::require(root, "task", "model");
  if (task == "classification")
    forest.task = Task::classification;
  else if (task == "regression")
    forest.task = Task::regression;
  else
    detail::schema_error("model", "'task' must be \"classification\" or \"regression\"");

  forest.n_features = detail::as_index(detail::require(root, "n_features", "model"), "model", "n_features");
  if (auto it = root.find("n_classes"); it != root.end() && !it->is_null())
    forest.n_classes = detail::as_index(*it, "model", "n_classes");

  const auto& agg = detail::require(root, "aggregation", "model");
  if (!agg.is_object()) detail::schema_error("aggregation", "must be an object");
  const auto& mode = detail::require(agg, "mode", "aggregation");
  if (!mode.is_string()) detail::schema_error("aggregation", "'mode' must be a string");
  forest.aggregation.mode = detail::parse_mode(mode.get<std::string>());
  if (auto it = agg.find("weights"); it != agg.end() && !it->is_null()) {
    if (!it->is_array()) detail::schema_error("aggregation", "'weights' must be an array");
    for (const auto& w : *it) forest.aggregation.weights.push_back(detail::as_real(w, "aggregation", "weights"));
  }
  if (auto it = agg.find("bias"); it != agg.end() && !it->is_null())
    forest.aggregation.bias = detail::as_real(*it, "aggregation", "bias");

  const auto& trees = detail::require(root, "trees", "model");
  if (!trees.is_array()) detail::schema_error("model", "'trees' must be an array");
  for (std::size_t t = 0; t < trees.size(); ++t) {
    const std::string where = "tree " + std::to_string(t);
    const auto& jt = trees[t];
    if (!jt.is_object()) detail::schema_error(where, "must be an object");
    Tree tree;
    tree.root = detail::as_index(detail::require(jt, "root", where), where, "root");
    const auto& nodes = detail::require(jt, "nodes", where);
    if (!nodes.is_array()) detail::schema_error(where, "'nodes' must be an array");
    tree.nodes.reserve(nodes.size());
    for (std::size_t h = 0; h < nodes.size(); ++h)
      tree.nodes.push_back(detail::parse_node(nodes[h], detail::node_location(t, h)));
    forest.trees.push_back(std::move(tree));
  }

  if (auto it = root.find("bootstrap_indices"); it != root.end() && !it->is_null()) {
    if (!it->is_array()) detail::schema_error("model", "'bootstrap_indices' must be an array");
    PerTreeSamples samples;
    for (const auto& list : *it) {
      if (!list.is_array()) detail::schema_error("bootstrap_indices", "each entry must be an array");
      auto& rows = samples.emplace_back();
      for (const auto& r : list) rows.push_back(detail::as_index(r, "bootstrap_indices", "index"));
    }
    forest.bootstrap_indices = std::move(samples);
  }

  validate(forest);
  return forest;
}

inline std::string save_model(const Forest& forest, int indent = -1) {
  using detail::json;
  json root;
  root["task"] = forest.task == Task::classification ? "classification" : "regression";
  root["n_features"] = forest.n_features;
  if (forest.task == Task::classification) root["n_classes"] = forest.n_classes;

  json agg;
  agg["mode"] = detail::mode_name(forest.aggregation.mode);
  if (forest.aggregation.mode == AggregationMode::weighted_sum) {
    agg["weights"] = forest.aggregation.weights;
    agg["bias"] = forest.aggregation.bias;
  }
  root["aggregation"] = std::move(agg);

  json trees = json::array();
  for (const auto& tree : forest.trees) {
    json nodes = json::array();
    for (const auto& node : tree.nodes) {
      if (node.is_leaf()) {
        json jv;
        if (const auto* d = std::get_if<double>(&node.value))
          jv = *d;
        else
          jv = std::get<std::vector<double>>(node.value);
        nodes.push_back({{"kind", "leaf"}, {"value", std::move(jv)}});
      } else {
        nodes.push_back({{"kind", "internal"},
                         {"feature", node.condition.feature},
                         {"threshold", node.condition.threshold},
                         {"left", node.left},
                         {"right", node.right}});
      }
    }
    trees.push_back({{"root", tree.root}, {"nodes", std::move(nodes)}});
  }
  root["trees"] = std::move(trees);
  if (forest.bootstrap_indices) root["bootstrap_indices"] = *forest.bootstrap_indices;
  return root.dump(indent);
}

inline Forest load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError(ModelErrc::schema, "cannot open model '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_model(buf.str());
}

}  // namespace forest_share
