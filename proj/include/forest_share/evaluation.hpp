#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "forest_share/dataset.hpp"
#include "forest_share/forest.hpp"
#include "forest_share/path_analysis.hpp"
#include "forest_share/random.hpp"
#include "forest_share/sharing.hpp"

namespace forest_share {

class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Coefficient of determination 1 - sum (y - yhat)^2 / sum (y - mean y)^2.
inline double r_squared(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size()) throw EvaluationError("r_squared: length mismatch");
  if (y.size() < 2) throw EvaluationError("r_squared: need at least 2 values");
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  double residual = 0.0, total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    residual += (y[i] - yhat[i]) * (y[i] - yhat[i]);
    total += (y[i] - mean) * (y[i] - mean);
  }
  if (total == 0.0) throw EvaluationError("r_squared: variance-zero target");
  return 1.0 - residual / total;
}

inline std::vector<double> predict_all(const Forest& forest, const Dataset& data) {
  std::vector<double> out;
  out.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) out.push_back(predict(forest, data.row(i)));
  return out;
}

/// Classification: fraction of correct predictions. Regression: R^2.
inline double accuracy(const Forest& forest, const Dataset& data) {
  if (!data.has_labels()) throw EvaluationError("accuracy: dataset has no labels");
  const auto yhat = predict_all(forest, data);
  const auto& y = data.labels();
  if (forest.task == Task::regression) return r_squared(y, yhat);
  if (y.empty()) throw EvaluationError("accuracy: empty dataset");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < y.size(); ++i) correct += (yhat[i] == y[i]);
  return static_cast<double>(correct) / static_cast<double>(y.size());
}

struct PathViolation {
  RowIndex row = 0;
  std::size_t tree = 0;

  friend bool operator==(const PathViolation&, const PathViolation&) = default;
};

/// Every (row, tree) whose leaf path differs between the forests. With samples, tree t is
/// checked only on samples[t].
inline std::vector<PathViolation> verify_path_invariance(const Forest& original, const Forest& simplified,
                                                         const Dataset& data,
                                                         const PerTreeSamples* samples = nullptr) {
  if (!same_topology(original, simplified)) throw EvaluationError("verify_path_invariance: topology mismatch");
  if (samples && samples->size() != original.trees.size())
    throw EvaluationError("verify_path_invariance: one sample list per tree required");
  std::vector<PathViolation> out;
  for (std::size_t t = 0; t < original.trees.size(); ++t) {
    auto check = [&](RowIndex r) {
      if (leaf_path(original.trees[t], data.row(r)) != leaf_path(simplified.trees[t], data.row(r)))
        out.push_back({r, t});
    };
    if (samples) {
      std::vector<RowIndex> rows = (*samples)[t];
      std::sort(rows.begin(), rows.end());
      rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
      for (RowIndex r : rows) check(r);
    } else {
      for (RowIndex r = 0; r < data.size(); ++r) check(r);
    }
  }
  std::sort(out.begin(), out.end(), [](const PathViolation& a, const PathViolation& b) {
    return a.row != b.row ? a.row < b.row : a.tree < b.tree;
  });
  return out;
}

/// Per internal node of the original forest: how many of its occupancy rows branch the
/// other way under the simplified threshold. Indexed [tree][node] (0 for leaves).
inline std::vector<std::vector<std::size_t>> node_flip_counts(const Forest& original, const Forest& simplified,
                                                              const Dataset& data, const NodeOccupancy& occupancy) {
  std::vector<std::vector<std::size_t>> out(original.trees.size());
  for (std::size_t t = 0; t < original.trees.size(); ++t) {
    const Tree& a = original.trees[t];
    out[t].assign(a.nodes.size(), 0);
    for (NodeId h = 0; h < a.nodes.size(); ++h) {
      if (a.nodes[h].is_leaf()) continue;
      const auto& before = a.nodes[h].condition;
      const auto& after = simplified.trees[t].nodes[h].condition;
      for (RowIndex r : occupancy.rows(t, h)) out[t][h] += before.goes_left(data.row(r)) != after.goes_left(data.row(r));
    }
  }
  return out;
}

/// Fold id per row: a seeded shuffle dealt round-robin, so fold sizes differ by at most one.
inline std::vector<std::size_t> kfold_split(std::size_t n, std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw EvaluationError("kfold_split: need at least 2 folds");
  if (folds > n) throw EvaluationError("kfold_split: more folds than rows");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  shuffle(std::span<std::size_t>(order), rng);
  std::vector<std::size_t> fold(n);
  for (std::size_t pos = 0; pos < n; ++pos) fold[order[pos]] = pos % folds;
  return fold;
}

/// Rows of one fold (test) or of all other folds (train).
inline std::vector<RowIndex> fold_rows(const std::vector<std::size_t>& assignment, std::size_t fold, bool in_fold) {
  std::vector<RowIndex> rows;
  for (RowIndex r = 0; r < assignment.size(); ++r)
    if ((assignment[r] == fold) == in_fold) rows.push_back(r);
  return rows;
}

struct SimplificationReport {
  std::size_t ndc_before = 0;
  std::size_t ndc_after = 0;
  std::optional<double> size_ratio;
  std::optional<double> acc_before;
  std::optional<double> acc_after;
  std::optional<double> accuracy_ratio;
  std::optional<double> train_accuracy_ratio;
  std::size_t invariance_violations = 0;
  SharingConfig config;
  double wall_time_s = 0.0;
};

namespace detail {

inline std::optional<double> ratio(std::optional<double> num, std::optional<double> den) {
  if (!num || !den || *den == 0.0) return std::nullopt;
  return *num / *den;
}

inline std::optional<double> try_accuracy(const Forest& forest, const Dataset& data) {
  if (!data.has_labels() || data.size() == 0) return std::nullopt;
  try {
    return accuracy(forest, data);
  } catch (const EvaluationError&) {
    return std::nullopt;
  }
}

}  // namespace detail

/// NDC, size ratio and accuracy ratio of a simplification. Accuracies are measured on the
/// test set (the training set when test is null); violations are counted on training rows
/// within the configured sample scope.
inline SimplificationReport build_report(const Forest& before, const Forest& after, const Dataset& train,
                                         const Dataset* test, const SharingConfig& config,
                                         double wall_time_s = 0.0, const PerTreeSamples* samples = nullptr) {
  SimplificationReport rep;
  rep.config = config;
  rep.wall_time_s = wall_time_s;
  rep.ndc_before = count_distinct_conditions(before);
  rep.ndc_after = count_distinct_conditions(after);
  if (rep.ndc_before > 0)
    rep.size_ratio = static_cast<double>(rep.ndc_after) / static_cast<double>(rep.ndc_before);

  const Dataset& eval = test ? *test : train;
  rep.acc_before = detail::try_accuracy(before, eval);
  rep.acc_after = detail::try_accuracy(after, eval);
  rep.accuracy_ratio = detail::ratio(rep.acc_after, rep.acc_before);
  rep.train_accuracy_ratio = detail::ratio(detail::try_accuracy(after, train), detail::try_accuracy(before, train));

  const PerTreeSamples* scope_samples = nullptr;
  if (config.scope == SampleScope::per_tree) {
    scope_samples = samples;
    if (!scope_samples && before.bootstrap_indices) scope_samples = &*before.bootstrap_indices;
  }
  rep.invariance_violations = verify_path_invariance(before, after, train, scope_samples).size();
  return rep;
}

inline nlohmann::json report_to_json(const SimplificationReport& rep) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  nlohmann::json j;
  j["ndc_before"] = rep.ndc_before;
  j["ndc_after"] = rep.ndc_after;
  j["size_ratio"] = opt(rep.size_ratio);
  j["acc_before"] = opt(rep.acc_before);
  j["acc_after"] = opt(rep.acc_after);
  j["accuracy_ratio"] = opt(rep.accuracy_ratio);
  j["train_accuracy_ratio"] = opt(rep.train_accuracy_ratio);
  j["invariance_violations"] = rep.invariance_violations;
  j["method"] = method_name(rep.config.method);
  j["sigma"] = rep.config.sigma;
  j["exception_ratio"] = rep.config.exception_ratio;
  j["k"] = rep.config.method == Method::kmeans ? nlohmann::json(rep.config.k) : nlohmann::json(nullptr);
  j["per_tree_samples"] = rep.config.scope == SampleScope::per_tree;
  j["wall_time_s"] = rep.wall_time_s;
  return j;
}

inline std::string report_csv_header() {
  return "method,sigma,exception_ratio,k,per_tree_samples,ndc_before,ndc_after,size_ratio,acc_before,acc_after,"
         "accuracy_ratio,train_accuracy_ratio,invariance_violations,wall_time_s";
}

inline std::string report_csv_row(const SimplificationReport& rep) {
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string{}; };
  std::string row = method_name(rep.config.method);
  row += "," + format_double(rep.config.sigma);
  row += "," + format_double(rep.config.exception_ratio);
  row += "," + (rep.config.method == Method::kmeans ? std::to_string(rep.config.k) : std::string{});
  row += rep.config.scope == SampleScope::per_tree ? ",true" : ",false";
  row += "," + std::to_string(rep.ndc_before) + "," + std::to_string(rep.ndc_after);
  row += "," + opt(rep.size_ratio) + "," + opt(rep.acc_before) + "," + opt(rep.acc_after);
  row += "," + opt(rep.accuracy_ratio) + "," + opt(rep.train_accuracy_ratio);
  row += "," + std::to_string(rep.invariance_violations) + "," + format_double(rep.wall_time_s);
  return row;
}

/// Arithmetic mean across folds of every numeric field; optional fields average over the
/// folds where they are defined.
inline nlohmann::json mean_report_json(const std::vector<SimplificationReport>& reps) {
  if (reps.empty()) throw EvaluationError("mean_report_json: no reports");
  auto mean_opt = [&](auto field) -> nlohmann::json {
    double s = 0.0;
    std::size_t n = 0;
    for (const auto& r : reps)
      if (auto v = field(r)) {
        s += *v;
        ++n;
      }
    return n ? nlohmann::json(s / static_cast<double>(n)) : nlohmann::json(nullptr);
  };
  auto mean_num = [&](auto field) {
    double s = 0.0;
    for (const auto& r : reps) s += static_cast<double>(field(r));
    return s / static_cast<double>(reps.size());
  };
  nlohmann::json j = report_to_json(reps.front());
  j["folds"] = reps.size();
  j["ndc_before"] = mean_num([](const auto& r) { return r.ndc_before; });
  j["ndc_after"] = mean_num([](const auto& r) { return r.ndc_after; });
  j["size_ratio"] = mean_opt([](const auto& r) { return r.size_ratio; });
  j["acc_before"] = mean_opt([](const auto& r) { return r.acc_before; });
  j["acc_after"] = mean_opt([](const auto& r) { return r.acc_after; });
  j["accuracy_ratio"] = mean_opt([](const auto& r) { return r.accuracy_ratio; });
  j["train_accuracy_ratio"] = mean_opt([](const auto& r) { return r.train_accuracy_ratio; });
  j["invariance_violations"] = mean_num([](const auto& r) { return r.invariance_violations; });
  j["wall_time_s"] = mean_num([](const auto& r) { return r.wall_time_s; });
  return j;
}

}  // namespace forest_share
