#pragma once

// Deterministic fixtures: the two-tree forest whose four conditions share down to two, and
// seeded synthetic datasets for the trainer.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "forest_share/dataset.hpp"
#include "forest_share/forest.hpp"
#include "forest_share/random.hpp"

namespace forest_share::fixtures {

/// Vectors (1,1),(2,7),(7,2),(8,8) with labels 1,0,0,1.
inline Dataset example1_dataset() {
  return Dataset::from_rows({{1, 1}, {2, 7}, {7, 2}, {8, 8}}, std::vector<double>{1, 0, 0, 1});
}

/// T1: x0 <= 4 ? [class 1] : (x1 <= 5 ? [class 0] : [class 1]), fitted on rows {0, 2, 3}.
/// T2: x1 <= 4 ? [class 1] : (x0 <= 5 ? [class 0] : [class 1]), fitted on rows {0, 1, 3}.
/// Leaves hold class counts of the tree's bootstrap rows.
inline Forest example1_forest() {
  Forest f;
  f.task = Task::classification;
  f.n_features = 2;
  f.n_classes = 2;
  f.aggregation.mode = AggregationMode::majority;

  Tree t1;
  t1.nodes = {Node::make_internal(0, 4.0, 1, 2), Node::make_leaf(std::vector<double>{0, 1}),
              Node::make_internal(1, 5.0, 3, 4), Node::make_leaf(std::vector<double>{1, 0}),
              Node::make_leaf(std::vector<double>{0, 1})};
  Tree t2;
  t2.nodes = {Node::make_internal(1, 4.0, 1, 2), Node::make_leaf(std::vector<double>{0, 1}),
              Node::make_internal(0, 5.0, 3, 4), Node::make_leaf(std::vector<double>{1, 0}),
              Node::make_leaf(std::vector<double>{0, 1})};
  f.trees = {t1, t2};
  f.bootstrap_indices = PerTreeSamples{{0, 2, 3}, {0, 1, 3}};
  return f;
}

/// n rows of d features on a 0.1 grid in [0, 10). Classification labels split a noisy
/// nonlinear score into n_classes equal-frequency bands; regression targets are the score
/// plus noise.
inline Dataset synthetic_dataset(std::size_t n, std::size_t d, Task task, std::uint64_t seed,
                                 std::size_t n_classes = 2) {
  Rng rng(seed);
  std::vector<double> values(n * d);
  std::vector<double> score(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < d; ++f) {
      const double v = static_cast<double>(uniform_index(rng, 100)) / 10.0;
      values[i * d + f] = v;
      score[i] += (f % 2 == 0 ? 1.0 : -0.5) * v / static_cast<double>(f + 1);
    }
    if (d > 1) score[i] += 2.0 * std::sin(values[i * d + 1]);
    score[i] += uniform_unit(rng) - 0.5;
  }

  std::vector<double> labels(n);
  if (task == Task::regression) {
    labels = score;
  } else {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] < score[b]; });
    for (std::size_t rank = 0; rank < n; ++rank)
      labels[order[rank]] = static_cast<double>(rank * n_classes / n);
  }
  return Dataset(n, d, std::move(values), std::move(labels));
}

}  // namespace forest_share::fixtures
