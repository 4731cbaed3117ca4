#pragma once

// Globally optimal 1-D k-means by dynamic programming over sorted distinct values.
// Equal values always share a cluster; repetitions weight the cluster means.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

namespace forest_share {

struct KMeans1dResult {
  std::vector<double> centers;           // ascending
  std::vector<std::size_t> assignment;   // cluster of each input value
  double sse = 0.0;
};

namespace detail {

class WeightedCost {
 public:
  WeightedCost(const std::vector<double>& xs, const std::vector<double>& ws) {
    double shift = 0.0, wsum = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      shift += ws[i] * xs[i];
      wsum += ws[i];
    }
    shift /= wsum;
    w_.assign(xs.size() + 1, 0.0);
    s_.assign(xs.size() + 1, 0.0);
    q_.assign(xs.size() + 1, 0.0);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double x = xs[i] - shift;
      w_[i + 1] = w_[i] + ws[i];
      s_[i + 1] = s_[i] + ws[i] * x;
      q_[i + 1] = q_[i] + ws[i] * x * x;
    }
  }

  // Within-cluster SSE of distinct values [a, b).
  double operator()(std::size_t a, std::size_t b) const {
    const double w = w_[b] - w_[a];
    const double s = s_[b] - s_[a];
    return std::max(0.0, (q_[b] - q_[a]) - s * s / w);
  }

 private:
  std::vector<double> w_, s_, q_;
};

// Fills cur[i] for i in [lo, hi] given prev, with optimal split in [opt_lo, opt_hi].
inline void divide_conquer(const WeightedCost& cost, const std::vector<double>& prev, std::vector<double>& cur,
                           std::vector<std::size_t>& arg, std::size_t lo, std::size_t hi, std::size_t opt_lo,
                           std::size_t opt_hi) {
  if (lo > hi) return;
  const std::size_t mid = lo + (hi - lo) / 2;
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_j = opt_lo;
  for (std::size_t j = opt_lo; j <= std::min(opt_hi, mid - 1); ++j) {
    const double v = prev[j] + cost(j, mid);
    if (v < best) {
      best = v;
      best_j = j;
    }
  }
  cur[mid] = best;
  arg[mid] = best_j;
  if (mid > lo) divide_conquer(cost, prev, cur, arg, lo, mid - 1, opt_lo, best_j);
  divide_conquer(cost, prev, cur, arg, mid + 1, hi, best_j, opt_hi);
}

}  // namespace detail

/// Clusters values into min(k, #distinct) groups minimizing the total squared distance
/// to the cluster means.
inline KMeans1dResult kmeans_1d_assign(std::span<const double> values, std::size_t k) {
  if (values.empty()) throw std::invalid_argument("kmeans_1d: empty input");
  if (k == 0) throw std::invalid_argument("kmeans_1d: k must be >= 1");

  std::map<double, double> counts;
  for (double v : values) counts[v] += 1.0;
  std::vector<double> xs, ws;
  for (const auto& [x, w] : counts) {
    xs.push_back(x);
    ws.push_back(w);
  }
  const std::size_t n = xs.size();
  const std::size_t clusters = std::min(k, n);
  const detail::WeightedCost cost(xs, ws);

  // table[c][i]: cost of the first i distinct values in c+1 clusters; split[c][i] the start
  // of the last cluster.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> table(clusters, std::vector<double>(n + 1, inf));
  std::vector<std::vector<std::size_t>> split(clusters, std::vector<std::size_t>(n + 1, 0));
  for (std::size_t i = 1; i <= n; ++i) table[0][i] = cost(0, i);
  for (std::size_t c = 1; c < clusters; ++c)
    detail::divide_conquer(cost, table[c - 1], table[c], split[c], c + 1, n, c, n - 1);

  std::vector<std::size_t> starts(clusters);
  std::size_t end = n;
  for (std::size_t c = clusters; c-- > 0;) {
    starts[c] = c == 0 ? 0 : split[c][end];
    end = starts[c];
  }

  KMeans1dResult out;
  out.sse = table[clusters - 1][n];
  std::vector<std::size_t> cluster_of(n);
  for (std::size_t c = 0; c < clusters; ++c) {
    const std::size_t b = starts[c];
    const std::size_t e = c + 1 < clusters ? starts[c + 1] : n;
    double center = xs[b];
    if (e - b > 1) {
      double s = 0.0, w = 0.0;
      for (std::size_t i = b; i < e; ++i) {
        s += ws[i] * xs[i];
        w += ws[i];
      }
      center = std::clamp(s / w, xs[b], xs[e - 1]);
    }
    out.centers.push_back(center);
    for (std::size_t i = b; i < e; ++i) cluster_of[i] = c;
  }
  out.assignment.reserve(values.size());
  for (double v : values) {
    auto pos = static_cast<std::size_t>(std::lower_bound(xs.begin(), xs.end(), v) - xs.begin());
    out.assignment.push_back(cluster_of[pos]);
  }
  return out;
}

inline std::vector<double> kmeans_1d(std::span<const double> values, std::size_t k) {
  return kmeans_1d_assign(values, k).centers;
}

}  // namespace forest_share
