#pragma once

// Minimum stabbing sets for half-open intervals [lower, upper):
//  - min_intset: greedy sweep over intervals sorted by lower bound (exact optimum);
//  - min_intset_wexc: dynamic program allowing up to c intervals to stay unstabbed.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace forest_share {

struct Interval {
  double lower = 0.0;
  double upper = 0.0;

  bool contains(double v) const { return lower <= v && v < upper; }
};

/// Distance from q to [lower, upper): zero inside, otherwise the gap to the nearer end.
inline double interval_distance(double q, const Interval& iv) {
  if (q < iv.lower) return iv.lower - q;
  if (q >= iv.upper) return q - iv.upper;
  return 0.0;
}

struct StabbingSolution {
  std::vector<double> points;                     // strictly ascending
  std::vector<std::vector<std::size_t>> groups;   // input indices served by each point
};

/// Point inside [lo, hi), lo < hi: the midpoint unless rounding lands it on hi.
inline double interior_midpoint(double lo, double hi) {
  double m = std::midpoint(lo, hi);
  return m < hi ? m : lo;
}

namespace detail {

inline void check_intervals(std::span<const Interval> intervals, const char* who) {
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const auto& iv = intervals[i];
    if (!std::isfinite(iv.lower) || !std::isfinite(iv.upper))
      throw std::invalid_argument(std::string(who) + ": interval " + std::to_string(i) + " has a non-finite bound");
    if (!(iv.lower < iv.upper))
      throw std::invalid_argument(std::string(who) + ": interval " + std::to_string(i) + " is empty (lower >= upper)");
  }
}

/// Indices sorted by lower, then upper, then index.
inline std::vector<std::size_t> order_by_lower(std::span<const Interval> intervals) {
  std::vector<std::size_t> order(intervals.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (intervals[a].lower != intervals[b].lower) return intervals[a].lower < intervals[b].lower;
    if (intervals[a].upper != intervals[b].upper) return intervals[a].upper < intervals[b].upper;
    return a < b;
  });
  return order;
}

}  // namespace detail

/// Minimum set of points hitting every interval.
///
/// Sweeps intervals by ascending lower bound keeping the running intersection
/// [lower_last, t); when the next lower bound reaches t the group is closed and its point
/// is the midpoint of the intersection.
inline StabbingSolution min_intset(std::span<const Interval> intervals) {
  if (intervals.empty()) throw std::invalid_argument("min_intset: empty interval list");
  detail::check_intervals(intervals, "min_intset");
  const auto order = detail::order_by_lower(intervals);

  StabbingSolution sol;
  double t = intervals[order[0]].upper;
  std::size_t begin = 0;
  auto close_group = [&](std::size_t end) {
    sol.points.push_back(interior_midpoint(intervals[order[end - 1]].lower, t));
    sol.groups.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(begin),
                            order.begin() + static_cast<std::ptrdiff_t>(end));
  };
  for (std::size_t j = 1; j < order.size(); ++j) {
    const Interval& iv = intervals[order[j]];
    if (iv.lower >= t) {
      close_group(j);
      begin = j;
      t = iv.upper;
    } else if (iv.upper < t) {
      t = iv.upper;
    }
  }
  close_group(order.size());
  return sol;
}

/// Dynamic program over intervals sorted by lower bound.
///
/// size(i, j) is the minimum number of points hitting all of sorted intervals i..p-1 except
/// at most j of them. For i + j >= p it is 0. Otherwise the smallest point s falls in one of
/// the slots below u_{alpha_i(h)}, where alpha_i(h) is the interval with the (h+1)-th smallest
/// upper bound among i..p-1; placing s just under that bound misses exactly the h intervals
/// ending earlier and leaves the suffix starting at beta(alpha_i(h)) = first interval with
/// lower >= u_{alpha_i(h)}:
///
///   size(i, j) = 1 + min_{h in H(i, j)} size(beta(alpha_i(h)), j - h)
///
/// H(i, j) keeps h = 0 and every h <= j whose beta strictly exceeds that of h - 1; other
/// slots are dominated by the first slot sharing their beta.
class ExceptionDp {
 public:
  struct Step {
    std::size_t next = 0;     // suffix start after this point
    std::size_t used = 0;     // exceptions consumed by the point (h)
    std::size_t bound = 0;    // sorted position of alpha_i(h)
  };

  ExceptionDp(std::span<const Interval> intervals, std::size_t budget)
      : intervals_(intervals.begin(), intervals.end()), c_(budget) {
    if (intervals_.empty()) throw std::invalid_argument("min_intset_wexc: empty interval list");
    if (intervals_.size() <= c_)
      throw std::invalid_argument("min_intset_wexc: need more intervals (" + std::to_string(intervals_.size()) +
                                  ") than allowed exceptions (" + std::to_string(c_) + ")");
    detail::check_intervals(intervals_, "min_intset_wexc");
    order_ = detail::order_by_lower(intervals_);
    run();
  }

  std::size_t interval_count() const { return order_.size(); }
  std::size_t budget() const { return c_; }

  /// Input index of the interval at sorted position i.
  std::size_t original_index(std::size_t i) const { return order_[i]; }
  const Interval& sorted(std::size_t i) const { return intervals_[order_[i]]; }

  std::size_t size(std::size_t i, std::size_t j) const { return size_[i * (c_ + 1) + j]; }
  const Step& step(std::size_t i, std::size_t j) const { return step_[i * (c_ + 1) + j]; }
  std::size_t beta(std::size_t i) const { return beta_[i]; }

  /// Rank of interval i by upper bound among i..p-1 (ties: i first), or budget()+1 when
  /// it is not among the budget()+1 smallest.
  std::size_t self_rank(std::size_t i) const { return self_rank_[i]; }

  /// Smallest budget achieving the optimum of the full budget.
  std::size_t tight_budget() const {
    std::size_t j = c_;
    while (j > 0 && size(0, j) == size(0, j - 1)) --j;
    return j;
  }

  StabbingSolution solve() const {
    const std::size_t p = order_.size();
    StabbingSolution sol;
    std::size_t i = 0;
    std::size_t j = tight_budget();
    while (i < p && size(i, j) > 0) {
      const Step& s = step(i, j);
      sol.points.push_back(interior_midpoint(sorted(s.next - 1).lower, sorted(s.bound).upper));
      i = s.next;
      j -= s.used;
    }
    sol.groups.resize(sol.points.size());
    for (std::size_t idx = 0; idx < intervals_.size(); ++idx)
      sol.groups[nearest_point(sol.points, intervals_[idx])].push_back(idx);
    return sol;
  }

 private:
  // Smallest-index containing point if any, else the nearest one (ties to the smaller index).
  static std::size_t nearest_point(const std::vector<double>& points, const Interval& iv) {
    auto it = std::lower_bound(points.begin(), points.end(), iv.lower);
    const auto above = static_cast<std::size_t>(it - points.begin());
    if (it != points.end() && *it < iv.upper) return above;
    if (above == 0) return 0;
    if (above == points.size()) return points.size() - 1;
    const double below_gap = interval_distance(points[above - 1], iv);
    const double above_gap = interval_distance(points[above], iv);
    return above_gap < below_gap ? above : above - 1;
  }

  void run() {
    const std::size_t p = order_.size();
    const std::size_t w = c_ + 1;
    size_.assign((p + 1) * w, 0);
    step_.assign((p + 1) * w, Step{p, 0, 0});
    self_rank_.assign(p, w);

    std::vector<double> lowers(p);
    for (std::size_t i = 0; i < p; ++i) lowers[i] = sorted(i).lower;
    beta_.resize(p);
    for (std::size_t i = 0; i < p; ++i)
      beta_[i] = static_cast<std::size_t>(std::lower_bound(lowers.begin(), lowers.end(), sorted(i).upper) -
                                          lowers.begin());

    // alpha holds the sorted positions of the c+1 smallest upper bounds among i..p-1.
    std::vector<std::size_t> alpha;
    alpha.reserve(w + 1);
    std::vector<std::size_t> slots;
    for (std::size_t ii = p; ii-- > 0;) {
      const double u = sorted(ii).upper;
      auto pos = std::lower_bound(alpha.begin(), alpha.end(), u,
                                  [&](std::size_t a, double v) { return sorted(a).upper < v; });
      const auto rank = static_cast<std::size_t>(pos - alpha.begin());
      if (rank < w) {
        alpha.insert(pos, ii);
        if (alpha.size() > w) alpha.pop_back();
        self_rank_[ii] = rank;
      }

      slots.clear();
      for (std::size_t h = 0; h < alpha.size(); ++h)
        if (h == 0 || beta_[alpha[h - 1]] < beta_[alpha[h]]) slots.push_back(h);

      for (std::size_t j = 0; j < w; ++j) {
        if (ii + j >= p) continue;  // at most j intervals remain: zero points
        std::size_t best = std::numeric_limits<std::size_t>::max();
        Step best_step{};
        for (std::size_t h : slots) {
          if (h > j) break;
          const std::size_t next = beta_[alpha[h]];
          const std::size_t cand = size(next, j - h) + 1;
          if (cand < best) {
            best = cand;
            best_step = {next, h, alpha[h]};
          }
        }
        size_[ii * w + j] = best;
        step_[ii * w + j] = best_step;
      }
    }
  }

  std::vector<Interval> intervals_;
  std::size_t c_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> beta_;
  std::vector<std::size_t> self_rank_;
  std::vector<std::size_t> size_;
  std::vector<Step> step_;
};

/// Minimum set of points hitting all but at most c intervals (requires p > c). Every interval
/// is grouped with its nearest point.
inline StabbingSolution min_intset_wexc(std::span<const Interval> intervals, std::size_t c) {
  return ExceptionDp(intervals, c).solve();
}

}  // namespace forest_share
