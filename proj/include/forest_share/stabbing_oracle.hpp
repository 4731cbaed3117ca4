#pragma once

// Exhaustive reference solvers for small stabbing instances. Used by the test suites only.
//
// Candidate points are the lower bounds: any stabbing point can slide right to the largest
// lower bound among the intervals it hits without leaving any of them.

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "forest_share/stabbing.hpp"

namespace forest_share::oracle {

namespace detail {

// Calls f(mask) for every k-subset of n items; stops when f returns true.
template <typename F>
bool for_each_combination(std::size_t n, std::size_t k, F&& f) {
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  if (k > n) return false;
  while (true) {
    if (f(idx)) return true;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return false;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace detail

/// Smallest k such that some k lower bounds hit every interval. Throws past size_cap.
inline std::size_t min_intset_brute(std::span<const Interval> intervals, std::size_t size_cap) {
  const std::size_t p = intervals.size();
  if (p == 0) return 0;
  if (p > 63) throw std::invalid_argument("min_intset_brute: too many intervals");
  std::vector<std::uint64_t> hits(p, 0);
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = 0; b < p; ++b)
      if (intervals[b].contains(intervals[a].lower)) hits[a] |= std::uint64_t{1} << b;
  const std::uint64_t full = p == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << p) - 1;

  for (std::size_t k = 1; k <= size_cap && k <= p; ++k) {
    bool found = detail::for_each_combination(p, k, [&](const std::vector<std::size_t>& pick) {
      std::uint64_t mask = 0;
      for (std::size_t a : pick) mask |= hits[a];
      return mask == full;
    });
    if (found) return k;
  }
  throw std::runtime_error("min_intset_brute: size cap exceeded");
}

/// min over every exception set E with |E| <= c of min_intset_brute(intervals \ E).
inline std::size_t min_intset_wexc_brute(std::span<const Interval> intervals, std::size_t c) {
  const std::size_t p = intervals.size();
  std::size_t best = min_intset_brute(intervals, p);
  for (std::size_t e = 1; e <= c && e <= p; ++e) {
    detail::for_each_combination(p, e, [&](const std::vector<std::size_t>& drop) {
      std::vector<Interval> rest;
      std::size_t next = 0;
      for (std::size_t i = 0; i < p; ++i) {
        if (next < drop.size() && drop[next] == i) {
          ++next;
          continue;
        }
        rest.push_back(intervals[i]);
      }
      best = std::min(best, min_intset_brute(rest, p));
      return false;
    });
  }
  return best;
}

}  // namespace forest_share::oracle
