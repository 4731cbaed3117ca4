// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <bit>
#include <chrono>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "test_support.hpp"

namespace fsh = forest_share;
using fsh::testing::CartFixture;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(const char* id, const char* title, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass) ++failures;
  std::printf("%s %s: %s (%s; %.2fs)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

// The 50 CART fixtures shared by the forest-level criteria.
const std::vector<CartFixture>& cart_fixtures() {
  static const std::vector<CartFixture> all = [] {
    std::vector<CartFixture> out;
    fsh::Rng rng(20240601);
    for (std::uint64_t i = 0; i < 50; ++i) {
      const std::size_t n = 50 + fsh::uniform_index(rng, 451);
      const std::size_t d = 1 + fsh::uniform_index(rng, 8);
      const std::size_t depth = 2 + fsh::uniform_index(rng, 5);
      const auto task = i % 5 == 4 ? fsh::Task::regression : fsh::Task::classification;
      out.push_back(fsh::testing::cart_fixture(1000 + i, n, d, 20, depth, task));
    }
    return out;
  }();
  return all;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
  return true;
}

fsh::SharingConfig make_config(fsh::Method m, double sigma = 0.0, double ratio = 0.0) {
  fsh::SharingConfig c;
  c.method = m;
  c.sigma = sigma;
  c.exception_ratio = ratio;
  return c;
}

Outcome greedy_optimality() {
  const auto start = std::chrono::steady_clock::now();
  fsh::Rng rng(1);
  std::size_t mismatches = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t p = 1 + fsh::uniform_index(rng, 12);
    const auto ivs = fsh::testing::random_intervals(rng, p, 24);
    mismatches += fsh::min_intset(ivs).points.size() != fsh::oracle::min_intset_brute(ivs, p);
  }
  const double t = seconds_since(start);
  return {mismatches == 0 && t < 10.0,
          "1000 instances, p<=12, mismatches=" + std::to_string(mismatches) + ", " + std::to_string(t) + "s < 10s"};
}

Outcome dp_optimality() {
  const auto start = std::chrono::steady_clock::now();
  fsh::Rng rng(2);
  std::size_t mismatches = 0;
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t p = 1 + fsh::uniform_index(rng, 10);
    const std::size_t c = fsh::uniform_index(rng, std::min<std::size_t>(3, p - 1) + 1);
    const auto ivs = fsh::testing::random_intervals(rng, p, 20);
    mismatches += fsh::min_intset_wexc(ivs, c).points.size() != fsh::oracle::min_intset_wexc_brute(ivs, c);
  }
  const double t = seconds_since(start);
  return {mismatches == 0 && t < 30.0, "500 instances, p<=10, c<=3, mismatches=" + std::to_string(mismatches) +
                                           ", " + std::to_string(t) + "s < 30s"};
}

Outcome example1() {
  const fsh::Forest f = fsh::fixtures::example1_forest();
  const fsh::Dataset data = fsh::fixtures::example1_dataset();
  const auto res = fsh::min_dbn(f, data, make_config(fsh::Method::exact));
  const std::size_t before = fsh::count_distinct_conditions(f);
  const std::size_t after = fsh::count_distinct_conditions(res.forest);
  const std::size_t violations = fsh::verify_path_invariance(f, res.forest, data).size();
  return {before == 4 && after == 2 && violations == 0, "NDC " + std::to_string(before) + " -> " +
                                                            std::to_string(after) + ", violations " +
                                                            std::to_string(violations)};
}

Outcome exactness() {
  std::size_t violations = 0, prediction_diffs = 0, sr_over = 0, brute_checked = 0, brute_mismatch = 0;
  for (const auto& fx : cart_fixtures()) {
    const auto res = fsh::min_dbn(fx.forest, fx.data, make_config(fsh::Method::exact));
    violations += fsh::verify_path_invariance(fx.forest, res.forest, fx.data).size();
    prediction_diffs += !same_bits(fsh::predict_all(fx.forest, fx.data), fsh::predict_all(res.forest, fx.data));
    const auto rep = fsh::build_report(fx.forest, res.forest, fx.data, nullptr, make_config(fsh::Method::exact));
    sr_over += rep.size_ratio && *rep.size_ratio > 1.0;
    for (const auto& sol : res.solutions) {
      if (sol.intervals.size() > 12) continue;
      ++brute_checked;
      const auto plain = fsh::detail::plain_intervals(sol.intervals);
      brute_mismatch += sol.points.size() != fsh::oracle::min_intset_brute(plain, plain.size());
    }
  }
  const bool ok = violations == 0 && prediction_diffs == 0 && sr_over == 0 && brute_mismatch == 0;
  return {ok, "50 fixtures: violations=" + std::to_string(violations) + ", prediction diffs=" +
                  std::to_string(prediction_diffs) + ", SR>1=" + std::to_string(sr_over) + ", brute checks=" +
                  std::to_string(brute_checked) + " mismatches=" + std::to_string(brute_mismatch)};
}

Outcome sigma_soundness() {
  const std::vector<double> sigmas{0.0, 0.1, 0.3, 0.5};
  std::size_t over_budget = 0, non_monotone = 0;
  for (const auto& fx : cart_fixtures()) {
    const fsh::NodeOccupancy occ = fsh::route(fx.forest, fx.data);
    std::size_t prev = std::numeric_limits<std::size_t>::max();
    for (double s : sigmas) {
      const auto cfg = s == 0.0 ? make_config(fsh::Method::exact) : make_config(fsh::Method::sigma, s);
      const auto res = fsh::min_dbn(fx.forest, fx.data, cfg);
      const auto flips = fsh::node_flip_counts(fx.forest, res.forest, fx.data, occ);
      for (std::size_t t = 0; t < flips.size(); ++t)
        for (std::size_t h = 0; h < flips[t].size(); ++h)
          over_budget += flips[t][h] > fsh::allowed_flips(s, occ.rows(t, h).size());
      const std::size_t ndc = fsh::count_distinct_conditions(res.forest);
      non_monotone += ndc > prev;
      prev = ndc;
    }
  }
  return {over_budget == 0 && non_monotone == 0, "sigma in {0,.1,.3,.5}: nodes over budget=" +
                                                     std::to_string(over_budget) + ", NDC increases=" +
                                                     std::to_string(non_monotone)};
}

Outcome exception_monotonicity() {
  const std::vector<double> ratios{0.0, 0.1, 0.3, 0.5};
  std::size_t non_monotone = 0, zero_diffs = 0;
  for (const auto& fx : cart_fixtures()) {
    const auto exact = fsh::min_dbn(fx.forest, fx.data, make_config(fsh::Method::exact));
    std::size_t prev = std::numeric_limits<std::size_t>::max();
    for (double r : ratios) {
      const auto res = fsh::min_dbn_wexc(fx.forest, fx.data, make_config(fsh::Method::exceptions, 0.0, r));
      if (r == 0.0) zero_diffs += !fsh::testing::bit_identical(res.forest, exact.forest);
      const std::size_t ndc = fsh::count_distinct_conditions(res.forest);
      non_monotone += ndc > prev;
      prev = ndc;
    }
  }
  return {non_monotone == 0 && zero_diffs == 0, "ratio in {0,.1,.3,.5}: NDC increases=" +
                                                    std::to_string(non_monotone) + ", ratio-0 diffs vs exact=" +
                                                    std::to_string(zero_diffs)};
}

Outcome r_squared_values() {
  const std::vector<double> y{1, 2, 3};
  const double a = fsh::r_squared(y, std::vector<double>{1, 2, 3});
  const double b = fsh::r_squared(y, std::vector<double>{2, 2, 2});
  const double c = fsh::r_squared(y, std::vector<double>{3, 2, 1});
  return {a == 1.0 && b == 0.0 && c == -3.0,
          "got " + fsh::format_double(a) + ", " + fsh::format_double(b) + ", " + fsh::format_double(c)};
}

}  // namespace

int main() {
  report("A1", "greedy stabbing matches brute force", greedy_optimality);
  report("A2", "exception DP matches brute force", dp_optimality);
  report("A3", "Example-1 golden NDC 4 -> 2", example1);
  report("A4", "exact sharing preserves every path", exactness);
  report("A5", "sigma flips bounded, NDC non-increasing", sigma_soundness);
  report("A6", "exception ratio monotone, ratio 0 equals exact", exception_monotonicity);
  report("A7", "r_squared reference values", r_squared_values);
  std::printf("%d of 7 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
