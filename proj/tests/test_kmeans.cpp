#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "test_support.hpp"

namespace forest_share {
namespace {

// Minimum SSE over every assignment of values to at most k labels.
double brute_sse(const std::vector<double>& values, std::size_t k) {
  const std::size_t n = values.size();
  std::vector<std::size_t> label(n, 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    std::vector<double> sum(k, 0.0), cnt(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      sum[label[i]] += values[i];
      cnt[label[i]] += 1.0;
    }
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double m = sum[label[i]] / cnt[label[i]];
      sse += (values[i] - m) * (values[i] - m);
    }
    best = std::min(best, sse);
    std::size_t pos = 0;
    while (pos < n && ++label[pos] == k) label[pos++] = 0;
    if (pos == n) break;
  }
  return best;
}

double sse_of(const std::vector<double>& values, const KMeans1dResult& r) {
  double sse = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - r.centers[r.assignment[i]];
    sse += d * d;
  }
  return sse;
}

TEST(KMeans1d, SingleValueKeepsIt) {
  const std::vector<double> v{5.0};
  EXPECT_EQ(kmeans_1d(v, 3), std::vector<double>{5.0});
}

TEST(KMeans1d, TwoObviousClusters) {
  const std::vector<double> v{1, 2, 10, 11};
  const auto r = kmeans_1d_assign(v, 2);
  EXPECT_EQ(r.centers, (std::vector<double>{1.5, 10.5}));
  EXPECT_EQ(r.assignment, (std::vector<std::size_t>{0, 0, 1, 1}));
  EXPECT_DOUBLE_EQ(r.sse, 1.0);
  EXPECT_DOUBLE_EQ(brute_sse(v, 2), 1.0);
}

TEST(KMeans1d, OneClusterIsTheMean) {
  const std::vector<double> v{1, 2, 3, 10};
  EXPECT_EQ(kmeans_1d(v, 1), std::vector<double>{4.0});
}

TEST(KMeans1d, RepeatedValuesWeightTheMean) {
  const std::vector<double> v{0, 0, 0, 4, 100};
  const auto r = kmeans_1d_assign(v, 2);
  EXPECT_EQ(r.centers, (std::vector<double>{1.0, 100.0}));
}

TEST(KMeans1d, MoreClustersThanDistinctValues) {
  const std::vector<double> v{3, 3, 7};
  const auto r = kmeans_1d_assign(v, 5);
  EXPECT_EQ(r.centers, (std::vector<double>{3.0, 7.0}));
  EXPECT_EQ(r.sse, 0.0);
}

TEST(KMeans1d, RejectsBadInput) {
  EXPECT_THROW(kmeans_1d(std::vector<double>{}, 2), std::invalid_argument);
  EXPECT_THROW(kmeans_1d(std::vector<double>{1.0}, 0), std::invalid_argument);
}

TEST(KMeans1d, OptimalAgainstBruteForce) {
  Rng rng(3);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + uniform_index(rng, 7);
    const std::size_t k = 1 + uniform_index(rng, 4);
    std::vector<double> v(n);
    for (auto& x : v) x = static_cast<double>(uniform_index(rng, 12));
    const auto r = kmeans_1d_assign(v, k);
    EXPECT_NEAR(r.sse, brute_sse(v, k), 1e-9) << "rep " << rep;
    EXPECT_NEAR(sse_of(v, r), r.sse, 1e-9);
    for (std::size_t c = 1; c < r.centers.size(); ++c) EXPECT_LT(r.centers[c - 1], r.centers[c]);
  }
}

}  // namespace
}  // namespace forest_share
