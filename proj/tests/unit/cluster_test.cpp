#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "satgen/cluster.hpp"
#include "support/oracles.hpp"

namespace satgen::hap {
namespace {

TEST(Clusters, WholeCohortAndSingletons) {
  Rng rng(1);
  const auto m = testing::random_binary_cohort(rng, 8, 6);
  const auto all = build_clusters(m, 6, 1, 3);
  ASSERT_EQ(all.clusters.size(), 1u);
  EXPECT_EQ(std::set<SampleIndex>(all.clusters[0].begin(), all.clusters[0].end()).size(), 6u);
  const auto singles = build_clusters(m, 1, 6, 3);
  std::set<SampleIndex> seen;
  for (const auto& c : singles.clusters) {
    ASSERT_EQ(c.size(), 1u);
    seen.insert(c[0]);
  }
  EXPECT_EQ(seen.size(), 6u);
}

TEST(Clusters, WorkedExampleNearestNeighbour) {
  const auto m = testing::worked_example_cohort();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto c = nearest_cluster(m, 0, 2, seed);
    std::sort(c.begin(), c.end());
    EXPECT_EQ(c, (std::vector<SampleIndex>{0, 3}));
  }
}

TEST(Clusters, Errors) {
  const auto m = testing::worked_example_cohort();
  EXPECT_THROW(build_clusters(m, 6, 1, 0), std::invalid_argument);
  EXPECT_THROW(build_clusters(m, 0, 1, 0), std::invalid_argument);
  EXPECT_THROW(build_clusters(m, 2, 0, 0), std::invalid_argument);
}

TEST(Clusters, CoverageAndBalanceProperties) {
  Rng rng(2);
  for (int iter = 0; iter < 60; ++iter) {
    const std::size_t total = 4 + rng.below(30);
    const std::size_t n = 1 + rng.below(total);
    const std::size_t k = 1 + rng.below(3 * total);
    const auto m = testing::random_binary_cohort(rng, 10, total);
    const auto plan = build_clusters(m, n, k, static_cast<std::uint64_t>(iter));
    ASSERT_EQ(plan.clusters.size(), k);
    std::vector<std::size_t> usage(total, 0);
    for (const auto& c : plan.clusters) {
      ASSERT_EQ(c.size(), n);
      ASSERT_EQ(std::set<SampleIndex>(c.begin(), c.end()).size(), n);
      for (auto i : c) ++usage[i];
    }
    EXPECT_EQ(usage, plan.usage_counts);
    const auto lo = *std::min_element(usage.begin(), usage.end());
    if (k >= (total + n - 1) / n) {
      EXPECT_GE(lo, 1u) << "M=" << total << " N=" << n << " k=" << k;
    }
    if (k >= total) {
      EXPECT_GE(lo + 1, k * n / total);
    }
    EXPECT_EQ(build_clusters(m, n, k, static_cast<std::uint64_t>(iter)), plan);
  }
}

TEST(Clusters, NeighboursAreNearestWithinTier) {
  Rng rng(3);
  const auto m = testing::random_binary_cohort(rng, 12, 20);
  for (SampleIndex s = 0; s < 20; ++s) {
    const auto c = nearest_cluster(m, s, 5, 1);
    EXPECT_EQ(c[0], s);
    const auto d = distances_from(s, m);
    std::size_t worst_in = 0;
    for (auto i : c) worst_in = std::max(worst_in, d[i]);
    for (SampleIndex i = 0; i < 20; ++i) {
      if (std::find(c.begin(), c.end(), i) == c.end()) {
        EXPECT_GE(d[i], worst_in);
      }
    }
  }
}

}  // namespace
}  // namespace satgen::hap
