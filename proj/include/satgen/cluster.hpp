#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "satgen/hapdata.hpp"
#include "satgen/rng.hpp"

namespace satgen::hap {

struct ClusterPlan {
  std::vector<std::vector<SampleIndex>> clusters;
  std::vector<std::size_t> usage_counts;
  std::size_t n = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const ClusterPlan&, const ClusterPlan&) = default;
};

namespace detail {

// Seed sample plus its n-1 nearest samples. Candidates are ranked by
// (tier, distance, random key); tier lets the caller push over-used samples
// behind everyone else without discarding similarity inside a tier.
inline std::vector<SampleIndex> fill_cluster(const AlleleMatrix& m, SampleIndex seed_sample, std::size_t n,
                                             std::span<const std::size_t> tier, Rng& rng) {
  const auto dist = distances_from(seed_sample, m);
  std::vector<std::tuple<std::size_t, std::size_t, std::uint64_t, SampleIndex>> ranked;
  ranked.reserve(m.samples());
  for (SampleIndex i = 0; i < m.samples(); ++i) {
    if (i == seed_sample) continue;
    ranked.emplace_back(tier.empty() ? 0 : tier[i], dist[i], rng(), i);
  }
  const std::size_t take = n - 1;
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(take), ranked.end());
  std::vector<SampleIndex> cluster{seed_sample};
  for (std::size_t k = 0; k < take; ++k) cluster.push_back(std::get<3>(ranked[k]));
  return cluster;
}

}  // namespace detail

// One cluster around a given seed: the seed and its n-1 nearest neighbours
// by Hamming distance, ties broken by the rng.
inline std::vector<SampleIndex> nearest_cluster(const AlleleMatrix& m, SampleIndex seed_sample, std::size_t n,
                                                std::uint64_t seed) {
  if (n < 1 || n > m.samples()) throw std::invalid_argument("cluster size must be in [1, M]");
  if (seed_sample >= m.samples()) throw std::out_of_range("seed sample out of range");
  Rng rng(derive_seed(seed, "tie-break", seed_sample));
  return detail::fill_cluster(m, seed_sample, n, {}, rng);
}

// k overlapping clusters of size n. Seeds are the least-used samples (ties in
// a seeded random order, which makes seeding round-robin once usage is
// level). Neighbours are filled nearest-first from samples whose usage is
// below the running fair share floor((c+1)n/M), then from progressively
// more-used tiers.
inline ClusterPlan build_clusters(const AlleleMatrix& m, std::size_t n, std::size_t k, std::uint64_t seed) {
  const std::size_t total = m.samples();
  if (n < 1) throw std::invalid_argument("cluster size must be at least 1");
  if (n > total) throw std::invalid_argument("cluster size exceeds sample count");
  if (k < 1) throw std::invalid_argument("cluster count must be at least 1");

  ClusterPlan plan;
  plan.n = n;
  plan.seed = seed;
  plan.usage_counts.assign(total, 0);
  Rng rng(derive_seed(seed, "clusters"));

  std::vector<std::uint64_t> order_key(total);
  std::vector<std::size_t> tier(total);
  for (std::size_t c = 0; c < k; ++c) {
    // Fresh random order each round so ties among equally-used samples are
    // not always resolved the same way.
    if (c % total == 0) {
      for (auto& key : order_key) key = rng();
    }
    SampleIndex seed_sample = 0;
    for (SampleIndex i = 1; i < total; ++i) {
      const auto ui = plan.usage_counts[i];
      const auto us = plan.usage_counts[seed_sample];
      if (ui < us || (ui == us && order_key[i] < order_key[seed_sample])) seed_sample = i;
    }
    const std::size_t share = std::max<std::size_t>(1, (c + 1) * n / total);
    for (std::size_t i = 0; i < total; ++i) {
      const auto u = plan.usage_counts[i];
      tier[i] = u < share ? 0 : u - share + 1;
    }
    auto cluster = detail::fill_cluster(m, seed_sample, n, tier, rng);
    for (SampleIndex i : cluster) ++plan.usage_counts[i];
    plan.clusters.push_back(std::move(cluster));
  }
  return plan;
}

}  // namespace satgen::hap
