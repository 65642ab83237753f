#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "satgen/hapdata.hpp"
#include "satgen/parallel.hpp"
#include "satgen/rng.hpp"

namespace satgen::priv {

using hap::AlleleMatrix;
using hap::SampleIndex;
using hap::TokenId;

// ------------------------------------------------------- attribute inference

// Builds a synthetic cohort from a real one; the seed makes it reproducible.
using GeneratorFn = std::function<AlleleMatrix(const AlleleMatrix& input, std::uint64_t seed)>;

struct AttrInferenceReport {
  double in_distance = 0;   // median nearest-synthetic distance, target was an input
  double out_distance = 0;  // same, target was held out
  double difference = 0;    // out - in
  std::size_t targets = 0;
  std::size_t sites = 0;
  std::uint64_t seed = 0;
};

inline double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of an empty list");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : (v[h - 1] + v[h]) / 2.0;
}

// Token strings must match site by site; ids may differ between matrices.
inline void require_same_sites(const AlleleMatrix& a, const AlleleMatrix& b) {
  if (a.sites() != b.sites()) throw std::invalid_argument("cohorts have different site counts");
}

// Hamming distance to the closest synthetic record, divided by the site count.
inline double nearest_distance(const AlleleMatrix& real, SampleIndex target, const AlleleMatrix& synth) {
  require_same_sites(real, synth);
  std::vector<std::size_t> dist(synth.samples(), 0);
  for (std::size_t j = 0; j < real.sites(); ++j) {
    const auto& tok = real.token(j, real.at(j, target));
    const auto id = synth.find_token(j, tok);
    const auto row = synth.row(j);
    for (std::size_t i = 0; i < row.size(); ++i) dist[i] += !id || row[i] != *id;
  }
  const auto best = *std::min_element(dist.begin(), dist.end());
  return static_cast<double>(best) / static_cast<double>(real.sites());
}

// Each half's samples are scored against the synthetic set built from their
// own half (in) and from the other half (out).
inline AttrInferenceReport attr_inference_from(const AlleleMatrix& half_a, const AlleleMatrix& half_b,
                                               const AlleleMatrix& synth_a, const AlleleMatrix& synth_b) {
  std::vector<double> in, out;
  auto score = [&](const AlleleMatrix& half, const AlleleMatrix& own, const AlleleMatrix& other) {
    for (SampleIndex i = 0; i < half.samples(); ++i) {
      in.push_back(nearest_distance(half, i, own));
      out.push_back(nearest_distance(half, i, other));
    }
  };
  score(half_a, synth_a, synth_b);
  score(half_b, synth_b, synth_a);
  AttrInferenceReport rep;
  rep.in_distance = median(in);
  rep.out_distance = median(out);
  rep.difference = rep.out_distance - rep.in_distance;
  rep.targets = in.size();
  rep.sites = half_a.sites();
  return rep;
}

inline AttrInferenceReport attr_inference_experiment(const AlleleMatrix& m, const GeneratorFn& generate,
                                                     std::uint64_t seed) {
  if (m.samples() < 4) throw std::invalid_argument("attribute inference needs at least 4 samples");
  const auto [a, b] = hap::split_cohort(m, derive_seed(seed, "attr-split"));
  const auto synth_a = generate(a, derive_seed(seed, "attr-generate", 0));
  const auto synth_b = generate(b, derive_seed(seed, "attr-generate", 1));
  auto rep = attr_inference_from(a, b, synth_a, synth_b);
  rep.seed = seed;
  return rep;
}

// Distance from (in, out - in) to the ideal point (0, 0).
inline double frontier_distance(double in_distance, double difference) {
  return std::sqrt(in_distance * in_distance + difference * difference);
}

inline double frontier_distance(const AttrInferenceReport& r) { return frontier_distance(r.in_distance, r.difference); }

// ------------------------------------------------------------------ k-tuples

enum class TupleClass { private_tuple, fictitious, common };

inline const char* to_string(TupleClass c) {
  switch (c) {
    case TupleClass::private_tuple: return "private";
    case TupleClass::fictitious: return "fictitious";
    case TupleClass::common: return "common";
  }
  return "?";
}

struct KTuple {
  std::vector<std::size_t> positions;  // ascending, distinct
  std::vector<TokenId> tokens;         // cohort token ids, parallel to positions
  TupleClass cls = TupleClass::common;

  std::size_t k() const noexcept { return positions.size(); }
  friend bool operator==(const KTuple&, const KTuple&) = default;
};

// Number of cohort samples carrying every (position, token) pair, capped at 2.
inline std::size_t holders(const AlleleMatrix& m, const std::vector<std::size_t>& positions,
                           const std::vector<TokenId>& tokens) {
  std::size_t found = 0;
  for (SampleIndex i = 0; i < m.samples() && found < 2; ++i) {
    bool all = true;
    for (std::size_t p = 0; p < positions.size() && all; ++p) all = m.at(positions[p], i) == tokens[p];
    found += all;
  }
  return found;
}

inline TupleClass classify(const AlleleMatrix& m, const std::vector<std::size_t>& positions,
                           const std::vector<TokenId>& tokens) {
  switch (holders(m, positions, tokens)) {
    case 0: return TupleClass::fictitious;
    case 1: return TupleClass::private_tuple;
    default: return TupleClass::common;
  }
}

enum class TokenProposal { mixed, individual, independent };

struct KTupleSampling {
  std::vector<KTuple> tuples;
  std::size_t proposals = 0;
  bool exhausted = false;  // budget ran out before `count` tuples were found
};

// Rejection sampling of tuples of the requested class. Positions are uniform
// without replacement; tokens are copied from a random sample (individual),
// drawn per site from the alphabet (independent), or either with equal odds.
inline KTupleSampling sample_ktuples(const AlleleMatrix& m, std::size_t k, TupleClass cls, std::size_t count,
                                     std::uint64_t seed, TokenProposal proposal = TokenProposal::mixed,
                                     std::size_t budget = 0) {
  if (k < 1 || k > m.sites()) throw std::invalid_argument("tuple order must be in [1, S]");
  if (cls == TupleClass::common) throw std::invalid_argument("only private or fictitious tuples can be sampled");
  if (budget == 0) budget = std::max<std::size_t>(count * 1000, 100000);
  Rng rng(derive_seed(seed, "ktuple", k));
  KTupleSampling out;
  std::vector<std::size_t> positions;
  std::vector<TokenId> tokens(k);
  while (out.tuples.size() < count) {
    if (out.proposals >= budget) {
      out.exhausted = true;
      break;
    }
    ++out.proposals;
    positions.clear();
    while (positions.size() < k) {
      const std::size_t p = rng.below(m.sites());
      if (std::find(positions.begin(), positions.end(), p) == positions.end()) positions.push_back(p);
    }
    std::sort(positions.begin(), positions.end());
    const bool copy = proposal == TokenProposal::individual || (proposal == TokenProposal::mixed && rng.coin());
    if (copy) {
      const auto s = rng.below(m.samples());
      for (std::size_t p = 0; p < k; ++p) tokens[p] = m.at(positions[p], s);
    } else {
      for (std::size_t p = 0; p < k; ++p) tokens[p] = static_cast<TokenId>(rng.below(m.alphabet(positions[p]).size()));
    }
    if (classify(m, positions, tokens) == cls) out.tuples.push_back({positions, tokens, cls});
  }
  return out;
}

enum class Occurrence { pooled, per_dataset };

struct RevelationReport {
  double private_rate = 0;
  double fictitious_rate = 0;
  std::size_t private_sampled = 0;
  std::size_t fictitious_sampled = 0;
  std::size_t corpus_datasets = 0;
  std::size_t corpus_records = 0;
};

// Whether some record of `d` carries every pair of the tuple. Token ids are
// translated through the cohort's token strings.
inline bool occurs_in(const KTuple& t, const AlleleMatrix& cohort, const AlleleMatrix& d) {
  if (d.sites() != cohort.sites()) throw std::invalid_argument("corpus dataset has a different site count");
  std::vector<TokenId> ids(t.k());
  for (std::size_t p = 0; p < t.k(); ++p) {
    const auto id = d.find_token(t.positions[p], cohort.token(t.positions[p], t.tokens[p]));
    if (!id) return false;
    ids[p] = *id;
  }
  for (SampleIndex i = 0; i < d.samples(); ++i) {
    bool all = true;
    for (std::size_t p = 0; p < t.k() && all; ++p) all = d.at(t.positions[p], i) == ids[p];
    if (all) return true;
  }
  return false;
}

// Per class: the fraction of tuples found in the pooled corpus, or the mean
// over datasets of the fraction found in each dataset.
inline RevelationReport revelation_rates(const std::vector<KTuple>& tuples, const AlleleMatrix& cohort,
                                         const std::vector<AlleleMatrix>& corpus,
                                         Occurrence mode = Occurrence::pooled, unsigned threads = 1) {
  RevelationReport rep;
  rep.corpus_datasets = corpus.size();
  for (const auto& d : corpus) rep.corpus_records += d.samples();
  std::vector<double> score(tuples.size(), 0.0);
  parallel_for(tuples.size(), threads, [&](std::size_t i) {
    if (corpus.empty()) return;
    std::size_t hits = 0;
    for (const auto& d : corpus) {
      if (occurs_in(tuples[i], cohort, d)) {
        ++hits;
        if (mode == Occurrence::pooled) break;
      }
    }
    score[i] = mode == Occurrence::pooled ? (hits > 0 ? 1.0 : 0.0)
                                          : static_cast<double>(hits) / static_cast<double>(corpus.size());
  });
  double priv = 0, fict = 0;
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    if (tuples[i].cls == TupleClass::private_tuple) {
      priv += score[i];
      ++rep.private_sampled;
    } else if (tuples[i].cls == TupleClass::fictitious) {
      fict += score[i];
      ++rep.fictitious_sampled;
    }
  }
  if (rep.private_sampled) rep.private_rate = priv / static_cast<double>(rep.private_sampled);
  if (rep.fictitious_sampled) rep.fictitious_rate = fict / static_cast<double>(rep.fictitious_sampled);
  return rep;
}

}  // namespace satgen::priv
