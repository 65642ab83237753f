#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "satgen/cluster.hpp"
#include "satgen/error.hpp"
#include "satgen/hapdata.hpp"
#include "satgen/parallel.hpp"
#include "satgen/rng.hpp"
#include "satgen/sat.hpp"
#include "satgen/sat_solver.hpp"

namespace satgen::gen {

using hap::AlleleMatrix;
using hap::SampleIndex;
using hap::TokenId;

// One allele query: "has token at site" (positive) or "does not have it".
struct Query {
  std::uint32_t site = 0;
  TokenId token = 0;
  bool positive = true;

  friend bool operator==(const Query&, const Query&) = default;
};

// Unique signatures of a cluster in lexicographic order (F < T, member 0
// first). Bits are packed big-endian inside each word so comparing word
// arrays numerically is the same as comparing bit strings.
struct SignatureTable {
  std::size_t width = 0;  // distinct cluster columns = bits per signature
  std::size_t words = 0;
  std::vector<SampleIndex> members;  // cohort indices of the distinct columns, first occurrence kept
  std::vector<std::uint64_t> data;   // size() * words
  std::vector<std::vector<std::uint32_t>> positive;  // [site][token] -> signature index
  std::vector<std::vector<std::uint32_t>> negative;
  std::size_t n = 0;                   // variables, set by map_variables
  std::vector<sat::Literal> literals;  // f(s) by signature index

  std::size_t size() const noexcept { return words == 0 ? 0 : data.size() / words; }

  std::span<const std::uint64_t> signature(std::size_t i) const {
    return {data.data() + i * words, words};
  }

  bool bit(std::size_t i, std::size_t member) const {
    return (data[i * words + member / 64] >> (63 - member % 64)) & 1u;
  }

  // "TFFTT"-style rendering.
  std::string render(std::size_t i) const {
    std::string s(width, 'F');
    for (std::size_t k = 0; k < width; ++k) {
      if (bit(i, k)) s[k] = 'T';
    }
    return s;
  }

  std::size_t index_of(const Query& q) const {
    return (q.positive ? positive : negative).at(q.site).at(q.token);
  }

  sat::Literal literal_of(const Query& q) const { return literals.at(index_of(q)); }

  // Positive-query signature indices of one site, in alphabet order.
  const std::vector<std::uint32_t>& at_least_one_group(std::size_t site) const { return positive.at(site); }

  // Every query whose signature is the given one.
  std::vector<Query> origins(std::size_t index) const {
    std::vector<Query> out;
    for (std::uint32_t j = 0; j < positive.size(); ++j) {
      for (TokenId t = 0; t < positive[j].size(); ++t) {
        if (positive[j][t] == index) out.push_back({j, t, true});
        if (negative[j][t] == index) out.push_back({j, t, false});
      }
    }
    return out;
  }
};

namespace detail {

// Keeps the first occurrence of each distinct column.
inline std::vector<SampleIndex> distinct_columns(const AlleleMatrix& m, std::span<const SampleIndex> cluster) {
  std::vector<std::vector<TokenId>> seen;
  std::vector<SampleIndex> out;
  for (SampleIndex s : cluster) {
    if (s >= m.samples()) throw std::out_of_range("cluster member out of range");
    auto col = m.column(s);
    if (std::find(seen.begin(), seen.end(), col) == seen.end()) {
      seen.push_back(std::move(col));
      out.push_back(s);
    }
  }
  return out;
}

struct FlatHash {
  const std::vector<std::uint64_t>* data;
  std::size_t words;
  std::size_t operator()(std::uint32_t i) const noexcept {
    std::uint64_t h = 0x51ed270b27f3a4c5ULL;
    for (std::size_t w = 0; w < words; ++w) h = mix64(h ^ (*data)[i * words + w]);
    return static_cast<std::size_t>(h);
  }
};

struct FlatEq {
  const std::vector<std::uint64_t>* data;
  std::size_t words;
  bool operator()(std::uint32_t a, std::uint32_t b) const noexcept {
    return std::equal(data->begin() + static_cast<std::ptrdiff_t>(a * words),
                      data->begin() + static_cast<std::ptrdiff_t>((a + 1) * words),
                      data->begin() + static_cast<std::ptrdiff_t>(b * words));
  }
};

}  // namespace detail

// Pair threshold z = floor(u * z_max) with u uniform in [0, 1), keyed by
// (seed, a, b) so the draw does not depend on scan order. z_max <= 1 gives 0.
inline std::size_t draw_z(double z_max, std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  if (!(z_max > 1.0)) return 0;
  const double u = unit_double(mix64(mix64(seed ^ 0x7a5eedULL) + mix64(a * 0x9e3779b97f4a7c15ULL + b)));
  return static_cast<std::size_t>(std::floor(u * z_max));
}

inline SignatureTable build_signatures(const AlleleMatrix& m, std::span<const SampleIndex> cluster) {
  if (cluster.empty()) throw std::invalid_argument("cluster must have at least one member");
  SignatureTable t;
  t.members = detail::distinct_columns(m, cluster);
  t.width = t.members.size();
  t.words = (t.width + 63) / 64;
  const std::size_t words = t.words;
  std::vector<std::uint64_t> mask(words, ~std::uint64_t{0});
  if (t.width % 64 != 0) mask.back() = ~std::uint64_t{0} << (64 - t.width % 64);

  std::vector<std::uint64_t> raw;
  detail::FlatHash hash{&raw, words};
  detail::FlatEq eq{&raw, words};
  std::unordered_set<std::uint32_t, detail::FlatHash, detail::FlatEq> index(64, hash, eq);
  auto intern = [&](const std::uint64_t* bits) -> std::uint32_t {
    const auto id = static_cast<std::uint32_t>(raw.size() / words);
    raw.insert(raw.end(), bits, bits + words);
    auto [it, inserted] = index.insert(id);
    if (!inserted) raw.resize(raw.size() - words);
    return *it;
  };

  t.positive.resize(m.sites());
  t.negative.resize(m.sites());
  std::vector<std::uint64_t> pos(words), neg(words);
  for (std::size_t j = 0; j < m.sites(); ++j) {
    const auto row = m.row(j);
    const std::size_t alpha = m.alphabet(j).size();
    t.positive[j].resize(alpha);
    t.negative[j].resize(alpha);
    for (TokenId v = 0; v < alpha; ++v) {
      std::fill(pos.begin(), pos.end(), 0);
      for (std::size_t k = 0; k < t.width; ++k) {
        if (row[t.members[k]] == v) pos[k / 64] |= std::uint64_t{1} << (63 - k % 64);
      }
      for (std::size_t w = 0; w < words; ++w) neg[w] = ~pos[w] & mask[w];
      t.positive[j][v] = intern(pos.data());
      t.negative[j][v] = intern(neg.data());
    }
  }

  // Sort the interned signatures and remap the query tables.
  const std::size_t count = raw.size() / words;
  std::vector<std::uint32_t> order(count);
  for (std::uint32_t i = 0; i < count; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return std::lexicographical_compare(raw.begin() + static_cast<std::ptrdiff_t>(a * words),
                                        raw.begin() + static_cast<std::ptrdiff_t>((a + 1) * words),
                                        raw.begin() + static_cast<std::ptrdiff_t>(b * words),
                                        raw.begin() + static_cast<std::ptrdiff_t>((b + 1) * words));
  });
  std::vector<std::uint32_t> rank(count);
  t.data.resize(raw.size());
  for (std::uint32_t r = 0; r < count; ++r) {
    rank[order[r]] = r;
    std::copy_n(raw.begin() + static_cast<std::ptrdiff_t>(order[r] * words), words,
                t.data.begin() + static_cast<std::ptrdiff_t>(r * words));
  }
  for (auto* table : {&t.positive, &t.negative}) {
    for (auto& site : *table) {
      for (auto& idx : site) idx = rank[idx];
    }
  }
  return t;
}

// Index i < n maps to x_{i+1}; index i >= n maps to the negation of
// x_{2n-i}. The complement of signature i sits at 2n-1-i, so complements
// receive opposite literals.
inline void map_variables(SignatureTable& t) {
  const std::size_t u = t.size();
  if (u % 2 != 0) throw std::logic_error("odd unique signature count " + std::to_string(u));
  t.n = u / 2;
  t.literals.resize(u);
  for (std::size_t i = 0; i < u; ++i) {
    t.literals[i] = i < t.n ? sat::Literal::pos(static_cast<sat::Var>(i + 1))
                            : sat::Literal::neg(static_cast<sat::Var>(2 * t.n - i));
  }
  const std::uint64_t tail = t.width % 64 == 0 ? ~std::uint64_t{0} : ~std::uint64_t{0} << (64 - t.width % 64);
  for (std::size_t i = 0; i < t.n; ++i) {
    const auto a = t.signature(i);
    const auto b = t.signature(u - 1 - i);
    for (std::size_t w = 0; w < t.words; ++w) {
      const std::uint64_t m = w + 1 == t.words ? tail : ~std::uint64_t{0};
      if ((a[w] ^ b[w]) != m) throw std::logic_error("signature table is not complement-paired");
    }
  }
}

// One clause per site over the positive-query literals, in alphabet order.
// Returns the number emitted (the site count); a group holding a literal and
// its negation is a tautology and is dropped by the formula.
inline std::size_t emit_at_least_one(const SignatureTable& t, sat::Formula& f) {
  f.ensure_vars(static_cast<sat::Var>(t.n));
  std::vector<sat::Literal> lits;
  for (const auto& site : t.positive) {
    lits.clear();
    for (auto idx : site) lits.push_back(t.literals[idx]);
    f.add_clause(lits);
  }
  return t.positive.size();
}

// Adds (f(si) or f(sj)) for every pair i <= j whose false-false count is at
// most the drawn z. Returns the number of pairs that produced a clause.
inline std::size_t emit_pair_constraints(const SignatureTable& t, double z_max, std::uint64_t seed, sat::Formula& f) {
  f.ensure_vars(static_cast<sat::Var>(t.n));
  const std::size_t u = t.size();
  const std::size_t words = t.words;
  const std::uint64_t tail = t.width % 64 == 0 ? ~std::uint64_t{0} : ~std::uint64_t{0} << (64 - t.width % 64);
  std::size_t added = 0;
  for (std::size_t i = 0; i < u; ++i) {
    const std::uint64_t* a = t.data.data() + i * words;
    for (std::size_t j = i; j < u; ++j) {
      const std::uint64_t* b = t.data.data() + j * words;
      const std::size_t z = draw_z(z_max, seed, i, j);
      std::size_t ff = 0;
      for (std::size_t w = 0; w < words && ff <= z; ++w) {
        const std::uint64_t m = w + 1 == words ? tail : ~std::uint64_t{0};
        ff += static_cast<std::size_t>(std::popcount(~(a[w] | b[w]) & m));
      }
      if (ff <= z) {
        f.add_clause({t.literals[i], t.literals[j]});
        ++added;
      }
    }
  }
  return added;
}

// For each other sequence: at least d sites where the output differs from
// it. The mismatch at site j is the negative-query literal for the other's
// token; a token outside the alphabet is a guaranteed mismatch.
inline void add_diversity_constraints(sat::Formula& f, const SignatureTable& t,
                                      std::span<const std::vector<TokenId>> others, std::size_t d) {
  if (d == 0) return;
  const std::size_t sites = t.positive.size();
  if (d > sites) throw std::invalid_argument("diversity distance exceeds site count");
  for (const auto& other : others) {
    if (other.size() != sites) throw std::invalid_argument("diversity sequence length differs from site count");
    sat::CardinalityConstraint cc;
    cc.kind = sat::CardinalityKind::at_least;
    std::size_t constant = 0;
    for (std::size_t j = 0; j < sites; ++j) {
      if (other[j] >= t.negative[j].size()) {
        ++constant;
      } else {
        cc.literals.push_back(t.literals[t.negative[j][other[j]]]);
      }
    }
    if (constant >= d) continue;
    cc.k = static_cast<std::uint32_t>(d - constant);
    f.add_cardinality(std::move(cc));
  }
}

inline std::vector<TokenId> decode(const sat::Assignment& a, const SignatureTable& t) {
  std::vector<TokenId> out(t.positive.size());
  for (std::size_t j = 0; j < t.positive.size(); ++j) {
    std::size_t hits = 0;
    for (TokenId v = 0; v < t.positive[j].size(); ++v) {
      if (sat::value_of(a, t.literals[t.positive[j][v]])) {
        out[j] = v;
        ++hits;
      }
    }
    if (hits != 1) {
      throw std::logic_error("site " + std::to_string(j) + " decodes to " + std::to_string(hits) + " tokens");
    }
  }
  return out;
}

// Inverse of decode: the assignment under which the table's queries answer
// as `tokens` does. Empty when two queries sharing a signature would need
// different answers (no model can produce such a sequence).
inline std::optional<sat::Assignment> encode(std::span<const TokenId> tokens, const SignatureTable& t) {
  if (tokens.size() != t.positive.size()) throw std::invalid_argument("sequence length differs from site count");
  sat::Assignment a(t.n, false);
  std::vector<char> set(t.n, 0);
  for (std::size_t j = 0; j < tokens.size(); ++j) {
    for (TokenId v = 0; v < t.positive[j].size(); ++v) {
      const auto lit = t.literals[t.positive[j][v]];
      const bool value = (tokens[j] == v) != lit.negated;
      auto& slot = set[lit.var - 1];
      if (slot && a[lit.var - 1] != value) return std::nullopt;
      slot = 1;
      a[lit.var - 1] = value;
    }
  }
  return a;
}

enum class DiversityTarget { inputs, outputs, both };

struct GenParams {
  std::size_t n = 10;
  double z_max = 0.0;
  std::uint64_t seed = 0;
  std::optional<std::size_t> diversity_min_distance;
  DiversityTarget diversity_target = DiversityTarget::inputs;
  std::size_t retries = 0;  // extra attempts with re-derived seeds after an infeasible draw
  sat::SolverOptions solver;
};

struct SyntheticRecord {
  std::vector<TokenId> tokens;
  std::size_t cluster_id = 0;
  std::vector<SampleIndex> members;
  std::uint64_t seed = 0;
  std::size_t attempts = 1;
  std::size_t n = 0;
  double z_max = 0.0;

  friend bool operator==(const SyntheticRecord&, const SyntheticRecord&) = default;
};

struct GenerationProblem {
  SignatureTable table;
  sat::Formula formula;
};

inline void validate(const GenParams& p) {
  if (p.n < 1) throw std::invalid_argument("cluster size N must be at least 1");
  if (!(p.z_max >= 0.0) || !std::isfinite(p.z_max)) throw std::invalid_argument("z_max must be a finite value >= 0");
}

// Signatures, variable mapping, at-least-one clauses, pair constraints and
// optional diversity constraints for one cluster.
inline GenerationProblem build_problem(const AlleleMatrix& m, std::span<const SampleIndex> cluster, double z_max,
                                       std::uint64_t seed, std::span<const std::vector<TokenId>> others = {},
                                       std::size_t diversity = 0) {
  GenerationProblem p{build_signatures(m, cluster), sat::Formula()};
  map_variables(p.table);
  p.formula = sat::Formula(static_cast<sat::Var>(p.table.n));
  p.formula.decision_seed = seed;
  emit_at_least_one(p.table, p.formula);
  emit_pair_constraints(p.table, z_max, seed, p.formula);
  add_diversity_constraints(p.formula, p.table, others, diversity);
  return p;
}

// Runs one cluster through the full pipeline. Infeasibility and solver
// timeouts are errors; with retries > 0 an infeasible draw is retried under
// a re-derived seed.
inline SyntheticRecord generate_one(const AlleleMatrix& m, std::span<const SampleIndex> cluster, const GenParams& params,
                                    std::span<const std::vector<TokenId>> extra_others = {}) {
  validate(params);
  std::vector<std::vector<TokenId>> others;
  const std::size_t d = params.diversity_min_distance.value_or(0);
  if (d > 0) {
    if (d > m.sites()) throw std::invalid_argument("diversity distance exceeds site count");
    if (params.diversity_target != DiversityTarget::outputs) {
      for (SampleIndex s : cluster) others.push_back(m.column(s));
    }
    if (params.diversity_target != DiversityTarget::inputs) {
      others.insert(others.end(), extra_others.begin(), extra_others.end());
    }
  }
  for (std::size_t attempt = 0;; ++attempt) {
    const std::uint64_t seed = attempt == 0 ? params.seed : derive_seed(params.seed, "retry", attempt);
    auto problem = build_problem(m, cluster, params.z_max, seed, others, d);
    const auto outcome = sat::solve(problem.formula, seed, params.solver);
    if (outcome.status == sat::Status::sat) {
      SyntheticRecord r;
      r.tokens = decode(outcome.assignment, problem.table);
      r.members.assign(cluster.begin(), cluster.end());
      r.seed = seed;
      r.attempts = attempt + 1;
      r.n = cluster.size();
      r.z_max = params.z_max;
      return r;
    }
    if (outcome.status == sat::Status::timeout) {
      throw TimeoutError("solver conflict budget exhausted; raise the budget or lower Z");
    }
    if (attempt >= params.retries) {
      throw InfeasibleError("no synthetic record satisfies the constraints (Z = " + std::to_string(params.z_max) +
                            ", N = " + std::to_string(cluster.size()) +
                            "); try a larger N, a smaller Z, a smaller diversity distance or --retry");
    }
  }
}

enum class ClusterMode { plan, fresh };

struct CohortOptions {
  unsigned threads = 1;
  ClusterMode mode = ClusterMode::plan;
};

// `count` records, each from a seeded random cluster: a cluster of the plan,
// or in fresh mode a new nearest-neighbour cluster around a random sample.
// Record i uses seeds derived from (params.seed, i), so results do not
// depend on the thread count. Output-diversity constraints make each record
// depend on the previous ones, which forces sequential generation.
inline std::vector<SyntheticRecord> generate_cohort(const AlleleMatrix& m, const hap::ClusterPlan& plan,
                                                    const GenParams& params, std::size_t count,
                                                    const CohortOptions& opts = {}) {
  validate(params);
  if (count < 1) throw std::invalid_argument("record count must be at least 1");
  if (opts.mode == ClusterMode::plan && plan.clusters.empty()) throw std::invalid_argument("cluster plan is empty");
  if (opts.mode == ClusterMode::fresh && params.n > m.samples()) {
    throw std::invalid_argument("cluster size exceeds sample count");
  }
  std::vector<SyntheticRecord> out(count);
  auto one = [&](std::size_t i, std::span<const std::vector<TokenId>> previous) {
    Rng pick(derive_seed(params.seed, "cluster-pick", i));
    std::size_t cluster_id;
    std::vector<SampleIndex> members;
    if (opts.mode == ClusterMode::plan) {
      cluster_id = static_cast<std::size_t>(pick.below(plan.clusters.size()));
      members = plan.clusters[cluster_id];
    } else {
      cluster_id = static_cast<std::size_t>(pick.below(m.samples()));
      members = hap::nearest_cluster(m, static_cast<SampleIndex>(cluster_id), params.n, derive_seed(params.seed, "fresh", i));
    }
    GenParams p = params;
    p.seed = derive_seed(params.seed, "record", i);
    try {
      out[i] = generate_one(m, members, p, previous);
    } catch (const InfeasibleError& e) {
      throw InfeasibleError("record " + std::to_string(i) + " (cluster " + std::to_string(cluster_id) + "): " + e.what());
    } catch (const TimeoutError& e) {
      throw TimeoutError("record " + std::to_string(i) + " (cluster " + std::to_string(cluster_id) + "): " + e.what());
    }
    out[i].cluster_id = cluster_id;
  };
  const bool sequential = params.diversity_min_distance.value_or(0) > 0 && params.diversity_target != DiversityTarget::inputs;
  if (sequential) {
    std::vector<std::vector<TokenId>> previous;
    for (std::size_t i = 0; i < count; ++i) {
      one(i, previous);
      previous.push_back(out[i].tokens);
    }
  } else {
    parallel_for(count, opts.threads, [&](std::size_t i) { one(i, {}); });
  }
  return out;
}

// Records as a matrix over the cohort's sites and alphabets.
inline AlleleMatrix records_to_matrix(const AlleleMatrix& cohort, const std::vector<SyntheticRecord>& records,
                                      const std::string& prefix = "syn") {
  std::vector<std::vector<TokenId>> cols;
  std::vector<std::string> ids;
  cols.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    cols.push_back(records[i].tokens);
    ids.push_back(prefix + std::to_string(i));
  }
  return cohort.with_columns(cols, std::move(ids));
}

}  // namespace satgen::gen
