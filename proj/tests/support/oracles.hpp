#pragma once

// Brute-force reference implementations used only by tests. None of these
// share code paths with the library routines they check.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "satgen/hapdata.hpp"
#include "satgen/rng.hpp"
#include "satgen/sat.hpp"

namespace satgen::testing {

// The five-site, five-sample cohort of the worked example, with the
// nucleotide alphabet declared for every site in query order A, G, T, C.
inline hap::AlleleMatrix worked_example_cohort() {
  const std::vector<std::vector<std::string>> rows = {
      {"A", "T", "C", "A", "A"},
      {"T", "G", "A", "T", "T"},
      {"G", "C", "T", "G", "C"},
      {"C", "A", "G", "C", "G"},
      {"T", "G", "G", "G", "T"},
  };
  return hap::AlleleMatrix::from_rows({"site1", "site2", "site3", "site4", "site5"}, {"p0", "p1", "p2", "p3", "p4"},
                                      rows, std::vector<std::string>{"A", "G", "T", "C"});
}

// Exhaustive SAT oracle: evaluates every assignment directly.
inline bool oracle_eval(const sat::Formula& f, std::uint64_t bits) {
  if (f.unsat_marker()) return false;
  auto val = [&](sat::Literal l) { return (((bits >> (l.var - 1)) & 1u) != 0) != l.negated; };
  for (const auto& c : f.clauses()) {
    bool any = false;
    for (auto l : c.literals) any = any || val(l);
    if (!any) return false;
  }
  for (const auto& cc : f.cardinalities()) {
    std::uint32_t t = 0;
    for (auto l : cc.literals) t += val(l) ? 1u : 0u;
    if (cc.kind == sat::CardinalityKind::at_least && t < cc.k) return false;
    if (cc.kind == sat::CardinalityKind::at_most && t > cc.k) return false;
    if (cc.kind == sat::CardinalityKind::exactly && t != cc.k) return false;
  }
  return true;
}

inline std::vector<std::uint64_t> oracle_models(const sat::Formula& f) {
  std::vector<std::uint64_t> models;
  const std::uint64_t n = std::uint64_t{1} << f.num_vars();
  for (std::uint64_t bits = 0; bits < n; ++bits) {
    if (oracle_eval(f, bits)) models.push_back(bits);
  }
  return models;
}

inline std::uint64_t to_bits(const sat::Assignment& a) {
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i]) bits |= std::uint64_t{1} << i;
  }
  return bits;
}

inline sat::Literal random_literal(Rng& rng, sat::Var vars) {
  return {static_cast<sat::Var>(1 + rng.below(vars)), rng.coin()};
}

// Random mixed formula: clauses of width 1..4 and occasional cardinality
// constraints (with repeated literals allowed).
inline sat::Formula random_formula(Rng& rng, sat::Var vars, std::size_t clauses, std::size_t cards) {
  sat::Formula f(vars);
  for (std::size_t c = 0; c < clauses; ++c) {
    std::vector<sat::Literal> lits;
    const std::size_t width = 1 + rng.below(rng.below(4) == 0 ? 4 : 3);
    for (std::size_t i = 0; i < width; ++i) lits.push_back(random_literal(rng, vars));
    f.add_clause(lits);
  }
  for (std::size_t c = 0; c < cards; ++c) {
    sat::CardinalityConstraint cc;
    const std::size_t size = 1 + rng.below(vars + 2);
    for (std::size_t i = 0; i < size; ++i) cc.literals.push_back(random_literal(rng, vars));
    cc.kind = static_cast<sat::CardinalityKind>(rng.below(3));
    cc.k = static_cast<std::uint32_t>(rng.below(size + 1));
    f.add_cardinality(cc);
  }
  return f;
}

// Forward feasibility by the feature-pair rule, phrased over queries
// rather than signatures: for every pair of (site, token, polarity) queries
// the candidate answers false to both, more than z of the cluster members
// must also answer false to both.
inline bool pair_rule_feasible(const hap::AlleleMatrix& m, const std::vector<hap::SampleIndex>& cluster,
                               const std::vector<hap::TokenId>& candidate, std::size_t z = 0) {
  struct Query {
    std::size_t site;
    hap::TokenId token;
    bool positive;
  };
  std::vector<Query> false_queries;
  for (std::size_t j = 0; j < m.sites(); ++j) {
    for (hap::TokenId t = 0; t < m.alphabet(j).size(); ++t) {
      const bool has = candidate[j] == t;
      // positive query "is t" is false when !has; negative "is not t" is false when has
      false_queries.push_back({j, t, !has});
    }
  }
  auto member_false = [&](const Query& q, hap::SampleIndex s) {
    const bool has = m.at(q.site, s) == q.token;
    return q.positive ? !has : has;
  };
  for (std::size_t a = 0; a < false_queries.size(); ++a) {
    for (std::size_t b = a; b < false_queries.size(); ++b) {
      std::size_t both = 0;
      for (auto s : cluster) both += member_false(false_queries[a], s) && member_false(false_queries[b], s);
      if (both <= z) return false;
    }
  }
  return true;
}

// Every token sequence over the site alphabets, in odometer order.
inline std::vector<std::vector<hap::TokenId>> all_sequences(const hap::AlleleMatrix& m) {
  std::vector<std::vector<hap::TokenId>> out;
  std::vector<hap::TokenId> cur(m.sites(), 0);
  for (;;) {
    out.push_back(cur);
    std::size_t j = 0;
    while (j < m.sites()) {
      if (++cur[j] < m.alphabet(j).size()) break;
      cur[j] = 0;
      ++j;
    }
    if (j == m.sites()) break;
  }
  return out;
}

inline std::vector<std::vector<hap::TokenId>> feasible_sequences(const hap::AlleleMatrix& m,
                                                                 const std::vector<hap::SampleIndex>& cluster) {
  std::vector<std::vector<hap::TokenId>> out;
  for (auto& seq : all_sequences(m)) {
    if (pair_rule_feasible(m, cluster, seq)) out.push_back(seq);
  }
  return out;
}

inline hap::AlleleMatrix random_binary_cohort(Rng& rng, std::size_t sites, std::size_t samples) {
  std::vector<std::vector<std::string>> rows(sites, std::vector<std::string>(samples));
  for (auto& r : rows) {
    for (auto& c : r) c = rng.coin() ? "1" : "0";
  }
  std::vector<std::string> site_ids, sample_ids;
  for (std::size_t j = 0; j < sites; ++j) site_ids.push_back("s" + std::to_string(j));
  for (std::size_t i = 0; i < samples; ++i) sample_ids.push_back("h" + std::to_string(i));
  return hap::AlleleMatrix::from_rows(site_ids, sample_ids, rows, std::vector<std::string>{"0", "1"});
}

inline std::vector<hap::SampleIndex> all_members(const hap::AlleleMatrix& m) {
  std::vector<hap::SampleIndex> v(m.samples());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<hap::SampleIndex>(i);
  return v;
}

// All size-k subsets of {0..m-1} in lexicographic order.
inline std::vector<std::vector<hap::SampleIndex>> combinations(std::size_t m, std::size_t k) {
  std::vector<std::vector<hap::SampleIndex>> out;
  std::vector<hap::SampleIndex> cur;
  auto rec = [&](auto&& self, hap::SampleIndex start) -> void {
    if (cur.size() == k) {
      out.push_back(cur);
      return;
    }
    for (hap::SampleIndex i = start; i < m; ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

// Input sets from which the forward pair rule admits `record`.
inline std::vector<std::vector<hap::SampleIndex>> compatible_subsets(const hap::AlleleMatrix& m, std::size_t n,
                                                                     const std::vector<hap::TokenId>& record) {
  std::vector<std::vector<hap::SampleIndex>> out;
  for (auto& c : combinations(m.samples(), n)) {
    if (pair_rule_feasible(m, c, record)) out.push_back(c);
  }
  return out;
}

// Direct Bayes: uniform prior over size-n subsets, uniform choice among each
// subset's feasible outputs (found by string enumeration), conditioned on
// observing `record`.
inline double bayes_membership(const hap::AlleleMatrix& m, std::size_t n, const std::vector<hap::TokenId>& record,
                               hap::SampleIndex target) {
  double with = 0.0, total = 0.0;
  for (auto& c : combinations(m.samples(), n)) {
    const auto outputs = feasible_sequences(m, c);
    bool present = false;
    for (const auto& o : outputs) present = present || o == record;
    if (!present) continue;
    const double likelihood = 1.0 / static_cast<double>(outputs.size());
    total += likelihood;
    for (auto i : c) {
      if (i == target) with += likelihood;
    }
  }
  return total == 0.0 ? 0.0 : with / total;
}

// Random corpora over the full token character set.
inline hap::AlleleMatrix random_token_matrix(Rng& rng, bool diploid) {
  static const std::string chars = "ACGTacgt0123456789_.*-XYZ";
  auto token = [&] {
    std::string t;
    const std::size_t len = 1 + rng.below(3);
    for (std::size_t i = 0; i < len; ++i) t += chars[rng.below(chars.size())];
    return t == "." ? std::string("N") : t;
  };
  const std::size_t s = 1 + rng.below(12), people = 1 + rng.below(6);
  const std::size_t m = diploid ? people * 2 : people;
  std::vector<std::string> sites, samples;
  for (std::size_t j = 0; j < s; ++j) sites.push_back("site" + std::to_string(j));
  for (std::size_t i = 0; i < people; ++i) {
    if (diploid) {
      samples.push_back("P" + std::to_string(i) + "_0");
      samples.push_back("P" + std::to_string(i) + "_1");
    } else {
      samples.push_back("P" + std::to_string(i));
    }
  }
  std::vector<std::vector<std::string>> rows(s);
  for (auto& r : rows) {
    std::vector<std::string> alpha;
    const std::size_t k = 1 + rng.below(4);
    while (alpha.size() < k) {
      auto t = token();
      if (std::find(alpha.begin(), alpha.end(), t) == alpha.end()) alpha.push_back(t);
    }
    for (std::size_t i = 0; i < m; ++i) r.push_back(alpha[rng.below(k)]);
  }
  return hap::AlleleMatrix::from_rows(sites, samples, rows);
}

}  // namespace satgen::testing
