#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "satgen/error.hpp"
#include "satgen/generator.hpp"
#include "satgen/hapdata.hpp"
#include "satgen/parallel.hpp"
#include "satgen/rng.hpp"
#include "satgen/sat.hpp"
#include "satgen/sat_solver.hpp"

namespace satgen::rev {

using hap::AlleleMatrix;
using hap::SampleIndex;
using hap::TokenId;

// Dense set of cohort sample indices.
class SampleSet {
 public:
  SampleSet() = default;
  explicit SampleSet(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

  void insert(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  bool contains(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }
  std::size_t universe() const noexcept { return size_; }

  std::size_t count() const noexcept {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  bool subset_of(const SampleSet& o) const noexcept {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      if (words_[w] & ~o.words_[w]) return false;
    }
    return true;
  }

  SampleSet operator&(const SampleSet& o) const {
    SampleSet r(size_);
    for (std::size_t w = 0; w < words_.size(); ++w) r.words_[w] = words_[w] & o.words_[w];
    return r;
  }

  std::vector<SampleIndex> members() const {
    std::vector<SampleIndex> out;
    for (std::size_t i = 0; i < size_; ++i) {
      if (contains(i)) out.push_back(static_cast<SampleIndex>(i));
    }
    return out;
  }

  friend auto operator<=>(const SampleSet&, const SampleSet&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

struct ReverseParams {
  std::size_t n = 10;
  double z_max = 0.0;
  std::uint64_t seed = 0;
  sat::SolverOptions solver;
  unsigned threads = 1;
};

// At least k of the samples in `members` belong to the input cluster.
struct MemberConstraint {
  SampleSet members;
  std::uint32_t k = 1;

  friend bool operator==(const MemberConstraint&, const MemberConstraint&) = default;
};

struct ReverseProblem {
  std::size_t samples = 0;
  std::size_t n = 0;
  std::vector<SampleSet> half_clauses;  // per distinct false-answered query: samples also answering false
  std::vector<MemberConstraint> constraints;  // after subsumption
  std::size_t constraints_before_subsumption = 0;
  sat::Formula formula;  // x_{i+1} <=> sample i is an input; exactly-N included
  bool infeasible = false;
  std::string diagnostic;  // set when infeasible
};

// Samples that answer false to every query the record answers false to,
// one set per distinct query signature over the whole cohort.
inline std::vector<SampleSet> collect_half_clauses(std::span<const TokenId> synth, const AlleleMatrix& cohort) {
  if (synth.size() != cohort.sites()) throw std::invalid_argument("record length differs from cohort site count");
  std::vector<SampleSet> out;
  for (std::size_t j = 0; j < cohort.sites(); ++j) {
    const auto row = cohort.row(j);
    const std::size_t alpha = cohort.alphabet(j).size();
    if (synth[j] >= alpha) throw std::invalid_argument("record token outside site alphabet at site " + std::to_string(j));
    for (TokenId v = 0; v < alpha; ++v) {
      // synth != v: "has v" is false, shared by samples without v.
      // synth == v: "lacks v" is false, shared by samples with v.
      const bool want_v = synth[j] == v;
      SampleSet s(cohort.samples());
      for (std::size_t i = 0; i < row.size(); ++i) {
        if ((row[i] == v) == want_v) s.insert(i);
      }
      out.push_back(std::move(s));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Drops constraints implied by another: A implies B when A's set is a
// subset of B's and A demands at least as many members.
inline std::vector<MemberConstraint> eliminate_subsumed(std::vector<MemberConstraint> cs) {
  std::map<SampleSet, std::uint32_t> strongest;
  for (auto& c : cs) {
    auto [it, inserted] = strongest.emplace(c.members, c.k);
    if (!inserted) it->second = std::max(it->second, c.k);
  }
  struct Entry {
    const SampleSet* set;
    std::size_t size;
    std::uint32_t k;
  };
  std::vector<Entry> order;
  order.reserve(strongest.size());
  for (const auto& [set, k] : strongest) order.push_back({&set, set.count(), k});
  std::stable_sort(order.begin(), order.end(), [](const Entry& a, const Entry& b) {
    return a.size != b.size ? a.size < b.size : a.k > b.k;
  });
  std::vector<Entry> kept;
  for (const auto& e : order) {
    bool subsumed = false;
    for (const auto& a : kept) {
      if (a.k >= e.k && a.size <= e.size && a.set->subset_of(*e.set)) {
        subsumed = true;
        break;
      }
    }
    if (!subsumed) kept.push_back(e);
  }
  std::vector<MemberConstraint> out;
  out.reserve(kept.size());
  for (const auto& e : kept) out.push_back({*e.set, e.k});
  return out;
}

namespace detail {

inline ReverseProblem assemble(std::vector<SampleSet> halves, std::size_t samples, std::size_t n, double z_max,
                               std::uint64_t trial_seed) {
  if (n < 1 || n > samples) throw std::invalid_argument("cluster size N must be in [1, M]");
  ReverseProblem p;
  p.samples = samples;
  p.n = n;
  p.half_clauses = std::move(halves);
  std::vector<MemberConstraint> raw;
  const auto& h = p.half_clauses;
  for (std::size_t a = 0; a < h.size(); ++a) {
    for (std::size_t b = a; b < h.size(); ++b) {
      const std::size_t z = gen::draw_z(z_max, trial_seed, a, b);
      SampleSet both = h[a] & h[b];
      const std::size_t available = both.count();
      if (available < z + 1) {
        p.infeasible = true;
        p.diagnostic = "query pair (" + std::to_string(a) + ", " + std::to_string(b) + ") needs " +
                       std::to_string(z + 1) + " false-false inputs but the cohort has " + std::to_string(available);
        p.formula = sat::Formula(static_cast<sat::Var>(samples));
        p.formula.set_unsat_marker();
        return p;
      }
      raw.push_back({std::move(both), static_cast<std::uint32_t>(z + 1)});
    }
  }
  p.constraints_before_subsumption = raw.size();
  p.constraints = eliminate_subsumed(std::move(raw));
  p.formula = sat::Formula(static_cast<sat::Var>(samples));
  for (const auto& c : p.constraints) {
    std::vector<sat::Literal> lits;
    for (auto i : c.members.members()) lits.push_back(sat::Literal::pos(i + 1));
    if (c.k == 1) {
      p.formula.add_clause(std::move(lits));
    } else {
      p.formula.add_cardinality({std::move(lits), sat::CardinalityKind::at_least, c.k});
    }
  }
  std::vector<sat::Literal> all;
  for (std::size_t i = 0; i < samples; ++i) all.push_back(sat::Literal::pos(static_cast<sat::Var>(i + 1)));
  p.formula.add_cardinality({std::move(all), sat::CardinalityKind::exactly, static_cast<std::uint32_t>(n)});
  return p;
}

}  // namespace detail

inline std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) { return derive_seed(seed, "reverse-trial", trial); }

// Constraints for one trial; z values are drawn from the trial's seed.
inline ReverseProblem build_reverse_constraints(std::span<const TokenId> synth, const AlleleMatrix& cohort,
                                                const ReverseParams& params, std::size_t trial = 0) {
  return detail::assemble(collect_half_clauses(synth, cohort), cohort.samples(), params.n, params.z_max,
                          trial_seed(params.seed, trial));
}

// Whether a candidate input set meets every constraint of a problem.
inline bool satisfies(const ReverseProblem& p, std::span<const SampleIndex> members) {
  if (p.infeasible || members.size() != p.n) return false;
  SampleSet in(p.samples);
  for (auto i : members) {
    if (i >= p.samples || in.contains(i)) return false;
    in.insert(i);
  }
  for (const auto& c : p.constraints) {
    if ((c.members & in).count() < c.k) return false;
  }
  return true;
}

struct CandidateSet {
  std::vector<SampleIndex> members;  // ascending
  std::size_t trial = 0;

  friend bool operator==(const CandidateSet&, const CandidateSet&) = default;
};

enum class TrialStatus { found, infeasible, timeout };

struct TrialResult {
  std::size_t trial = 0;
  TrialStatus status = TrialStatus::found;
  std::string diagnostic;
};

struct Sampling {
  std::vector<CandidateSet> sets;
  std::vector<TrialResult> trials;
};

inline std::vector<SampleIndex> members_of(const sat::Assignment& a) {
  std::vector<SampleIndex> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i]) out.push_back(static_cast<SampleIndex>(i));
  }
  return out;
}

// One solve per trial, each with fresh z draws and its own decision seed.
// Throws InfeasibleError when no trial yields a set.
inline Sampling sample_candidate_sets(std::span<const TokenId> synth, const AlleleMatrix& cohort,
                                      const ReverseParams& params, std::size_t trials) {
  if (trials < 1) throw std::invalid_argument("trial count must be at least 1");
  const auto halves = collect_half_clauses(synth, cohort);
  // Without z draws every trial has the same constraints.
  std::optional<ReverseProblem> shared;
  if (!(params.z_max > 1.0)) shared = detail::assemble(halves, cohort.samples(), params.n, 0.0, 0);
  std::vector<TrialResult> results(trials);
  std::vector<std::optional<CandidateSet>> found(trials);
  parallel_for(trials, params.threads, [&](std::size_t t) {
    const auto seed = trial_seed(params.seed, t);
    std::optional<ReverseProblem> own;
    if (!shared) own = detail::assemble(halves, cohort.samples(), params.n, params.z_max, seed);
    const ReverseProblem& p = shared ? *shared : *own;
    results[t].trial = t;
    if (p.infeasible) {
      results[t].status = TrialStatus::infeasible;
      results[t].diagnostic = p.diagnostic;
      return;
    }
    const auto outcome = sat::solve(p.formula, seed, params.solver);
    if (outcome.status == sat::Status::timeout) {
      results[t].status = TrialStatus::timeout;
      results[t].diagnostic = "conflict budget exhausted";
      return;
    }
    if (outcome.status == sat::Status::unsat) {
      results[t].status = TrialStatus::infeasible;
      results[t].diagnostic = "no size-" + std::to_string(params.n) + " input set meets the constraints";
      return;
    }
    CandidateSet c{members_of(outcome.assignment), t};
    if (!satisfies(p, c.members)) throw std::logic_error("reverse solution fails its own constraints");
    found[t] = std::move(c);
  });
  Sampling out;
  out.trials = std::move(results);
  for (auto& f : found) {
    if (f) out.sets.push_back(std::move(*f));
  }
  if (out.sets.empty()) {
    std::string why = out.trials.front().diagnostic;
    throw InfeasibleError("all " + std::to_string(trials) + " reverse trials failed; first: " + why);
  }
  return out;
}

struct Family {
  std::vector<std::vector<SampleIndex>> sets;  // sorted
  bool exhausted = false;
};

// Every compatible input set (z = 0), up to `limit`.
inline Family enumerate_candidate_sets(std::span<const TokenId> synth, const AlleleMatrix& cohort, std::size_t n,
                                       std::size_t limit, std::uint64_t seed = 0, const sat::SolverOptions& opts = {}) {
  const auto p = detail::assemble(collect_half_clauses(synth, cohort), cohort.samples(), n, 0.0, 0);
  Family fam;
  if (p.infeasible) {
    fam.exhausted = true;
    return fam;
  }
  const auto e = sat::enumerate_solutions(p.formula, limit, seed, opts);
  if (e.timed_out) throw TimeoutError("conflict budget exhausted while enumerating input sets");
  for (const auto& m : e.models) fam.sets.push_back(members_of(m));
  std::sort(fam.sets.begin(), fam.sets.end());
  fam.exhausted = e.exhausted;
  return fam;
}

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

// Wilson score interval; the default z gives 90% two-sided coverage.
inline Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.6448536269514722) {
  if (trials == 0) return {0.0, 1.0};
  if (successes > trials) throw std::invalid_argument("successes exceed trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

struct ExposureReport {
  std::vector<double> frequency;  // per cohort sample
  std::vector<SampleIndex> exposed;
  std::size_t iterations = 0;
};

inline ExposureReport exposure_report(std::span<const std::vector<SampleIndex>> sets, std::size_t samples) {
  if (sets.empty()) throw std::invalid_argument("exposure needs at least one candidate set");
  ExposureReport r;
  r.iterations = sets.size();
  std::vector<std::size_t> hits(samples, 0);
  for (const auto& s : sets) {
    for (auto i : s) {
      if (i >= samples) throw std::out_of_range("candidate member out of range");
      ++hits[i];
    }
  }
  r.frequency.resize(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    r.frequency[i] = static_cast<double>(hits[i]) / static_cast<double>(sets.size());
    if (hits[i] == sets.size()) r.exposed.push_back(static_cast<SampleIndex>(i));
  }
  return r;
}

inline ExposureReport exposure_report(const std::vector<CandidateSet>& sets, std::size_t samples) {
  std::vector<std::vector<SampleIndex>> plain;
  plain.reserve(sets.size());
  for (const auto& s : sets) plain.push_back(s.members);
  return exposure_report(plain, samples);
}

struct Combination {
  std::vector<SampleIndex> members;
  std::size_t model_count = 0;  // distinct outputs the forward formula admits
};

struct PosteriorReport {
  std::size_t n_in = 0;   // compatible combinations containing the target
  std::size_t n_out = 0;  // compatible combinations without it
  double zeta = 0.0;
  double r = 0.0;
  double posterior = 0.0;
  bool no_member_combinations = false;
  std::vector<Combination> combinations;
};

// P(I|O) = 1 / (1 + zeta * R).
inline double membership_posterior(double zeta, double r) {
  if (zeta < 0 || r < 0) throw std::invalid_argument("zeta and R must be non-negative");
  return 1.0 / (1.0 + zeta * r);
}

struct DeskLimits {
  std::size_t max_samples = 10;
  std::size_t max_n = 4;
  std::size_t max_sites = 8;
};

// Membership posterior for one target, assuming a uniform choice among
// size-N input sets and a uniform choice among each set's outputs. Exact:
// all compatible sets are enumerated and each forward formula's models are
// counted exhaustively, so only desk-scale instances are accepted.
inline PosteriorReport exact_posterior(std::span<const TokenId> synth, const AlleleMatrix& cohort,
                                          SampleIndex target, std::size_t n, const DeskLimits& limits = {}) {
  if (cohort.samples() > limits.max_samples || n > limits.max_n || cohort.sites() > limits.max_sites) {
    throw std::invalid_argument("posterior evaluation is limited to M <= " + std::to_string(limits.max_samples) +
                                ", N <= " + std::to_string(limits.max_n) + ", S <= " +
                                std::to_string(limits.max_sites));
  }
  if (target >= cohort.samples()) throw std::out_of_range("target sample out of range");
  const auto family = enumerate_candidate_sets(synth, cohort, n, 1u << 20);
  if (!family.exhausted) throw std::logic_error("desk-scale enumeration did not finish");

  PosteriorReport rep;
  double inv_in = 0.0, inv_out = 0.0;
  for (const auto& members : family.sets) {
    const auto problem = gen::build_problem(cohort, members, 0.0, 0);
    const std::size_t bound = std::size_t{1} << problem.formula.num_vars();
    const auto models = sat::enumerate_solutions(problem.formula, bound + 1);
    if (!models.exhausted) throw std::logic_error("model count enumeration did not finish");
    if (models.models.empty()) throw std::logic_error("compatible input set admits no output");
    rep.combinations.push_back({members, models.models.size()});
    const double inv = 1.0 / static_cast<double>(models.models.size());
    if (std::binary_search(members.begin(), members.end(), target)) {
      ++rep.n_in;
      inv_in += inv;
    } else {
      ++rep.n_out;
      inv_out += inv;
    }
  }
  if (rep.n_in == 0) {
    rep.no_member_combinations = true;
    rep.posterior = 0.0;
    return rep;
  }
  rep.zeta = static_cast<double>(rep.n_out) / static_cast<double>(rep.n_in);
  if (rep.n_out == 0) {
    rep.r = 0.0;
    rep.posterior = 1.0;
    return rep;
  }
  rep.r = (inv_out / static_cast<double>(rep.n_out)) / (inv_in / static_cast<double>(rep.n_in));
  rep.posterior = membership_posterior(rep.zeta, rep.r);
  return rep;
}

}  // namespace satgen::rev
