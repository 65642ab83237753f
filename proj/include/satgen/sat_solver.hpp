#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "satgen/rng.hpp"
#include "satgen/sat.hpp"

namespace satgen::sat {

struct SolverOptions {
  std::uint64_t conflict_budget = 10'000'000;
  double var_decay = 0.95;
  double clause_decay = 0.999;
  std::uint32_t restart_base = 100;
  // Probability that a decision picks a uniformly random unassigned variable.
  double random_var_freq = 0.0;
};

enum class Status { sat, unsat, timeout };

struct SolveOutcome {
  Status status = Status::unsat;
  Assignment assignment;  // present iff sat

  friend bool operator==(const SolveOutcome&, const SolveOutcome&) = default;
};

// CDCL search: two watched literals, 1-UIP learning with basic clause
// minimization, VSIDS ordering, Luby restarts and phase saving. Cardinality
// constraints are kept as weighted at-most-k counters and propagated
// natively; their explanations are materialized only during conflict
// analysis. The seed randomizes initial variable order and polarities.
class Solver {
 public:
  Solver(Var num_vars, std::uint64_t seed, SolverOptions opts = {}) : opts_(opts), rng_(seed) { grow(num_vars); }

  Solver(const Formula& f, std::uint64_t seed, SolverOptions opts = {}) : Solver(f.num_vars(), seed, opts) {
    if (f.unsat_marker()) ok_ = false;
    for (const auto& c : f.clauses()) add_clause(c.literals);
    for (const auto& cc : f.cardinalities()) add_cardinality(cc);
  }

  Var num_vars() const noexcept { return static_cast<Var>(assigns_.size()); }

  // Returns false once the clause set is known to be unsatisfiable.
  bool add_clause(std::span<const Literal> lits) {
    cancel_until(0);
    if (!ok_) return false;
    std::vector<int> c;
    c.reserve(lits.size());
    for (const auto& l : lits) c.push_back(code(l));
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    std::size_t out = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i + 1 < c.size() && c[i + 1] == (c[i] ^ 1)) return true;  // tautology
      const auto v = value(c[i]);
      if (v == kTrue) return true;
      if (v == kUndef) c[out++] = c[i];
    }
    c.resize(out);
    if (c.empty()) return ok_ = false;
    if (c.size() == 1) {
      enqueue(c[0], kNoReason, 0);
      return ok_ = (propagate() == kNoConflict);
    }
    attach(std::move(c), false);
    return true;
  }

  bool add_cardinality(const CardinalityConstraint& cc) {
    switch (cc.kind) {
      case CardinalityKind::at_most:
        return add_at_most(cc.literals, cc.k, false);
      case CardinalityKind::at_least:
        return add_at_most(cc.literals, cc.k, true);
      case CardinalityKind::exactly:
        return add_at_most(cc.literals, cc.k, false) && add_at_most(cc.literals, cc.k, true);
    }
    return ok_;
  }

  Status solve() {
    cancel_until(0);
    model_.clear();
    if (!ok_) return Status::unsat;
    if (propagate() != kNoConflict) {
      ok_ = false;
      return Status::unsat;
    }
    std::uint64_t budget_used = 0;
    for (std::uint64_t restart = 0;; ++restart) {
      const auto limit = static_cast<std::uint64_t>(luby(2.0, restart) * opts_.restart_base);
      const Status s = search(limit, budget_used);
      if (s == Status::sat) {
        model_.assign(num_vars(), false);
        for (Var v = 0; v < num_vars(); ++v) model_[v] = assigns_[v] == kTrue;
        return s;
      }
      if (s == Status::unsat) {
        ok_ = false;
        return s;
      }
      if (budget_used >= opts_.conflict_budget) {
        cancel_until(0);
        return Status::timeout;
      }
    }
  }

  const Assignment& model() const noexcept { return model_; }
  std::uint64_t conflicts() const noexcept { return total_conflicts_; }
  std::uint64_t decisions() const noexcept { return total_decisions_; }

 private:
  static constexpr std::int8_t kFalse = 0, kTrue = 1, kUndef = 2;
  static constexpr std::uint32_t kNoReason = std::numeric_limits<std::uint32_t>::max();
  static constexpr std::uint32_t kCardBit = 1u << 31;
  static constexpr std::uint32_t kNoConflict = kNoReason;

  struct ClauseData {
    std::vector<int> lits;
    double activity = 0;
    bool learnt = false;
    bool deleted = false;
  };

  struct Watcher {
    std::uint32_t cref;
    int blocker;
  };

  // sum(weights of true lits) <= bound.
  struct Card {
    std::vector<int> lits;
    std::vector<std::uint32_t> weights;
    std::int64_t bound = 0;
    std::int64_t true_weight = 0;
    std::uint32_t max_weight = 0;
  };

  struct CardOcc {
    std::uint32_t card;
    std::uint32_t weight;
  };

  static int code(Literal l) { return static_cast<int>(2 * (l.var - 1) + (l.negated ? 1 : 0)); }
  static int var_of(int lit) { return lit >> 1; }

  std::int8_t value(int lit) const {
    const auto a = assigns_[static_cast<std::size_t>(var_of(lit))];
    return a == kUndef ? kUndef : static_cast<std::int8_t>(a ^ (lit & 1));
  }

  int decision_level() const { return static_cast<int>(trail_lim_.size()); }

  void grow(Var n) {
    assigns_.assign(n, kUndef);
    level_.assign(n, 0);
    reason_.assign(n, kNoReason);
    trail_pos_.assign(n, 0);
    seen_.assign(n, 0);
    activity_.resize(n);
    phase_.resize(n);
    for (Var v = 0; v < n; ++v) {
      activity_[v] = rng_.uniform() * 1e-5;
      phase_[v] = rng_.coin();
    }
    watches_.assign(2 * static_cast<std::size_t>(n), {});
    card_occ_.assign(2 * static_cast<std::size_t>(n), {});
    heap_index_.assign(n, -1);
    heap_.clear();
    for (Var v = 0; v < n; ++v) heap_insert(static_cast<int>(v));
  }

  // --- cardinality -------------------------------------------------------

  bool add_at_most(std::span<const Literal> lits, std::uint32_t k, bool negate_all_for_at_least) {
    cancel_until(0);
    if (!ok_) return false;
    std::map<int, std::int64_t> weight;
    for (const auto& l : lits) ++weight[code(negate_all_for_at_least ? ~l : l)];
    // at least k of L  <=>  at most |L| - k of the negations of L.
    std::int64_t bound = negate_all_for_at_least ? static_cast<std::int64_t>(lits.size()) - k : k;
    // A literal and its complement together always contribute min(w, w').
    for (auto it = weight.begin(); it != weight.end(); ++it) {
      if (it->first & 1) continue;
      auto jt = weight.find(it->first ^ 1);
      if (jt == weight.end()) continue;
      const auto common = std::min(it->second, jt->second);
      it->second -= common;
      jt->second -= common;
      bound -= common;
    }
    Card card;
    std::int64_t total = 0;
    for (const auto& [lit, w] : weight) {
      if (w == 0) continue;
      const auto val = value(lit);
      if (val == kTrue) {
        bound -= w;
        continue;
      }
      if (val == kFalse) continue;
      card.lits.push_back(lit);
      card.weights.push_back(static_cast<std::uint32_t>(w));
      card.max_weight = std::max(card.max_weight, static_cast<std::uint32_t>(w));
      total += w;
    }
    if (bound < 0) return ok_ = false;
    if (total <= bound) return true;
    card.bound = bound;
    const auto idx = static_cast<std::uint32_t>(cards_.size());
    for (std::size_t i = 0; i < card.lits.size(); ++i) {
      card_occ_[static_cast<std::size_t>(card.lits[i])].push_back({idx, card.weights[i]});
    }
    cards_.push_back(std::move(card));
    // Literals heavier than the bound are false outright.
    const auto& c = cards_.back();
    for (std::size_t i = 0; i < c.lits.size(); ++i) {
      if (c.weights[i] > c.bound) enqueue(c.lits[i] ^ 1, kNoReason, 0);
    }
    return ok_ = (propagate() == kNoConflict);
  }

  // Called when `lit` becomes true; returns a conflict reference or kNoConflict.
  std::uint32_t propagate_cards(int lit) {
    for (const auto& occ : card_occ_[static_cast<std::size_t>(lit)]) {
      Card& c = cards_[occ.card];
      if (c.true_weight > c.bound) return occ.card | kCardBit;
      if (c.true_weight + c.max_weight <= c.bound) continue;
      for (std::size_t i = 0; i < c.lits.size(); ++i) {
        const int l = c.lits[i];
        if (value(l) == kUndef && c.true_weight + c.weights[i] > c.bound) {
          enqueue(l ^ 1, occ.card | kCardBit, decision_level());
        }
      }
    }
    return kNoConflict;
  }

  void count_assignment(int lit, int delta) {
    for (const auto& occ : card_occ_[static_cast<std::size_t>(lit)]) {
      cards_[occ.card].true_weight += delta * static_cast<std::int64_t>(occ.weight);
    }
  }

  // --- assignment --------------------------------------------------------

  void enqueue(int lit, std::uint32_t reason, int level) {
    const auto v = static_cast<std::size_t>(var_of(lit));
    assigns_[v] = static_cast<std::int8_t>((lit & 1) ? kFalse : kTrue);
    level_[v] = level;
    reason_[v] = reason;
    trail_pos_[v] = static_cast<int>(trail_.size());
    trail_.push_back(lit);
    count_assignment(lit, +1);
  }

  void cancel_until(int level) {
    if (decision_level() <= level) return;
    const auto stop = static_cast<std::size_t>(trail_lim_[static_cast<std::size_t>(level)]);
    for (std::size_t i = trail_.size(); i-- > stop;) {
      const int lit = trail_[i];
      const auto v = static_cast<std::size_t>(var_of(lit));
      count_assignment(lit, -1);
      phase_[v] = !(lit & 1);
      assigns_[v] = kUndef;
      reason_[v] = kNoReason;
      if (heap_index_[v] < 0) heap_insert(static_cast<int>(v));
    }
    trail_.resize(stop);
    trail_lim_.resize(static_cast<std::size_t>(level));
    qhead_ = std::min(qhead_, stop);
  }

  void attach(std::vector<int> lits, bool learnt) {
    const auto cref = static_cast<std::uint32_t>(clauses_.size());
    watches_[static_cast<std::size_t>(lits[0])].push_back({cref, lits[1]});
    watches_[static_cast<std::size_t>(lits[1])].push_back({cref, lits[0]});
    clauses_.push_back({std::move(lits), 0.0, learnt, false});
    if (learnt) learnts_.push_back(cref);
  }

  // Watch lists are indexed by the literal whose falsification wakes them.
  std::uint32_t propagate() {
    std::uint32_t conflict = kNoConflict;
    while (qhead_ < trail_.size()) {
      const int p = trail_[qhead_++];
      conflict = propagate_cards(p);
      if (conflict != kNoConflict) break;
      const int false_lit = p ^ 1;
      auto& ws = watches_[static_cast<std::size_t>(false_lit)];
      std::size_t i = 0, j = 0;
      const std::size_t end = ws.size();
      while (i < end) {
        Watcher w = ws[i++];
        if (value(w.blocker) == kTrue) {
          ws[j++] = w;
          continue;
        }
        ClauseData& c = clauses_[w.cref];
        if (c.deleted) continue;
        auto& lits = c.lits;
        if (lits[0] == false_lit) std::swap(lits[0], lits[1]);
        const int first = lits[0];
        if (first != w.blocker && value(first) == kTrue) {
          ws[j++] = {w.cref, first};
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < lits.size(); ++k) {
          if (value(lits[k]) != kFalse) {
            std::swap(lits[1], lits[k]);
            watches_[static_cast<std::size_t>(lits[1])].push_back({w.cref, first});
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[j++] = {w.cref, first};
        if (value(first) == kFalse) {
          conflict = w.cref;
          qhead_ = trail_.size();
          while (i < end) ws[j++] = ws[i++];
        } else {
          enqueue(first, w.cref, decision_level());
        }
      }
      ws.resize(j);
      if (conflict != kNoConflict) break;
    }
    return conflict;
  }

  // --- conflict analysis -------------------------------------------------

  // False literals that, together with the implied literal, form the reason
  // for variable v's current value.
  void explain(std::size_t v, std::vector<int>& out) {
    out.clear();
    const auto r = reason_[v];
    if (r & kCardBit) {
      const Card& c = cards_[r & ~kCardBit];
      for (int l : c.lits) {
        const auto lv = static_cast<std::size_t>(var_of(l));
        if (value(l) == kTrue && trail_pos_[lv] < trail_pos_[v]) out.push_back(l ^ 1);
      }
    } else {
      ClauseData& c = clauses_[r];
      if (c.learnt) bump_clause(c);
      for (std::size_t i = 1; i < c.lits.size(); ++i) out.push_back(c.lits[i]);
    }
  }

  void conflict_literals(std::uint32_t conflict, std::vector<int>& out) {
    out.clear();
    if (conflict & kCardBit) {
      for (int l : cards_[conflict & ~kCardBit].lits) {
        if (value(l) == kTrue) out.push_back(l ^ 1);
      }
    } else {
      ClauseData& c = clauses_[conflict];
      if (c.learnt) bump_clause(c);
      out = c.lits;
    }
  }

  void analyze(std::uint32_t conflict, std::vector<int>& learnt, int& backtrack_level) {
    learnt.assign(1, -1);
    int path = 0;
    int p = -1;
    std::size_t idx = trail_.size();
    std::vector<int>& lits = scratch_;
    conflict_literals(conflict, lits);
    for (;;) {
      for (int q : lits) {
        const auto v = static_cast<std::size_t>(var_of(q));
        if (!seen_[v] && level_[v] > 0) {
          bump_var(v);
          seen_[v] = 1;
          if (level_[v] >= decision_level()) {
            ++path;
          } else {
            learnt.push_back(q);
          }
        }
      }
      do {
        --idx;
      } while (!seen_[static_cast<std::size_t>(var_of(trail_[idx]))]);
      p = trail_[idx];
      const auto pv = static_cast<std::size_t>(var_of(p));
      seen_[pv] = 0;
      if (--path == 0) break;
      explain(pv, lits);
    }
    learnt[0] = p ^ 1;

    // Drop literals implied by others already in the clause.
    minimize_marked_.assign(learnt.begin() + 1, learnt.end());
    for (int l : minimize_marked_) seen_[static_cast<std::size_t>(var_of(l))] = 1;
    std::vector<int> reason_lits;
    std::size_t keep = 1;
    for (std::size_t i = 1; i < learnt.size(); ++i) {
      const auto v = static_cast<std::size_t>(var_of(learnt[i]));
      bool redundant = reason_[v] != kNoReason;
      if (redundant) {
        explain(v, reason_lits);
        for (int r : reason_lits) {
          const auto rv = static_cast<std::size_t>(var_of(r));
          if (!seen_[rv] && level_[rv] > 0) {
            redundant = false;
            break;
          }
        }
      }
      if (!redundant) learnt[keep++] = learnt[i];
    }
    for (int l : minimize_marked_) seen_[static_cast<std::size_t>(var_of(l))] = 0;
    learnt.resize(keep);

    backtrack_level = 0;
    if (learnt.size() > 1) {
      std::size_t best = 1;
      for (std::size_t i = 2; i < learnt.size(); ++i) {
        if (level_[static_cast<std::size_t>(var_of(learnt[i]))] > level_[static_cast<std::size_t>(var_of(learnt[best]))]) {
          best = i;
        }
      }
      std::swap(learnt[1], learnt[best]);
      backtrack_level = level_[static_cast<std::size_t>(var_of(learnt[1]))];
    }
  }

  // --- heuristics --------------------------------------------------------

  void bump_var(std::size_t v) {
    activity_[v] += var_inc_;
    if (activity_[v] > 1e100) {
      for (auto& a : activity_) a *= 1e-100;
      var_inc_ *= 1e-100;
    }
    if (heap_index_[v] >= 0) heap_up(heap_index_[v]);
  }

  void bump_clause(ClauseData& c) {
    c.activity += clause_inc_;
    if (c.activity > 1e20) {
      for (auto cref : learnts_) clauses_[cref].activity *= 1e-20;
      clause_inc_ *= 1e-20;
    }
  }

  bool heap_less(int a, int b) const {
    return activity_[static_cast<std::size_t>(a)] > activity_[static_cast<std::size_t>(b)];
  }

  void heap_up(int i) {
    const int v = heap_[static_cast<std::size_t>(i)];
    while (i > 0) {
      const int parent = (i - 1) / 2;
      if (!heap_less(v, heap_[static_cast<std::size_t>(parent)])) break;
      heap_[static_cast<std::size_t>(i)] = heap_[static_cast<std::size_t>(parent)];
      heap_index_[static_cast<std::size_t>(heap_[static_cast<std::size_t>(i)])] = i;
      i = parent;
    }
    heap_[static_cast<std::size_t>(i)] = v;
    heap_index_[static_cast<std::size_t>(v)] = i;
  }

  void heap_down(int i) {
    const int v = heap_[static_cast<std::size_t>(i)];
    const int size = static_cast<int>(heap_.size());
    for (;;) {
      int child = 2 * i + 1;
      if (child >= size) break;
      if (child + 1 < size && heap_less(heap_[static_cast<std::size_t>(child + 1)], heap_[static_cast<std::size_t>(child)])) {
        ++child;
      }
      if (!heap_less(heap_[static_cast<std::size_t>(child)], v)) break;
      heap_[static_cast<std::size_t>(i)] = heap_[static_cast<std::size_t>(child)];
      heap_index_[static_cast<std::size_t>(heap_[static_cast<std::size_t>(i)])] = i;
      i = child;
    }
    heap_[static_cast<std::size_t>(i)] = v;
    heap_index_[static_cast<std::size_t>(v)] = i;
  }

  void heap_insert(int v) {
    heap_index_[static_cast<std::size_t>(v)] = static_cast<int>(heap_.size());
    heap_.push_back(v);
    heap_up(static_cast<int>(heap_.size()) - 1);
  }

  int heap_pop() {
    const int top = heap_.front();
    heap_index_[static_cast<std::size_t>(top)] = -1;
    const int last = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) {
      heap_[0] = last;
      heap_index_[static_cast<std::size_t>(last)] = 0;
      heap_down(0);
    }
    return top;
  }

  int pick_branch_literal() {
    if (opts_.random_var_freq > 0 && !heap_.empty() && rng_.uniform() < opts_.random_var_freq) {
      const int v = heap_[rng_.below(heap_.size())];
      if (assigns_[static_cast<std::size_t>(v)] == kUndef) return 2 * v + (phase_[static_cast<std::size_t>(v)] ? 0 : 1);
    }
    while (!heap_.empty()) {
      const int v = heap_pop();
      if (assigns_[static_cast<std::size_t>(v)] == kUndef) return 2 * v + (phase_[static_cast<std::size_t>(v)] ? 0 : 1);
    }
    return -1;
  }

  static double luby(double y, std::uint64_t x) {
    std::uint64_t size = 1;
    int seq = 0;
    while (size < x + 1) {
      ++seq;
      size = 2 * size + 1;
    }
    while (size - 1 != x) {
      size = (size - 1) >> 1;
      --seq;
      x = x % size;
    }
    double r = 1;
    for (int i = 0; i < seq; ++i) r *= y;
    return r;
  }

  void reduce_learnts() {
    std::vector<std::uint32_t> candidates;
    std::vector<std::uint32_t> kept;
    for (auto cref : learnts_) {
      const auto& c = clauses_[cref];
      if (c.deleted) continue;
      const int first = c.lits[0];
      const bool locked =
          value(first) == kTrue && reason_[static_cast<std::size_t>(var_of(first))] == cref;
      if (locked || c.lits.size() <= 2) {
        kept.push_back(cref);
      } else {
        candidates.push_back(cref);
      }
    }
    std::sort(candidates.begin(), candidates.end(), [&](auto a, auto b) {
      return clauses_[a].activity < clauses_[b].activity;
    });
    const std::size_t drop = candidates.size() / 2;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (i < drop) {
        clauses_[candidates[i]].deleted = true;
        clauses_[candidates[i]].lits.clear();
        clauses_[candidates[i]].lits.shrink_to_fit();
      } else {
        kept.push_back(candidates[i]);
      }
    }
    learnts_ = std::move(kept);
    for (auto& ws : watches_) {
      std::erase_if(ws, [&](const Watcher& w) { return clauses_[w.cref].deleted; });
    }
  }

  Status search(std::uint64_t conflict_limit, std::uint64_t& budget_used) {
    std::uint64_t local = 0;
    std::vector<int> learnt;
    for (;;) {
      const auto conflict = propagate();
      if (conflict != kNoConflict) {
        ++local;
        ++budget_used;
        ++total_conflicts_;
        if (decision_level() == 0) return Status::unsat;
        int bt = 0;
        analyze(conflict, learnt, bt);
        cancel_until(bt);
        if (learnt.size() == 1) {
          enqueue(learnt[0], kNoReason, 0);
        } else {
          const auto cref = static_cast<std::uint32_t>(clauses_.size());
          attach(learnt, true);
          bump_clause(clauses_[cref]);
          enqueue(learnt[0], cref, bt);
        }
        var_inc_ /= opts_.var_decay;
        clause_inc_ /= opts_.clause_decay;
        if (budget_used >= opts_.conflict_budget) return Status::timeout;
        continue;
      }
      if (local >= conflict_limit) {
        cancel_until(0);
        return Status::timeout;  // restart
      }
      if (learnts_.size() >= max_learnts_ + trail_.size()) {
        reduce_learnts();
        max_learnts_ = max_learnts_ + max_learnts_ / 10;
      }
      const int next = pick_branch_literal();
      if (next < 0) return Status::sat;
      ++total_decisions_;
      trail_lim_.push_back(static_cast<int>(trail_.size()));
      enqueue(next, kNoReason, decision_level());
    }
  }

  SolverOptions opts_;
  Rng rng_;
  bool ok_ = true;

  std::vector<std::int8_t> assigns_;
  std::vector<int> level_;
  std::vector<std::uint32_t> reason_;
  std::vector<int> trail_pos_;
  std::vector<char> seen_;
  std::vector<double> activity_;
  std::vector<char> phase_;
  std::vector<int> heap_;
  std::vector<int> heap_index_;

  std::vector<int> trail_;
  std::vector<int> trail_lim_;
  std::size_t qhead_ = 0;

  std::vector<ClauseData> clauses_;
  std::vector<std::uint32_t> learnts_;
  std::vector<std::vector<Watcher>> watches_;
  std::vector<Card> cards_;
  std::vector<std::vector<CardOcc>> card_occ_;
  std::vector<int> scratch_;
  std::vector<int> minimize_marked_;

  double var_inc_ = 1.0;
  double clause_inc_ = 1.0;
  std::size_t max_learnts_ = 20000;
  std::uint64_t total_conflicts_ = 0;
  std::uint64_t total_decisions_ = 0;
  Assignment model_;
};

// Solves a formula with the given seed. Every sat answer is re-checked by
// the plain evaluator; a mismatch is a solver bug and throws.
inline SolveOutcome solve(const Formula& f, std::uint64_t seed, const SolverOptions& opts = {}) {
  if (f.unsat_marker()) return {Status::unsat, {}};
  Solver s(f, seed, opts);
  SolveOutcome out;
  out.status = s.solve();
  if (out.status == Status::sat) {
    out.assignment = s.model();
    if (!satisfies(f, out.assignment)) throw std::logic_error("solver produced an assignment that fails verification");
  }
  return out;
}

inline SolveOutcome solve(const Formula& f) { return solve(f, f.decision_seed); }

struct Enumeration {
  std::vector<Assignment> models;
  bool exhausted = false;  // the model list is complete
  bool timed_out = false;
};

// Distinct models by blocking-clause enumeration, each verified.
inline Enumeration enumerate_solutions(const Formula& f, std::size_t limit, std::uint64_t seed = 0,
                                       const SolverOptions& opts = {}) {
  if (limit < 1) throw std::invalid_argument("enumeration limit must be at least 1");
  Enumeration out;
  if (f.unsat_marker()) {
    out.exhausted = true;
    return out;
  }
  Solver s(f, seed, opts);
  std::vector<Literal> block;
  while (out.models.size() < limit) {
    const auto st = s.solve();
    if (st == Status::unsat) {
      out.exhausted = true;
      break;
    }
    if (st == Status::timeout) {
      out.timed_out = true;
      break;
    }
    const auto& m = s.model();
    if (!satisfies(f, m)) throw std::logic_error("solver produced an assignment that fails verification");
    out.models.push_back(m);
    block.clear();
    for (Var v = 1; v <= f.num_vars(); ++v) block.push_back(m[v - 1] ? Literal::neg(v) : Literal::pos(v));
    if (block.empty() || !s.add_clause(block)) {
      out.exhausted = true;
      break;
    }
  }
  return out;
}

}  // namespace satgen::sat
