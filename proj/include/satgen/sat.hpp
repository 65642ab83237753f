#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <initializer_list>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "satgen/error.hpp"

namespace satgen::sat {

using Var = std::uint32_t;

struct Literal {
  Var var = 1;
  bool negated = false;

  static Literal pos(Var v) { return {v, false}; }
  static Literal neg(Var v) { return {v, true}; }

  static Literal from_dimacs(long long value) {
    if (value == 0) throw std::invalid_argument("0 is not a literal");
    return {static_cast<Var>(std::llabs(value)), value < 0};
  }

  long long dimacs() const { return negated ? -static_cast<long long>(var) : static_cast<long long>(var); }

  Literal operator~() const { return {var, !negated}; }

  friend auto operator<=>(const Literal&, const Literal&) = default;
};

// Truth values indexed by var - 1.
using Assignment = std::vector<bool>;

inline bool value_of(const Assignment& a, Literal l) { return a.at(l.var - 1) != l.negated; }

struct Clause {
  std::vector<Literal> literals;

  friend bool operator==(const Clause&, const Clause&) = default;
};

enum class CardinalityKind : int { at_least = 0, at_most = 1, exactly = 2 };

// Literals are counted with multiplicity.
struct CardinalityConstraint {
  std::vector<Literal> literals;
  CardinalityKind kind = CardinalityKind::at_least;
  std::uint32_t k = 0;

  friend bool operator==(const CardinalityConstraint&, const CardinalityConstraint&) = default;
};

class Formula {
 public:
  explicit Formula(Var num_vars = 0) : num_vars_(num_vars) {}

  Var num_vars() const noexcept { return num_vars_; }
  Var new_var() noexcept { return ++num_vars_; }
  void ensure_vars(Var n) noexcept { num_vars_ = std::max(num_vars_, n); }

  // Normalizes (sorts, drops duplicate literals) and records the clause.
  // Tautologies are dropped and reported by returning false. An empty
  // clause sets the unsat marker.
  bool add_clause(std::vector<Literal> lits) {
    check_vars(lits);
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    for (std::size_t i = 1; i < lits.size(); ++i) {
      if (lits[i].var == lits[i - 1].var) return false;
    }
    if (lits.empty()) {
      unsat_ = true;
      return false;
    }
    clauses_.push_back({std::move(lits)});
    return true;
  }

  bool add_clause(std::initializer_list<Literal> lits) { return add_clause(std::vector<Literal>(lits)); }

  // Records a cardinality constraint for native propagation. Trivially
  // satisfied constraints are skipped; impossible ones set the unsat marker.
  void add_cardinality(CardinalityConstraint cc) {
    check_vars(cc.literals);
    const auto size = cc.literals.size();
    switch (cc.kind) {
      case CardinalityKind::at_least:
        if (cc.k == 0) return;
        if (cc.k > size) {
          unsat_ = true;
          return;
        }
        break;
      case CardinalityKind::at_most:
        if (cc.k >= size) return;
        break;
      case CardinalityKind::exactly:
        if (cc.k > size) {
          unsat_ = true;
          return;
        }
        break;
    }
    cards_.push_back(std::move(cc));
  }

  const std::vector<Clause>& clauses() const noexcept { return clauses_; }
  const std::vector<CardinalityConstraint>& cardinalities() const noexcept { return cards_; }
  bool unsat_marker() const noexcept { return unsat_; }
  void set_unsat_marker() noexcept { unsat_ = true; }

  std::uint64_t decision_seed = 0;

 private:
  void check_vars(std::span<const Literal> lits) const {
    for (const auto& l : lits) {
      if (l.var < 1 || l.var > num_vars_) {
        throw std::out_of_range("literal variable " + std::to_string(l.var) + " outside [1, " +
                                std::to_string(num_vars_) + "]");
      }
    }
  }

  Var num_vars_ = 0;
  std::vector<Clause> clauses_;
  std::vector<CardinalityConstraint> cards_;
  bool unsat_ = false;
};

inline std::size_t count_true(const Assignment& a, std::span<const Literal> lits) {
  std::size_t n = 0;
  for (const auto& l : lits) n += value_of(a, l);
  return n;
}

inline bool satisfies(const CardinalityConstraint& cc, const Assignment& a) {
  const auto t = count_true(a, cc.literals);
  switch (cc.kind) {
    case CardinalityKind::at_least: return t >= cc.k;
    case CardinalityKind::at_most: return t <= cc.k;
    case CardinalityKind::exactly: return t == cc.k;
  }
  return false;
}

// Plain evaluator, deliberately unrelated to the solver's data structures.
inline bool satisfies(const Formula& f, const Assignment& a) {
  if (f.unsat_marker()) return false;
  if (a.size() != f.num_vars()) return false;
  for (const auto& c : f.clauses()) {
    bool sat = false;
    for (const auto& l : c.literals) {
      if (value_of(a, l)) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  for (const auto& cc : f.cardinalities()) {
    if (!satisfies(cc, a)) return false;
  }
  return true;
}

// DIMACS CNF with one extension: `h <k> <kind> <lit...> 0` carries a
// cardinality constraint (kind 0 = at least, 1 = at most, 2 = exactly).
// The header clause count covers ordinary clauses only. An unsat marker is
// written as an empty clause.
inline std::string export_dimacs(const Formula& f) {
  std::ostringstream out;
  const std::size_t n_clauses = f.clauses().size() + (f.unsat_marker() ? 1 : 0);
  out << "p cnf " << f.num_vars() << ' ' << n_clauses << '\n';
  for (const auto& c : f.clauses()) {
    for (const auto& l : c.literals) out << l.dimacs() << ' ';
    out << "0\n";
  }
  if (f.unsat_marker()) out << "0\n";
  for (const auto& cc : f.cardinalities()) {
    out << "h " << cc.k << ' ' << static_cast<int>(cc.kind);
    for (const auto& l : cc.literals) out << ' ' << l.dimacs();
    out << " 0\n";
  }
  return out.str();
}

inline Formula import_dimacs(std::string_view text) {
  Formula f;
  bool have_header = false;
  std::vector<Literal> pending;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  auto parse_int = [&](std::string_view tok) -> long long {
    long long v = 0;
    std::size_t i = 0;
    bool neg = false;
    if (!tok.empty() && tok[0] == '-') {
      neg = true;
      i = 1;
    }
    if (i == tok.size()) throw ParseError(line_no, "expected integer, found '" + std::string(tok) + "'");
    for (; i < tok.size(); ++i) {
      if (tok[i] < '0' || tok[i] > '9') throw ParseError(line_no, "expected integer, found '" + std::string(tok) + "'");
      v = v * 10 + (tok[i] - '0');
      if (v > (1LL << 40)) throw ParseError(line_no, "integer out of range");
    }
    return neg ? -v : v;
  };
  auto tokens_of = [](std::string_view line) {
    std::vector<std::string_view> toks;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      const std::size_t start = i;
      while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
      if (i > start) toks.push_back(line.substr(start, i - start));
    }
    return toks;
  };
  auto lit_of = [&](long long v) {
    const auto l = Literal::from_dimacs(v);
    if (l.var > f.num_vars()) throw ParseError(line_no, "literal " + std::to_string(v) + " exceeds declared variables");
    return l;
  };
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto toks = tokens_of(line);
    if (toks.empty() || toks[0][0] == 'c' || toks[0] == "%") continue;
    if (toks[0] == "p") {
      if (have_header || toks.size() != 4 || toks[1] != "cnf") throw ParseError(line_no, "malformed problem line");
      f = Formula(static_cast<Var>(parse_int(toks[2])));
      have_header = true;
      continue;
    }
    if (!have_header) throw ParseError(line_no, "clause before problem line");
    if (toks[0] == "h") {
      if (toks.size() < 4 || toks.back() != "0") throw ParseError(line_no, "malformed cardinality line");
      CardinalityConstraint cc;
      const long long k = parse_int(toks[1]);
      const long long kind = parse_int(toks[2]);
      if (k < 0 || kind < 0 || kind > 2) throw ParseError(line_no, "bad cardinality bound or kind");
      cc.k = static_cast<std::uint32_t>(k);
      cc.kind = static_cast<CardinalityKind>(kind);
      for (std::size_t i = 3; i + 1 < toks.size(); ++i) cc.literals.push_back(lit_of(parse_int(toks[i])));
      f.add_cardinality(std::move(cc));
      continue;
    }
    for (auto tok : toks) {
      const long long v = parse_int(tok);
      if (v == 0) {
        f.add_clause(std::move(pending));
        pending.clear();
      } else {
        pending.push_back(lit_of(v));
      }
    }
  }
  if (!pending.empty()) throw ParseError(line_no, "unterminated clause");
  if (!have_header) throw ParseError(line_no, "missing problem line");
  return f;
}

}  // namespace satgen::sat
