#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <set>

#include "satgen/generator.hpp"
#include "support/oracles.hpp"

namespace satgen::gen {
namespace {

using sat::Literal;
using testing::all_members;

Literal x(sat::Var v) { return Literal::pos(v); }
Literal nx(sat::Var v) { return Literal::neg(v); }

bool has_clause(const sat::Formula& f, std::vector<Literal> lits) {
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  return std::any_of(f.clauses().begin(), f.clauses().end(), [&](const sat::Clause& c) { return c.literals == lits; });
}

class WorkedExample : public ::testing::Test {
 protected:
  void SetUp() override {
    cohort = testing::worked_example_cohort();
    members = all_members(cohort);
    problem = build_problem(cohort, members, 0.0, 1);
  }
  hap::AlleleMatrix cohort;
  std::vector<SampleIndex> members;
  GenerationProblem problem;
};

TEST_F(WorkedExample, SiteOneTokenASignature) {
  const auto& t = problem.table;
  EXPECT_EQ(t.render(t.index_of({0, *cohort.find_token(0, "A"), true})), "TFFTT");
}

TEST_F(WorkedExample, SixteenSignaturesEightVariables) {
  EXPECT_EQ(problem.table.size(), 16u);
  EXPECT_EQ(problem.table.n, 8u);
  EXPECT_EQ(problem.formula.num_vars(), 8u);
}

TEST_F(WorkedExample, SortedSignaturesAndLiterals) {
  const auto& t = problem.table;
  const std::vector<std::string> low = {"FFFFF", "FFTFF", "FFTFT", "FTFFF", "FTFFT", "FTTFF", "FTTFT", "FTTTF"};
  for (std::size_t i = 0; i < low.size(); ++i) {
    EXPECT_EQ(t.render(i), low[i]);
    EXPECT_EQ(t.literals[i], x(static_cast<sat::Var>(i + 1)));
    EXPECT_EQ(t.literals[15 - i], nx(static_cast<sat::Var>(i + 1)));
  }
  EXPECT_EQ(t.render(15), "TTTTT");
  EXPECT_EQ(t.render(10), "TFFTT");
  EXPECT_EQ(t.literals[10], nx(6));
}

TEST_F(WorkedExample, PairClauses) {
  const auto& f = problem.formula;
  EXPECT_TRUE(has_clause(f, {x(2), nx(1)}));  // (FFTFF, TTTTT)
  EXPECT_TRUE(has_clause(f, {nx(1)}));        // (TTTTT, TTTTT)
  EXPECT_FALSE(has_clause(f, {x(1)}));        // (FFFFF, FFFFF) has five FF
}

TEST_F(WorkedExample, SiteOneAtLeastOneClause) {
  const auto& t = problem.table;
  std::vector<Literal> group;
  for (auto idx : t.at_least_one_group(0)) group.push_back(t.literals[idx]);
  EXPECT_EQ(group, (std::vector<Literal>{nx(6), x(1), x(4), x(2)}));
  EXPECT_TRUE(has_clause(problem.formula, group));
}

TEST_F(WorkedExample, DecodeSiteOneFromNotX6) {
  // x1, x2, x4 false and x6 false (so not-x6 true): site 1 is A.
  auto a = encode(cohort.column(0), problem.table);
  ASSERT_TRUE(a.has_value());
  EXPECT_FALSE((*a)[0]);
  EXPECT_FALSE((*a)[1]);
  EXPECT_FALSE((*a)[3]);
  EXPECT_FALSE((*a)[5]);
  EXPECT_EQ(cohort.token(0, decode(*a, problem.table)[0]), "A");
}

TEST_F(WorkedExample, OutputsEqualBruteForceFeasibleSet) {
  const auto expected = testing::feasible_sequences(cohort, members);
  const auto e = sat::enumerate_solutions(problem.formula, 5000, 3);
  ASSERT_TRUE(e.exhausted);
  std::set<std::vector<TokenId>> got;
  for (const auto& m : e.models) got.insert(decode(m, problem.table));
  EXPECT_EQ(got.size(), e.models.size());  // models and outputs correspond one to one
  EXPECT_EQ(got, std::set<std::vector<TokenId>>(expected.begin(), expected.end()));
  GenParams p;
  p.n = 5;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    p.seed = seed;
    EXPECT_TRUE(got.count(generate_one(cohort, members, p).tokens));
  }
}

TEST_F(WorkedExample, FormulaHasOneClausePerSiteBeyondPairs) {
  sat::Formula only(8);
  EXPECT_EQ(emit_at_least_one(problem.table, only), cohort.sites());
  std::size_t tautologies = 0;
  for (std::size_t j = 0; j < cohort.sites(); ++j) {
    std::vector<Literal> group;
    for (auto idx : problem.table.at_least_one_group(j)) group.push_back(problem.table.literals[idx]);
    bool taut = false;
    for (auto l : group) taut = taut || std::find(group.begin(), group.end(), ~l) != group.end();
    tautologies += taut;
    if (!taut) {
      EXPECT_TRUE(has_clause(only, group));
    }
  }
  EXPECT_EQ(only.clauses().size() + tautologies, cohort.sites());
}

TEST(Signatures, IdenticalSamplesCollapse) {
  const auto m = hap::AlleleMatrix::from_rows({"a", "b"}, {"p", "q", "r"}, {{"A", "A", "A"}, {"T", "T", "T"}},
                                              std::vector<std::string>{"A", "T"});
  auto t = build_signatures(m, all_members(m));
  map_variables(t);
  EXPECT_EQ(t.width, 1u);
  EXPECT_EQ(t.size(), 2u);
  EXPECT_EQ(t.n, 1u);
  GenParams p;
  p.n = 3;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    p.seed = seed;
    EXPECT_EQ(generate_one(m, all_members(m), p).tokens, m.column(0));
  }
}

TEST(Signatures, UnaryAlphabetGivesUnitClause) {
  const auto m = hap::AlleleMatrix::from_rows({"a"}, {"p", "q"}, {{"A", "A"}});
  const auto p = build_problem(m, all_members(m), 0, 0);
  ASSERT_EQ(p.table.at_least_one_group(0).size(), 1u);
  EXPECT_TRUE(has_clause(p.formula, {p.table.literals[p.table.at_least_one_group(0)[0]]}));
}

TEST(Signatures, ComplementPairingOnRandomClusters) {
  Rng rng(11);
  for (int iter = 0; iter < 100; ++iter) {
    const auto m = testing::random_binary_cohort(rng, 1 + rng.below(40), 1 + rng.below(70));
    auto t = build_signatures(m, all_members(m));
    map_variables(t);
    ASSERT_EQ(t.size() % 2, 0u);
    for (std::size_t i = 0; i < t.size(); ++i) {
      const std::size_t c = t.size() - 1 - i;
      for (std::size_t k = 0; k < t.width; ++k) ASSERT_NE(t.bit(i, k), t.bit(c, k));
      ASSERT_EQ(t.literals[c], ~t.literals[i]);
      if (i + 1 < t.size()) {
        ASSERT_TRUE(std::lexicographical_compare(t.signature(i).begin(), t.signature(i).end(),
                                                 t.signature(i + 1).begin(), t.signature(i + 1).end()));
      }
    }
  }
}

TEST(Signatures, DuplicateColumnsKeepFirstOccurrence) {
  const auto m = hap::AlleleMatrix::from_rows({"a"}, {"p", "q", "r"}, {{"A", "T", "A"}});
  const std::vector<SampleIndex> cluster = {2, 1, 0};
  const auto t = build_signatures(m, cluster);
  EXPECT_EQ(t.members, (std::vector<SampleIndex>{2, 1}));
}

TEST(Signatures, VariableBoundAtClusterSizeTen) {
  Rng rng(6);
  for (int iter = 0; iter < 200; ++iter) {
    const auto m = testing::random_binary_cohort(rng, 300, 10);
    auto t = build_signatures(m, all_members(m));
    map_variables(t);
    EXPECT_LE(t.size(), 1024u);
    EXPECT_LE(t.n, 512u);
  }
}

TEST(PairRule, ZDrawIsFlooredUniform) {
  for (std::uint64_t i = 0; i < 200; ++i) {
    EXPECT_EQ(draw_z(0.0, 1, i, i), 0u);
    EXPECT_EQ(draw_z(1.0, 1, i, i + 1), 0u);
    EXPECT_LT(draw_z(3.0, 1, i, i + 1), 3u);
  }
  std::set<std::size_t> seen;
  for (std::uint64_t i = 0; i < 200; ++i) seen.insert(draw_z(3.0, 9, i, 0));
  EXPECT_EQ(seen, (std::set<std::size_t>{0, 1, 2}));
}

TEST(PairRule, RaisingZMaxOnlyAddsClauses) {
  Rng rng(3);
  for (int iter = 0; iter < 20; ++iter) {
    const auto m = testing::random_binary_cohort(rng, 8, 8);
    const auto lo = build_problem(m, all_members(m), 1.5, 77);
    const auto hi = build_problem(m, all_members(m), 4.0, 77);
    for (const auto& c : lo.formula.clauses()) EXPECT_TRUE(has_clause(hi.formula, c.literals));
    EXPECT_GE(hi.formula.clauses().size(), lo.formula.clauses().size());
  }
}

TEST(Forward, BruteForceEquivalenceOnRandomBinaryCohorts) {
  Rng rng(2718);
  for (int iter = 0; iter < 60; ++iter) {
    const auto m = testing::random_binary_cohort(rng, 1 + rng.below(6), 1 + rng.below(5));
    const auto members = all_members(m);
    const auto expected = testing::feasible_sequences(m, members);
    const auto problem = build_problem(m, members, 0, static_cast<std::uint64_t>(iter));
    const auto e = sat::enumerate_solutions(problem.formula, 1000, static_cast<std::uint64_t>(iter));
    ASSERT_TRUE(e.exhausted);
    std::set<std::vector<TokenId>> got;
    for (const auto& model : e.models) got.insert(decode(model, problem.table));
    ASSERT_EQ(got.size(), e.models.size());
    ASSERT_EQ(got, std::set<std::vector<TokenId>>(expected.begin(), expected.end())) << "iteration " << iter;
    // Every member's own column is a feasible output.
    for (auto s : members) {
      const auto a = encode(m.column(s), problem.table);
      ASSERT_TRUE(a.has_value());
      ASSERT_TRUE(sat::satisfies(problem.formula, *a));
      ASSERT_EQ(decode(*a, problem.table), m.column(s));
    }
  }
}

TEST(Forward, NoUnseenFalseFalsePairsInOutputs) {
  Rng rng(99);
  for (int iter = 0; iter < 40; ++iter) {
    const auto m = testing::random_binary_cohort(rng, 6, 5);
    GenParams p;
    p.n = 5;
    p.seed = static_cast<std::uint64_t>(iter);
    const auto r = generate_one(m, all_members(m), p);
    EXPECT_TRUE(testing::pair_rule_feasible(m, all_members(m), r.tokens));
  }
}

TEST(Forward, StrongZCanBeInfeasible) {
  Rng rng(5);
  const auto m = testing::random_binary_cohort(rng, 10, 4);
  GenParams p;
  p.n = 4;
  p.z_max = 50;  // almost every pair is prohibited
  EXPECT_THROW(generate_one(m, all_members(m), p), InfeasibleError);
}

TEST(Forward, RetryRederivesSeed) {
  Rng rng(5);
  const auto m = testing::random_binary_cohort(rng, 6, 6);
  GenParams p;
  p.n = 6;
  p.z_max = 2.5;
  p.retries = 50;
  bool saw_retry = false;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    p.seed = seed;
    try {
      const auto r = generate_one(m, all_members(m), p);
      saw_retry = saw_retry || r.attempts > 1;
      if (r.attempts > 1) {
        EXPECT_NE(r.seed, seed);
      }
    } catch (const InfeasibleError&) {
    }
  }
  EXPECT_TRUE(saw_retry);
}

TEST(Diversity, ZeroIsNoOp) {
  const auto m = testing::worked_example_cohort();
  auto p = build_problem(m, all_members(m), 0, 0);
  const auto before = p.formula.cardinalities().size();
  const std::vector<std::vector<TokenId>> others = {m.column(0)};
  add_diversity_constraints(p.formula, p.table, others, 0);
  EXPECT_EQ(p.formula.cardinalities().size(), before);
}

TEST(Diversity, RejectsDistanceAboveSiteCount) {
  const auto m = testing::worked_example_cohort();
  auto p = build_problem(m, all_members(m), 0, 0);
  const std::vector<std::vector<TokenId>> others = {m.column(0)};
  EXPECT_THROW(add_diversity_constraints(p.formula, p.table, others, 6), std::invalid_argument);
}

TEST(Diversity, ExcludingTheOnlyOutputIsInfeasible) {
  const auto m = hap::AlleleMatrix::from_rows({"a", "b"}, {"p", "q"}, {{"A", "A"}, {"T", "T"}},
                                              std::vector<std::string>{"A", "T"});
  GenParams p;
  p.n = 2;
  p.diversity_min_distance = 1;
  EXPECT_THROW(generate_one(m, all_members(m), p), InfeasibleError);
}

TEST(Diversity, ThreeSiteToyExcludesNearSequences) {
  const auto m = hap::AlleleMatrix::from_rows({"a", "b", "c"}, {"p", "q", "r"},
                                              {{"0", "1", "0"}, {"0", "0", "1"}, {"1", "0", "0"}},
                                              std::vector<std::string>{"0", "1"});
  const auto members = all_members(m);
  auto base = build_problem(m, members, 0, 0);
  const auto feasible = sat::enumerate_solutions(base.formula, 100).models;
  const std::vector<std::vector<TokenId>> others = {m.column(0)};
  for (std::size_t d = 1; d <= 3; ++d) {
    auto p = build_problem(m, members, 0, 0, others, d);
    const auto e = sat::enumerate_solutions(p.formula, 100);
    ASSERT_TRUE(e.exhausted);
    std::size_t expected = 0;
    for (const auto& model : feasible) expected += hap::hamming(decode(model, base.table), m.column(0)) >= d;
    EXPECT_EQ(e.models.size(), expected);
    for (const auto& model : e.models) EXPECT_GE(hap::hamming(decode(model, p.table), m.column(0)), d);
  }
}

TEST(Diversity, AbsentTokenCountsAsMismatch) {
  const auto m = hap::AlleleMatrix::from_rows({"a", "b"}, {"p"}, {{"A"}, {"T"}});
  auto p = build_problem(m, all_members(m), 0, 0);
  const std::vector<std::vector<TokenId>> others = {{7, 0}};  // site a token unknown, site b equal
  add_diversity_constraints(p.formula, p.table, others, 1);
  EXPECT_TRUE(p.formula.cardinalities().empty());
  EXPECT_EQ(sat::solve(p.formula, 0).status, sat::Status::sat);
}

TEST(Cohort, DeterministicAndThreadIndependent) {
  Rng rng(8);
  const auto m = testing::random_binary_cohort(rng, 30, 20);
  const auto plan = hap::build_clusters(m, 5, 8, 1);
  GenParams p;
  p.n = 5;
  p.seed = 42;
  const auto a = generate_cohort(m, plan, p, 25, {1, ClusterMode::plan});
  const auto b = generate_cohort(m, plan, p, 25, {4, ClusterMode::plan});
  EXPECT_EQ(a, b);
  for (const auto& r : a) {
    EXPECT_EQ(r.members, plan.clusters[r.cluster_id]);
    EXPECT_TRUE(testing::pair_rule_feasible(m, r.members, r.tokens));
  }
}

TEST(Cohort, FreshClustersAndSequentialDiversity) {
  Rng rng(9);
  const auto m = testing::random_binary_cohort(rng, 20, 12);
  GenParams p;
  p.n = 6;
  p.seed = 4;
  p.diversity_min_distance = 1;
  p.diversity_target = DiversityTarget::outputs;
  const auto recs = generate_cohort(m, {}, p, 10, {1, ClusterMode::fresh});
  std::set<std::vector<TokenId>> distinct;
  for (const auto& r : recs) {
    EXPECT_EQ(r.members.size(), 6u);
    EXPECT_EQ(r.members.front(), r.cluster_id);
    distinct.insert(r.tokens);
  }
  EXPECT_EQ(distinct.size(), recs.size());
}

TEST(Cohort, CountOneAndValidation) {
  const auto m = testing::worked_example_cohort();
  const auto plan = hap::build_clusters(m, 5, 1, 0);
  GenParams p;
  p.n = 5;
  EXPECT_EQ(generate_cohort(m, plan, p, 1).size(), 1u);
  EXPECT_THROW(generate_cohort(m, plan, p, 0), std::invalid_argument);
  p.n = 0;
  EXPECT_THROW(generate_cohort(m, plan, p, 1), std::invalid_argument);
}

TEST(Cohort, HundredRecordsFromWorkedExampleAreFeasible) {
  const auto m = testing::worked_example_cohort();
  const auto plan = hap::build_clusters(m, 5, 1, 0);
  GenParams p;
  p.n = 5;
  p.seed = 1;
  for (const auto& r : generate_cohort(m, plan, p, 100)) {
    EXPECT_TRUE(testing::pair_rule_feasible(m, all_members(m), r.tokens));
  }
}

}  // namespace
}  // namespace satgen::gen
