#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "satgen/reverse.hpp"
#include "support/oracles.hpp"

namespace satgen::rev {
namespace {

using testing::all_members;

TEST(HalfClauses, WorkedExampleRecordEqualToSampleZero) {
  const auto m = testing::worked_example_cohort();
  const auto halves = collect_half_clauses(m.column(0), m);
  for (const auto& h : halves) EXPECT_TRUE(h.contains(0));  // sample 0 answers as the record does
}

TEST(Constraints, ZeroZClauseOverFalseFalseMembers) {
  // Site a: record has 0; samples 2 and 4 also have 0, the rest 1.
  const auto m = hap::AlleleMatrix::from_rows({"a"}, {"s0", "s1", "s2", "s3", "s4"}, {{"1", "1", "0", "1", "0"}},
                                              std::vector<std::string>{"0", "1"});
  ReverseParams params;
  params.n = 2;
  const std::vector<TokenId> record = {0};
  const auto p = build_reverse_constraints(record, m, params);
  ASSERT_FALSE(p.infeasible);
  ASSERT_EQ(p.constraints.size(), 1u);
  EXPECT_EQ(p.constraints[0].members.members(), (std::vector<SampleIndex>{2, 4}));
  EXPECT_EQ(p.constraints[0].k, 1u);
  ASSERT_EQ(p.formula.clauses().size(), 1u);
  EXPECT_EQ(p.formula.clauses()[0].literals, (std::vector<sat::Literal>{sat::Literal::pos(3), sat::Literal::pos(5)}));
  ASSERT_EQ(p.formula.cardinalities().size(), 1u);
  EXPECT_EQ(p.formula.cardinalities()[0].kind, sat::CardinalityKind::exactly);
}

TEST(Constraints, RecordFromNoWhereIsImmediatelyInfeasible) {
  const auto m = hap::AlleleMatrix::from_rows({"a"}, {"s0", "s1"}, {{"1", "1"}}, std::vector<std::string>{"0", "1"});
  ReverseParams params;
  params.n = 1;
  const std::vector<TokenId> record = {0};
  const auto p = build_reverse_constraints(record, m, params);
  EXPECT_TRUE(p.infeasible);
  EXPECT_FALSE(p.diagnostic.empty());
  EXPECT_THROW(sample_candidate_sets(record, m, params, 3), InfeasibleError);
}

TEST(Constraints, FullCohortFeasibleWhenRecordIsAColumn) {
  Rng rng(4);
  const auto m = testing::random_binary_cohort(rng, 6, 5);
  ReverseParams params;
  params.n = m.samples();
  const auto col = m.column(3);
  const auto p = build_reverse_constraints(col, m, params);
  EXPECT_TRUE(satisfies(p, all_members(m)));
}

TEST(Subsumption, DropsSupersetsWithWeakerBounds) {
  SampleSet a(4), b(4), c(4);
  a.insert(1);
  b.insert(1);
  b.insert(2);
  c.insert(1);
  c.insert(2);
  c.insert(3);
  const auto out = eliminate_subsumed({{c, 2}, {b, 1}, {a, 1}, {b, 1}});
  // {1} >= 1 implies {1,2} >= 1; {1,2,3} >= 2 is not implied.
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].members, a);
  EXPECT_EQ(out[1].members, c);
  EXPECT_EQ(out[1].k, 2u);
}

TEST(Subsumption, PreservesSolutionSetOnRandomInstances) {
  Rng rng(12);
  for (int iter = 0; iter < 200; ++iter) {
    const std::size_t m = 1 + rng.below(8);
    std::vector<MemberConstraint> cs;
    for (std::size_t c = 0; c < 1 + rng.below(8); ++c) {
      SampleSet s(m);
      for (std::size_t i = 0; i < m; ++i) {
        if (rng.coin()) s.insert(i);
      }
      cs.push_back({s, static_cast<std::uint32_t>(rng.below(3))});
    }
    const auto kept = eliminate_subsumed(cs);
    for (std::uint64_t bits = 0; bits < (1u << m); ++bits) {
      SampleSet in(m);
      for (std::size_t i = 0; i < m; ++i) {
        if ((bits >> i) & 1u) in.insert(i);
      }
      auto ok = [&](const std::vector<MemberConstraint>& v) {
        return std::all_of(v.begin(), v.end(), [&](const auto& c) { return (c.members & in).count() >= c.k; });
      };
      ASSERT_EQ(ok(cs), ok(kept));
    }
  }
}

// Exhaustive subset testing with the forward pair rule is the oracle.
TEST(Oracle, EnumeratedFamilyEqualsExhaustiveSubsets) {
  Rng rng(31);
  for (int iter = 0; iter < 30; ++iter) {
    const auto m = testing::random_binary_cohort(rng, 2 + rng.below(5), 6);
    const auto truth = testing::combinations(6, 3)[rng.below(20)];
    gen::GenParams gp;
    gp.n = 3;
    gp.seed = static_cast<std::uint64_t>(iter);
    const auto record = gen::generate_one(m, truth, gp).tokens;
    const auto family = enumerate_candidate_sets(record, m, 3, 100);
    ASSERT_TRUE(family.exhausted);
    EXPECT_EQ(family.sets, testing::compatible_subsets(m, 3, record)) << "iteration " << iter;
    EXPECT_TRUE(std::binary_search(family.sets.begin(), family.sets.end(), truth));

    ReverseParams params;
    params.n = 3;
    params.seed = static_cast<std::uint64_t>(iter);
    const auto sampled = sample_candidate_sets(record, m, params, 10);
    EXPECT_EQ(sampled.sets.size(), 10u);
    for (const auto& c : sampled.sets) {
      EXPECT_TRUE(std::binary_search(family.sets.begin(), family.sets.end(), c.members));
    }
    // Exposure after exhaustive enumeration never flags a sample missing from a feasible set.
    const auto exp = exposure_report(family.sets, m.samples());
    for (auto i : exp.exposed) {
      for (const auto& s : family.sets) EXPECT_TRUE(std::binary_search(s.begin(), s.end(), i));
    }
  }
}

TEST(Sampling, DeterministicForFixedSeed) {
  Rng rng(2);
  const auto m = testing::random_binary_cohort(rng, 8, 12);
  gen::GenParams gp;
  gp.n = 4;
  const std::vector<SampleIndex> truth = {0, 3, 5, 9};
  const auto record = gen::generate_one(m, truth, gp).tokens;
  ReverseParams params;
  params.n = 4;
  params.seed = 5;
  params.z_max = 2.0;
  const auto a = sample_candidate_sets(record, m, params, 8);
  params.threads = 3;
  const auto b = sample_candidate_sets(record, m, params, 8);
  ASSERT_EQ(a.sets.size(), b.sets.size());
  for (std::size_t i = 0; i < a.sets.size(); ++i) EXPECT_EQ(a.sets[i], b.sets[i]);
}

TEST(Sampling, SingleTrialGivesOneSetOfSizeN) {
  const auto m = testing::worked_example_cohort();
  ReverseParams params;
  params.n = 2;
  const auto s = sample_candidate_sets(m.column(1), m, params, 1);
  ASSERT_EQ(s.sets.size(), 1u);
  EXPECT_EQ(s.sets[0].members.size(), 2u);
  EXPECT_THROW(sample_candidate_sets(m.column(1), m, params, 0), std::invalid_argument);
}

TEST(Sampling, TrueClusterSatisfiesItsOwnConstraintsAtZeroZ) {
  Rng rng(77);
  for (int iter = 0; iter < 40; ++iter) {
    const auto m = testing::random_binary_cohort(rng, 10, 15);
    const auto plan = hap::build_clusters(m, 5, 3, static_cast<std::uint64_t>(iter));
    gen::GenParams gp;
    gp.n = 5;
    gp.seed = static_cast<std::uint64_t>(iter);
    const auto record = gen::generate_one(m, plan.clusters[0], gp).tokens;
    ReverseParams params;
    params.n = 5;
    const auto p = build_reverse_constraints(record, m, params);
    auto sorted = plan.clusters[0];
    std::sort(sorted.begin(), sorted.end());
    EXPECT_TRUE(satisfies(p, sorted));
  }
}

TEST(Exposure, IdenticalSetsExposeEveryMember) {
  const std::vector<std::vector<SampleIndex>> sets = {{1, 2}, {1, 2}, {1, 2}};
  const auto r = exposure_report(sets, 4);
  EXPECT_EQ(r.exposed, (std::vector<SampleIndex>{1, 2}));
  EXPECT_DOUBLE_EQ(r.frequency[1], 1.0);
  EXPECT_DOUBLE_EQ(r.frequency[0], 0.0);
}

TEST(Exposure, AbsentOnceMeansNotExposed) {
  const std::vector<std::vector<SampleIndex>> sets = {{1, 2}, {1, 3}};
  const auto r = exposure_report(sets, 4);
  EXPECT_EQ(r.exposed, (std::vector<SampleIndex>{1}));
  EXPECT_DOUBLE_EQ(r.frequency[2], 0.5);
}

TEST(Wilson, ZeroOfTwentyUpperBound) {
  // Direct evaluation: z = 1.6448536, n = 20, p = 0 gives upper = z^2/(n + z^2).
  const double z = 1.6448536269514722;
  const double expected = z * z / (20.0 + z * z);
  const auto ci = wilson_interval(0, 20);
  EXPECT_NEAR(ci.upper, expected, 1e-12);
  EXPECT_NEAR(ci.upper, 0.119, 5e-4);
  EXPECT_DOUBLE_EQ(ci.lower, 0.0);
}

TEST(Wilson, SymmetricAtHalf) {
  const auto ci = wilson_interval(10, 20);
  EXPECT_NEAR(ci.lower + ci.upper, 1.0, 1e-12);
}

TEST(Posterior, Substitution) {
  EXPECT_DOUBLE_EQ(membership_posterior(1.0, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(membership_posterior(0.0, 5.0), 1.0);
  double prev = 1.0;
  for (double zeta = 0.1; zeta < 5; zeta += 0.3) {
    const double p = membership_posterior(zeta, 0.7);
    EXPECT_LT(p, prev);
    prev = p;
  }
}

TEST(Posterior, MatchesDirectBayesOnDeskInstances) {
  Rng rng(1234);
  int nontrivial = 0;
  for (int iter = 0; iter < 12; ++iter) {
    const std::size_t samples = 4 + rng.below(3);
    const std::size_t n = 2 + rng.below(2);
    const auto m = testing::random_binary_cohort(rng, 2 + rng.below(3), samples);
    const auto truth = testing::combinations(samples, n)[0];
    gen::GenParams gp;
    gp.n = n;
    gp.seed = static_cast<std::uint64_t>(iter);
    const auto record = gen::generate_one(m, truth, gp).tokens;
    for (SampleIndex target = 0; target < samples; ++target) {
      const auto rep = exact_posterior(record, m, target, n);
      const double bayes = testing::bayes_membership(m, n, record, target);
      ASSERT_NEAR(rep.posterior, bayes, 1e-9) << "iteration " << iter << " target " << target;
      EXPECT_GE(rep.posterior, 0.0);
      EXPECT_LE(rep.posterior, 1.0);
      nontrivial += rep.posterior > 0.0 && rep.posterior < 1.0;
    }
  }
  EXPECT_GT(nontrivial, 10);
}

TEST(Posterior, AlwaysPresentTargetHasPosteriorOne) {
  const auto m = testing::worked_example_cohort();
  // With N = M every compatible set is the whole cohort.
  const auto rep = exact_posterior(m.column(0), m, 2, 4, {10, 5, 8});
  EXPECT_EQ(rep.n_out + rep.n_in, rep.combinations.size());
  const auto full = exact_posterior(m.column(0), m.select_samples(std::vector<SampleIndex>{0, 1, 2}), 1, 3);
  EXPECT_EQ(full.n_out, 0u);
  EXPECT_DOUBLE_EQ(full.posterior, 1.0);
}

TEST(Posterior, RefusesLargeInstances) {
  Rng rng(1);
  const auto m = testing::random_binary_cohort(rng, 9, 5);
  EXPECT_THROW(exact_posterior(m.column(0), m, 0, 2), std::invalid_argument);
  const auto wide = testing::random_binary_cohort(rng, 3, 11);
  EXPECT_THROW(exact_posterior(wide.column(0), wide, 0, 2), std::invalid_argument);
}

TEST(Posterior, NoMemberCombinationsIsFlagged) {
  // Sample 2 carries a token the record lacks at every site where the others agree.
  const auto m = hap::AlleleMatrix::from_rows({"a", "b"}, {"s0", "s1", "s2"}, {{"0", "0", "1"}, {"0", "0", "1"}},
                                              std::vector<std::string>{"0", "1"});
  const std::vector<TokenId> record = {0, 0};
  const auto rep = exact_posterior(record, m, 2, 1);
  EXPECT_TRUE(rep.no_member_combinations);
  EXPECT_DOUBLE_EQ(rep.posterior, 0.0);
}

}  // namespace
}  // namespace satgen::rev
