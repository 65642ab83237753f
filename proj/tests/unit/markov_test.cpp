#include <gtest/gtest.h>

#include <numeric>

#include "satgen/markov.hpp"
#include "satgen/metrics.hpp"
#include "support/oracles.hpp"

namespace satgen::markov {
namespace {

AlleleMatrix rows_of(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::string> sites, samples;
  for (std::size_t j = 0; j < rows.size(); ++j) sites.push_back("s" + std::to_string(j));
  for (std::size_t i = 0; i < rows[0].size(); ++i) samples.push_back("h" + std::to_string(i));
  return AlleleMatrix::from_rows(sites, samples, rows, std::vector<std::string>{"0", "1"});
}

TEST(MarkovFit, WindowOneIsPerSiteMarginal) {
  const auto m = rows_of({{"0", "1", "1", "1"}, {"0", "0", "0", "1"}});
  const auto model = markov_fit(m, 1, 0.0);
  EXPECT_EQ(model.tables[1].size(), 1u);
  const std::vector<TokenId> any = {1};
  const auto p0 = model.conditional(0, {});
  const auto p1 = model.conditional(1, any);
  EXPECT_DOUBLE_EQ(p0[1], 0.75);
  EXPECT_DOUBLE_EQ(p1[1], 0.25);
}

// Samples (columns): 000, 011, 011, 110, 111.
TEST(MarkovFit, HandTalliedCountsOnThreeSites) {
  const auto m = rows_of({{"0", "0", "0", "1", "1"}, {"0", "1", "1", "1", "1"}, {"0", "1", "1", "0", "1"}});
  const auto model = markov_fit(m, 3);
  EXPECT_EQ(model.tables[0][0].at({}), (Counts{3, 2}));
  EXPECT_EQ(model.tables[1][1].at({0}), (Counts{1, 2}));
  EXPECT_EQ(model.tables[1][1].at({1}), (Counts{0, 2}));
  EXPECT_EQ(model.tables[2][2].at({0, 1}), (Counts{0, 2}));
  EXPECT_EQ(model.tables[2][2].at({1, 1}), (Counts{1, 1}));
  EXPECT_EQ(model.tables[2][1].at({1}), (Counts{1, 3}));
  EXPECT_EQ(model.tables[2][2].count({1, 0}), 0u);
}

TEST(MarkovFit, ConditionalsSumToOneAndBackOff) {
  const auto m = rows_of({{"0", "0", "1"}, {"0", "1", "1"}, {"1", "1", "0"}});
  const auto model = markov_fit(m, 3);
  for (std::size_t j = 0; j < 3; ++j) {
    for (TokenId a = 0; a < 2; ++a) {
      for (TokenId b = 0; b < 2; ++b) {
        const std::vector<TokenId> h = {a, b};
        const auto p = model.conditional(j, std::span<const TokenId>(h).first(std::min<std::size_t>(j, 2)));
        EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
      }
    }
  }
  // Context (1, 0) never precedes site 2; back off to suffix (0), seen once with token 1.
  const std::vector<TokenId> unseen = {1, 0};
  EXPECT_NEAR(model.conditional(2, unseen)[1], 1.0, 1e-8);
  EXPECT_THROW(markov_fit(m, 0), std::invalid_argument);
}

TEST(MarkovGenerate, PointMassReproducesTrainingSample) {
  const auto m = rows_of({{"1", "1", "1"}, {"0", "0", "0"}, {"1", "1", "1"}});
  const auto records = markov_generate(markov_fit(m, 2), 20, 3);
  for (const auto& r : records) EXPECT_EQ(r.tokens, (std::vector<TokenId>{1, 0, 1}));
}

TEST(MarkovGenerate, DeterministicAcrossThreads) {
  Rng rng(1);
  const auto m = testing::random_binary_cohort(rng, 25, 30);
  const auto model = markov_fit(m, 4);
  const auto a = markov_generate(model, 50, 9);
  const auto b = markov_generate(model, 50, 9, 4);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, markov_generate(model, 50, 10));
}

TEST(MarkovGenerate, WindowOneMatchesMarginals) {
  Rng rng(2);
  const auto m = testing::random_binary_cohort(rng, 10, 40);
  const auto model = markov_fit(m, 1);
  const std::size_t n = 10000;
  const auto synth = gen::records_to_matrix(m, markov_generate(model, n, 4));
  for (std::size_t j = 0; j < m.sites(); ++j) {
    const double p = metrics::allele_frequency(m, j, TokenId{1});
    const double q = metrics::allele_frequency(synth, j, TokenId{1});
    EXPECT_NEAR(q, p, 0.05);
    if (p > 0 && p < 1) {
      // Chi-square, one degree of freedom; 10.828 is the p = 0.001 critical value.
      const double e1 = p * n, e0 = (1 - p) * n, o1 = q * n, o0 = n - o1;
      const double chi = (o1 - e1) * (o1 - e1) / e1 + (o0 - e0) * (o0 - e0) / e0;
      EXPECT_LT(chi, 10.828) << "site " << j;
    }
  }
}

TEST(MarkovGenerate, WindowTwoKeepsAdjacentLd) {
  // Each site copies its predecessor with probability 0.8.
  Rng rng(3);
  const std::size_t s = 12, m = 200;
  std::vector<std::vector<std::string>> rows(s, std::vector<std::string>(m));
  for (std::size_t i = 0; i < m; ++i) {
    bool v = rng.coin();
    for (std::size_t j = 0; j < s; ++j) {
      if (j > 0 && rng.uniform() < 0.2) v = !v;
      rows[j][i] = v ? "1" : "0";
    }
  }
  const auto real = rows_of(rows);
  const auto synth = gen::records_to_matrix(real, markov_generate(markov_fit(real, 2), 4000, 5));
  for (std::size_t j = 0; j + 1 < s; ++j) {
    EXPECT_NEAR(*metrics::ld_r2(synth, j, j + 1), *metrics::ld_r2(real, j, j + 1), 0.05) << "pair " << j;
  }
}

}  // namespace
}  // namespace satgen::markov
