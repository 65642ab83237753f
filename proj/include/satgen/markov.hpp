#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "satgen/generator.hpp"
#include "satgen/hapdata.hpp"
#include "satgen/parallel.hpp"
#include "satgen/rng.hpp"

namespace satgen::markov {

using hap::AlleleMatrix;
using hap::TokenId;

using Context = std::vector<TokenId>;  // preceding tokens, oldest first
using Counts = std::vector<std::uint32_t>;

// Position-indexed conditional counts. tables[j][L] maps the L tokens before
// site j to counts of the token at j, for every L up to min(w - 1, j), so an
// unseen long context can back off to its longest observed suffix.
struct MarkovModel {
  std::size_t window = 1;
  double epsilon = 1e-9;
  std::vector<std::size_t> alphabet_sizes;
  std::vector<std::vector<std::map<Context, Counts>>> tables;

  std::size_t sites() const noexcept { return alphabet_sizes.size(); }
  std::size_t max_context(std::size_t site) const noexcept { return std::min(window - 1, site); }

  // Smoothed next-token distribution after backing off to the longest
  // suffix of `history` seen in training.
  std::vector<double> conditional(std::size_t site, std::span<const TokenId> history) const {
    const std::size_t longest = std::min(max_context(site), history.size());
    for (std::size_t len = longest + 1; len-- > 0;) {
      const Context ctx(history.end() - static_cast<std::ptrdiff_t>(len), history.end());
      const auto& table = tables[site][len];
      const auto it = table.find(ctx);
      if (it == table.end()) continue;
      const auto& counts = it->second;
      double total = 0;
      for (auto c : counts) total += c;
      if (total == 0) continue;
      const double denom = total + epsilon * static_cast<double>(counts.size());
      std::vector<double> p(counts.size());
      for (std::size_t t = 0; t < counts.size(); ++t) p[t] = (counts[t] + epsilon) / denom;
      return p;
    }
    return std::vector<double>(alphabet_sizes[site], 1.0 / static_cast<double>(alphabet_sizes[site]));
  }
};

inline MarkovModel markov_fit(const AlleleMatrix& m, std::size_t window, double epsilon = 1e-9) {
  if (window < 1) throw std::invalid_argument("Markov window must be at least 1");
  if (!(epsilon >= 0)) throw std::invalid_argument("smoothing epsilon must be non-negative");
  MarkovModel model;
  model.window = window;
  model.epsilon = epsilon;
  model.alphabet_sizes.resize(m.sites());
  model.tables.resize(m.sites());
  for (std::size_t j = 0; j < m.sites(); ++j) {
    model.alphabet_sizes[j] = m.alphabet(j).size();
    model.tables[j].resize(model.max_context(j) + 1);
  }
  Context history;
  for (std::size_t i = 0; i < m.samples(); ++i) {
    history.clear();
    for (std::size_t j = 0; j < m.sites(); ++j) {
      const TokenId tok = m.at(j, i);
      for (std::size_t len = 0; len <= model.max_context(j); ++len) {
        Context ctx(history.end() - static_cast<std::ptrdiff_t>(len), history.end());
        auto& counts = model.tables[j][len][std::move(ctx)];
        if (counts.empty()) counts.assign(model.alphabet_sizes[j], 0);
        ++counts[tok];
      }
      history.push_back(tok);
    }
  }
  return model;
}

inline std::vector<TokenId> markov_sample(const MarkovModel& model, Rng& rng) {
  std::vector<TokenId> out;
  out.reserve(model.sites());
  for (std::size_t j = 0; j < model.sites(); ++j) {
    const auto p = model.conditional(j, out);
    double u = rng.uniform();
    TokenId pick = static_cast<TokenId>(p.size() - 1);
    for (std::size_t t = 0; t < p.size(); ++t) {
      if (u < p[t]) {
        pick = static_cast<TokenId>(t);
        break;
      }
      u -= p[t];
    }
    out.push_back(pick);
  }
  return out;
}

// Left-to-right sampling; record i draws from its own derived stream.
inline std::vector<gen::SyntheticRecord> markov_generate(const MarkovModel& model, std::size_t count,
                                                         std::uint64_t seed, unsigned threads = 1) {
  std::vector<gen::SyntheticRecord> out(count);
  parallel_for(count, threads, [&](std::size_t i) {
    const auto s = derive_seed(seed, "markov-record", i);
    Rng rng(s);
    out[i].tokens = markov_sample(model, rng);
    out[i].seed = s;
    out[i].n = 0;
  });
  return out;
}

}  // namespace satgen::markov
