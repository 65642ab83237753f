#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "satgen/rng.hpp"

namespace satgen::hap {

using TokenId = std::uint32_t;
using SampleIndex = std::uint32_t;

// Categorical cohort: S sites by M samples, one interned token per cell.
// Cells are stored site-major so per-site scans (signatures, LD) are
// contiguous. Immutable after construction.
class AlleleMatrix {
 public:
  AlleleMatrix() = default;

  AlleleMatrix(std::vector<std::string> site_ids, std::vector<std::string> sample_ids,
               std::vector<std::vector<std::string>> site_alphabets, std::vector<TokenId> cells)
      : site_ids_(std::move(site_ids)),
        sample_ids_(std::move(sample_ids)),
        alphabets_(std::move(site_alphabets)),
        cells_(std::move(cells)) {
    validate();
  }

  // Interns string rows (one row per site). Without a declared alphabet each
  // site's alphabet lists tokens in order of first appearance; with one,
  // every site gets the declared list and unknown tokens are rejected.
  static AlleleMatrix from_rows(std::vector<std::string> site_ids, std::vector<std::string> sample_ids,
                                const std::vector<std::vector<std::string>>& rows,
                                const std::optional<std::vector<std::string>>& declared_alphabet = std::nullopt) {
    const std::size_t s = rows.size();
    const std::size_t m = sample_ids.size();
    std::vector<std::vector<std::string>> alphabets(s);
    std::vector<TokenId> cells(s * m);
    for (std::size_t j = 0; j < s; ++j) {
      if (rows[j].size() != m) throw std::invalid_argument("row " + std::to_string(j) + " is ragged");
      std::unordered_map<std::string, TokenId> index;
      if (declared_alphabet) {
        alphabets[j] = *declared_alphabet;
        for (std::size_t t = 0; t < alphabets[j].size(); ++t) {
          index.emplace(alphabets[j][t], static_cast<TokenId>(t));
        }
      }
      for (std::size_t i = 0; i < m; ++i) {
        const std::string& tok = rows[j][i];
        auto it = index.find(tok);
        if (it == index.end()) {
          if (declared_alphabet) {
            throw std::invalid_argument("token '" + tok + "' is not in the declared alphabet");
          }
          it = index.emplace(tok, static_cast<TokenId>(alphabets[j].size())).first;
          alphabets[j].push_back(tok);
        }
        cells[j * m + i] = it->second;
      }
    }
    return AlleleMatrix(std::move(site_ids), std::move(sample_ids), std::move(alphabets), std::move(cells));
  }

  std::size_t sites() const noexcept { return site_ids_.size(); }
  std::size_t samples() const noexcept { return sample_ids_.size(); }

  TokenId at(std::size_t site, std::size_t sample) const { return cells_[site * samples() + sample]; }

  std::span<const TokenId> row(std::size_t site) const {
    return {cells_.data() + site * samples(), samples()};
  }

  const std::vector<std::string>& alphabet(std::size_t site) const { return alphabets_[site]; }
  const std::string& token(std::size_t site, TokenId id) const { return alphabets_[site][id]; }

  std::optional<TokenId> find_token(std::size_t site, std::string_view tok) const {
    const auto& a = alphabets_[site];
    for (std::size_t t = 0; t < a.size(); ++t) {
      if (a[t] == tok) return static_cast<TokenId>(t);
    }
    return std::nullopt;
  }

  const std::vector<std::string>& site_ids() const noexcept { return site_ids_; }
  const std::vector<std::string>& sample_ids() const noexcept { return sample_ids_; }

  // Column of one sample as token ids.
  std::vector<TokenId> column(std::size_t sample) const {
    std::vector<TokenId> col(sites());
    for (std::size_t j = 0; j < sites(); ++j) col[j] = at(j, sample);
    return col;
  }

  // Sub-cohort over the given samples (in the given order); alphabets are kept.
  AlleleMatrix select_samples(std::span<const SampleIndex> members) const {
    std::vector<std::string> ids;
    ids.reserve(members.size());
    for (SampleIndex i : members) ids.push_back(sample_ids_.at(i));
    std::vector<TokenId> cells(sites() * members.size());
    for (std::size_t j = 0; j < sites(); ++j) {
      for (std::size_t k = 0; k < members.size(); ++k) cells[j * members.size() + k] = at(j, members[k]);
    }
    return AlleleMatrix(site_ids_, std::move(ids), alphabets_, std::move(cells));
  }

  // Builds a matrix sharing this cohort's sites and alphabets from token-id
  // columns (one per sample).
  AlleleMatrix with_columns(const std::vector<std::vector<TokenId>>& columns,
                            std::vector<std::string> sample_ids) const {
    if (columns.size() != sample_ids.size()) throw std::invalid_argument("column/id count mismatch");
    std::vector<TokenId> cells(sites() * columns.size());
    for (std::size_t k = 0; k < columns.size(); ++k) {
      if (columns[k].size() != sites()) throw std::invalid_argument("column length differs from site count");
      for (std::size_t j = 0; j < sites(); ++j) cells[j * columns.size() + k] = columns[k][j];
    }
    return AlleleMatrix(site_ids_, std::move(sample_ids), alphabets_, std::move(cells));
  }

  friend bool operator==(const AlleleMatrix&, const AlleleMatrix&) = default;

 private:
  void validate() const {
    if (site_ids_.empty()) throw std::invalid_argument("matrix needs at least one site");
    if (sample_ids_.empty()) throw std::invalid_argument("matrix needs at least one sample");
    if (alphabets_.size() != site_ids_.size()) throw std::invalid_argument("one alphabet per site required");
    if (cells_.size() != site_ids_.size() * sample_ids_.size()) throw std::invalid_argument("cell count mismatch");
    for (std::size_t j = 0; j < alphabets_.size(); ++j) {
      const auto& a = alphabets_[j];
      if (a.empty()) throw std::invalid_argument("site " + site_ids_[j] + " has an empty alphabet");
      std::vector<std::string_view> sorted(a.begin(), a.end());
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw std::invalid_argument("site " + site_ids_[j] + " has a duplicate alphabet entry");
      }
      for (std::size_t i = 0; i < sample_ids_.size(); ++i) {
        if (cells_[j * sample_ids_.size() + i] >= a.size()) {
          throw std::invalid_argument("cell outside alphabet at site " + site_ids_[j]);
        }
      }
    }
  }

  std::vector<std::string> site_ids_;
  std::vector<std::string> sample_ids_;
  std::vector<std::vector<std::string>> alphabets_;
  std::vector<TokenId> cells_;
};

// Number of sites where two sample columns differ.
inline std::size_t hamming(std::size_t a, std::size_t b, const AlleleMatrix& m) {
  if (a >= m.samples() || b >= m.samples()) throw std::out_of_range("sample index out of range");
  std::size_t d = 0;
  for (std::size_t j = 0; j < m.sites(); ++j) d += m.at(j, a) != m.at(j, b);
  return d;
}

// Hamming distance between two token sequences over the same sites.
inline std::size_t hamming(std::span<const TokenId> a, std::span<const TokenId> b) {
  if (a.size() != b.size()) throw std::invalid_argument("sequence lengths differ");
  std::size_t d = 0;
  for (std::size_t j = 0; j < a.size(); ++j) d += a[j] != b[j];
  return d;
}

// Distances from one sample to every sample, scanning rows.
inline std::vector<std::size_t> distances_from(std::size_t sample, const AlleleMatrix& m) {
  std::vector<std::size_t> dist(m.samples(), 0);
  for (std::size_t j = 0; j < m.sites(); ++j) {
    const auto r = m.row(j);
    const TokenId t = r[sample];
    for (std::size_t i = 0; i < r.size(); ++i) dist[i] += r[i] != t;
  }
  return dist;
}

// Seeded random halves of sizes floor(M/2) and ceil(M/2).
inline std::pair<AlleleMatrix, AlleleMatrix> split_cohort(const AlleleMatrix& m, std::uint64_t seed) {
  if (m.samples() < 2) throw std::invalid_argument("split needs at least two samples");
  std::vector<SampleIndex> order(m.samples());
  std::iota(order.begin(), order.end(), SampleIndex{0});
  Rng rng(derive_seed(seed, "split"));
  rng.shuffle(order);
  const std::size_t half = m.samples() / 2;
  std::vector<SampleIndex> a(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(half));
  std::vector<SampleIndex> b(order.begin() + static_cast<std::ptrdiff_t>(half), order.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return {m.select_samples(a), m.select_samples(b)};
}

}  // namespace satgen::hap
