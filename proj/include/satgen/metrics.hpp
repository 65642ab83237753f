#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "satgen/error.hpp"
#include "satgen/hapdata.hpp"
#include "satgen/rng.hpp"

namespace satgen::metrics {

using hap::AlleleMatrix;
using hap::TokenId;

// ---------------------------------------------------------------- frequency

inline double allele_frequency(const AlleleMatrix& m, std::size_t site, TokenId token) {
  if (site >= m.sites()) throw std::out_of_range("site index out of range");
  if (token >= m.alphabet(site).size()) throw std::invalid_argument("token not in site alphabet");
  const auto row = m.row(site);
  const auto hits = std::count(row.begin(), row.end(), token);
  return static_cast<double>(hits) / static_cast<double>(m.samples());
}

inline double allele_frequency(const AlleleMatrix& m, std::size_t site, std::string_view token) {
  if (site >= m.sites()) throw std::out_of_range("site index out of range");
  const auto id = m.find_token(site, token);
  if (!id) throw std::invalid_argument("unknown token '" + std::string(token) + "' at site " + m.site_ids()[site]);
  return allele_frequency(m, site, *id);
}

inline std::optional<double> pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("pearson: length mismatch");
  const double n = static_cast<double>(a.size());
  if (a.empty()) return std::nullopt;
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0 || sbb == 0) return std::nullopt;
  return sab / std::sqrt(saa * sbb);
}

inline void require_matched(const AlleleMatrix& real, const AlleleMatrix& synth) {
  if (real.sites() != synth.sites() || real.site_ids() != synth.site_ids()) {
    throw std::invalid_argument("real and synthetic site sets differ");
  }
  for (std::size_t j = 0; j < real.sites(); ++j) {
    if (real.alphabet(j) != synth.alphabet(j)) {
      throw std::invalid_argument("real and synthetic alphabets differ at site " + real.site_ids()[j]);
    }
  }
}

// Correlation of per-(site, token) frequencies between two matched cohorts.
inline std::optional<double> frequency_correlation(const AlleleMatrix& real, const AlleleMatrix& synth) {
  require_matched(real, synth);
  std::vector<double> a, b;
  for (std::size_t j = 0; j < real.sites(); ++j) {
    for (TokenId t = 0; t < real.alphabet(j).size(); ++t) {
      a.push_back(allele_frequency(real, j, t));
      b.push_back(allele_frequency(synth, j, t));
    }
  }
  return pearson(a, b);
}

// ----------------------------------------------------------------- dosage

// Least frequent token present at each site (lowest id on ties). Used to
// binarize a site minor-vs-rest.
inline std::vector<TokenId> minor_tokens(const AlleleMatrix& m) {
  std::vector<TokenId> out(m.sites());
  for (std::size_t j = 0; j < m.sites(); ++j) {
    std::vector<std::size_t> counts(m.alphabet(j).size(), 0);
    for (auto t : m.row(j)) ++counts[t];
    std::size_t best = SIZE_MAX;
    for (TokenId t = 0; t < counts.size(); ++t) {
      if (counts[t] > 0 && counts[t] < best) {
        best = counts[t];
        out[j] = t;
      }
    }
  }
  return out;
}

// Rows are samples, columns are sites; 1 where the sample carries the minor token.
inline std::vector<std::vector<double>> dosage_rows(const AlleleMatrix& m, std::span<const TokenId> minor) {
  if (minor.size() != m.sites()) throw std::invalid_argument("one minor token per site required");
  std::vector<std::vector<double>> rows(m.samples(), std::vector<double>(m.sites()));
  for (std::size_t j = 0; j < m.sites(); ++j) {
    const auto row = m.row(j);
    for (std::size_t i = 0; i < row.size(); ++i) rows[i][j] = row[i] == minor[j] ? 1.0 : 0.0;
  }
  return rows;
}

inline std::vector<std::vector<double>> dosage_rows(const AlleleMatrix& m) { return dosage_rows(m, minor_tokens(m)); }

// ----------------------------------------------------------------------- LD

namespace detail {

// Packed minor-indicator bits per site plus popcounts, for r² over many pairs.
struct Indicators {
  std::size_t n = 0;
  std::size_t words = 0;
  std::vector<std::uint64_t> bits;
  std::vector<std::size_t> ones;

  Indicators(const AlleleMatrix& m, std::span<const TokenId> minor)
      : n(m.samples()), words((m.samples() + 63) / 64), bits(m.sites() * words, 0), ones(m.sites(), 0) {
    for (std::size_t j = 0; j < m.sites(); ++j) {
      const auto row = m.row(j);
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (row[i] == minor[j]) {
          bits[j * words + i / 64] |= std::uint64_t{1} << (i % 64);
          ++ones[j];
        }
      }
    }
  }

  std::optional<double> r2(std::size_t a, std::size_t b) const {
    const std::size_t na = ones[a], nb = ones[b];
    if (na == 0 || na == n || nb == 0 || nb == n) return std::nullopt;
    std::size_t nab = 0;
    for (std::size_t w = 0; w < words; ++w) {
      nab += static_cast<std::size_t>(std::popcount(bits[a * words + w] & bits[b * words + w]));
    }
    // r² = (n·nab − na·nb)² / (na(n−na)·nb(n−nb)), numerator difference formed exactly in integers.
    const auto d = static_cast<double>(static_cast<long long>(n * nab) - static_cast<long long>(na * nb));
    const double den = static_cast<double>(na) * static_cast<double>(n - na) * static_cast<double>(nb) *
                       static_cast<double>(n - nb);
    return std::min(1.0, d * d / den);
  }
};

}  // namespace detail

// Squared correlation of minor-token indicators; empty when either site has
// zero variance.
inline std::optional<double> ld_r2(const AlleleMatrix& m, std::size_t a, std::size_t b,
                                   std::optional<std::vector<TokenId>> minor = std::nullopt) {
  if (a >= m.sites() || b >= m.sites()) throw std::out_of_range("site index out of range");
  const auto mt = minor ? *minor : minor_tokens(m);
  return detail::Indicators(m, mt).r2(a, b);
}

struct LdPair {
  std::size_t a = 0;
  std::size_t b = 0;
  std::optional<double> r2;
};

// All pairs a < b with b − a ≤ max_distance (0 = unbounded).
inline std::vector<LdPair> ld_pairs(const AlleleMatrix& m, std::size_t max_distance = 0) {
  const detail::Indicators ind(m, minor_tokens(m));
  std::vector<LdPair> out;
  for (std::size_t a = 0; a < m.sites(); ++a) {
    const std::size_t end = max_distance == 0 ? m.sites() : std::min(m.sites(), a + max_distance + 1);
    for (std::size_t b = a + 1; b < end; ++b) out.push_back({a, b, ind.r2(a, b)});
  }
  return out;
}

struct LdOptions {
  std::size_t max_distance = 0;      // 0 = every pair
  std::vector<std::size_t> windows;  // windowed error per window width (in sites)
};

struct LdBin {
  std::size_t distance = 0;
  std::size_t pairs = 0;
  double mean_square_error = 0;
  double mean_real_r2 = 0;
  double mean_synth_r2 = 0;
};

struct LdReport {
  std::vector<LdBin> bins;                        // nonempty per-distance bins
  double binned_error = 0;                        // mean over bins of the within-bin mean
  double overall_error = 0;                       // mean over all scored pairs
  std::map<std::size_t, double> windowed_error;   // window width -> mean over windows
  double reference_average_ld = 0;                // mean real r² over scored pairs
  double percent_of_reference = 0;                // binned_error / reference_average_ld * 100
  std::size_t scored_pairs = 0;
  std::size_t excluded_pairs = 0;                 // either side had zero variance
};

// Compares pairwise LD of a synthetic cohort against its reference. Both
// cohorts are binarized with the reference's minor tokens so multiallelic
// sites are encoded identically on each side.
inline LdReport ld_square_error(const AlleleMatrix& real, const AlleleMatrix& synth, const LdOptions& opts = {}) {
  require_matched(real, synth);
  const std::size_t s = real.sites();
  const auto minor = minor_tokens(real);
  const detail::Indicators ri(real, minor), si(synth, minor);
  const std::size_t max_d = opts.max_distance == 0 ? (s > 0 ? s - 1 : 0) : std::min(opts.max_distance, s - 1);

  std::size_t widest = max_d;
  for (auto w : opts.windows) {
    if (w < 2) throw std::invalid_argument("LD window must span at least 2 sites");
    widest = std::max(widest, std::min(w - 1, s - 1));
  }

  LdReport rep;
  std::vector<double> bin_err(max_d + 1, 0), bin_real(max_d + 1, 0), bin_synth(max_d + 1, 0);
  std::vector<std::size_t> bin_n(max_d + 1, 0);
  // err[a][d-1] for d <= widest, NaN when excluded; needed by the windowed pass.
  const bool need_windows = !opts.windows.empty();
  std::vector<double> err(need_windows ? s * widest : 0, std::nan(""));
  double total = 0, total_real = 0;

  for (std::size_t a = 0; a < s; ++a) {
    for (std::size_t d = 1; d <= widest && a + d < s; ++d) {
      const auto r = ri.r2(a, a + d);
      const auto y = si.r2(a, a + d);
      if (!r || !y) {
        if (d <= max_d) ++rep.excluded_pairs;
        continue;
      }
      const double e = (*y - *r) * (*y - *r);
      if (need_windows) err[a * widest + d - 1] = e;
      if (d > max_d) continue;
      bin_err[d] += e;
      bin_real[d] += *r;
      bin_synth[d] += *y;
      ++bin_n[d];
      total += e;
      total_real += *r;
      ++rep.scored_pairs;
    }
  }

  double bin_sum = 0;
  for (std::size_t d = 1; d <= max_d; ++d) {
    if (bin_n[d] == 0) continue;
    const double k = static_cast<double>(bin_n[d]);
    rep.bins.push_back({d, bin_n[d], bin_err[d] / k, bin_real[d] / k, bin_synth[d] / k});
    bin_sum += bin_err[d] / k;
  }
  if (!rep.bins.empty()) rep.binned_error = bin_sum / static_cast<double>(rep.bins.size());
  if (rep.scored_pairs > 0) {
    rep.overall_error = total / static_cast<double>(rep.scored_pairs);
    rep.reference_average_ld = total_real / static_cast<double>(rep.scored_pairs);
  }
  rep.percent_of_reference = rep.reference_average_ld > 0 ? rep.binned_error / rep.reference_average_ld * 100.0 : 0.0;

  // Sliding windows [start, start + w): running sum over scored pairs inside.
  for (auto w : opts.windows) {
    const std::size_t width = std::min(w, s);
    const std::size_t span = width - 1;
    double sum = 0, windows_total = 0;
    std::size_t count = 0, windows = 0;
    auto pair_err = [&](std::size_t a, std::size_t d) { return err[a * widest + d - 1]; };
    for (std::size_t a = 0; a < width; ++a) {
      for (std::size_t d = 1; a + d < width; ++d) {
        const double e = pair_err(a, d);
        if (!std::isnan(e)) sum += e, ++count;
      }
    }
    for (std::size_t start = 0;; ++start) {
      if (count > 0) {
        windows_total += sum / static_cast<double>(count);
        ++windows;
      }
      if (start + width >= s) break;
      // Drop pairs anchored at `start`, add pairs ending at the new site.
      for (std::size_t d = 1; d <= span; ++d) {
        const double e = pair_err(start, d);
        if (!std::isnan(e)) sum -= e, --count;
      }
      const std::size_t last = start + width;
      for (std::size_t d = 1; d <= span; ++d) {
        const double e = pair_err(last - d, d);
        if (!std::isnan(e)) sum += e, ++count;
      }
      if (count == 0) sum = 0;
    }
    rep.windowed_error[w] = windows > 0 ? windows_total / static_cast<double>(windows) : 0.0;
  }
  return rep;
}

// ---------------------------------------------------------------------- PCA

using Matrix = std::vector<std::vector<double>>;

namespace detail {

// Cyclic Jacobi eigendecomposition of a small symmetric matrix. Returns
// eigenvalues descending with eigenvectors as columns of `vecs`.
inline void jacobi_eigen(Matrix a, std::vector<double>& vals, Matrix& vecs) {
  const std::size_t n = a.size();
  vecs.assign(n, std::vector<double>(n, 0));
  for (std::size_t i = 0; i < n; ++i) vecs[i][i] = 1;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0, scale = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) (i == j ? scale : off) += a[i][j] * a[i][j];
    }
    if (off <= 1e-30 * std::max(scale, 1e-300)) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p][q] == 0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = vecs[k][p], vkq = vecs[k][q];
          vecs[k][p] = c * vkp - s * vkq;
          vecs[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return a[x][x] > a[y][y]; });
  vals.resize(n);
  Matrix sorted(n, std::vector<double>(n));
  for (std::size_t c = 0; c < n; ++c) {
    vals[c] = a[order[c]][order[c]];
    for (std::size_t r = 0; r < n; ++r) sorted[r][c] = vecs[r][order[c]];
  }
  vecs = std::move(sorted);
}

// Modified Gram-Schmidt on the columns of q (stored as a vector of columns).
// Columns that collapse are replaced by a fresh direction from `rng`.
inline void orthonormalize(Matrix& cols, Rng& rng) {
  for (std::size_t c = 0; c < cols.size(); ++c) {
    for (int attempt = 0;; ++attempt) {
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t p = 0; p < c; ++p) {
          double dot = 0;
          for (std::size_t i = 0; i < cols[c].size(); ++i) dot += cols[c][i] * cols[p][i];
          for (std::size_t i = 0; i < cols[c].size(); ++i) cols[c][i] -= dot * cols[p][i];
        }
      }
      double norm = 0;
      for (double v : cols[c]) norm += v * v;
      norm = std::sqrt(norm);
      if (norm > 1e-10 || attempt > 20) {
        for (double& v : cols[c]) v /= norm;
        break;
      }
      for (double& v : cols[c]) v = rng.normal();
    }
  }
}

}  // namespace detail

struct PcaOptions {
  std::size_t max_iterations = 10000;
  double tolerance = 1e-8;
  std::uint64_t seed = 0;
};

struct PcaModel {
  std::vector<double> mean;
  Matrix components;                 // k rows, each a unit vector over the input dimensions
  std::vector<double> variances;     // eigenvalues of the sample covariance
  std::vector<double> explained_ratio;
  double total_variance = 0;
  std::size_t iterations = 0;
};

// Top-k principal components by orthogonal (subspace) iteration with
// Rayleigh-Ritz on the sample covariance. Iterates on a block wider than k
// so near-ties at the cut converge.
inline PcaModel pca_fit(const Matrix& rows, std::size_t k, const PcaOptions& opts = {}) {
  if (rows.empty()) throw std::invalid_argument("PCA needs at least one row");
  const std::size_t n = rows.size(), d = rows[0].size();
  for (const auto& r : rows) {
    if (r.size() != d) throw std::invalid_argument("PCA rows differ in length");
  }
  if (k < 1 || k > std::min(n, d)) throw std::invalid_argument("PCA component count must be in [1, min(rows, columns)]");

  PcaModel model;
  model.mean.assign(d, 0);
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < d; ++j) model.mean[j] += r[j];
  }
  for (double& v : model.mean) v /= static_cast<double>(n);
  Matrix x(n, std::vector<double>(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) x[i][j] = rows[i][j] - model.mean[j];
  }
  const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
  Matrix cov(d, std::vector<double>(d, 0));
  for (const auto& r : x) {
    for (std::size_t a = 0; a < d; ++a) {
      if (r[a] == 0) continue;
      for (std::size_t b = a; b < d; ++b) cov[a][b] += r[a] * r[b];
    }
  }
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a; b < d; ++b) cov[b][a] = cov[a][b] = cov[a][b] / denom;
    model.total_variance += cov[a][a];
  }

  const std::size_t block = std::min(d, k + 8);
  Rng rng(derive_seed(opts.seed, "pca-start"));
  Matrix q(block, std::vector<double>(d));
  for (auto& col : q) {
    for (double& v : col) v = rng.normal();
  }
  detail::orthonormalize(q, rng);

  auto apply = [&](const std::vector<double>& v) {
    std::vector<double> out(d, 0);
    for (std::size_t a = 0; a < d; ++a) {
      double s = 0;
      for (std::size_t b = 0; b < d; ++b) s += cov[a][b] * v[b];
      out[a] = s;
    }
    return out;
  };
  const double scale = std::max(1.0, model.total_variance);
  std::vector<double> vals;
  for (std::size_t it = 1;; ++it) {
    Matrix aq(block);
    for (std::size_t c = 0; c < block; ++c) aq[c] = apply(q[c]);
    // Rayleigh-Ritz: H = Qᵀ A Q, rotate Q onto H's eigenvectors.
    Matrix h(block, std::vector<double>(block));
    for (std::size_t a = 0; a < block; ++a) {
      for (std::size_t b = 0; b < block; ++b) {
        double s = 0;
        for (std::size_t i = 0; i < d; ++i) s += q[a][i] * aq[b][i];
        h[a][b] = s;
      }
    }
    for (std::size_t a = 0; a < block; ++a) {
      for (std::size_t b = a + 1; b < block; ++b) h[a][b] = h[b][a] = (h[a][b] + h[b][a]) / 2;
    }
    Matrix vecs;
    detail::jacobi_eigen(h, vals, vecs);
    Matrix ritz(block, std::vector<double>(d, 0)), aritz(block, std::vector<double>(d, 0));
    for (std::size_t c = 0; c < block; ++c) {
      for (std::size_t b = 0; b < block; ++b) {
        const double w = vecs[b][c];
        if (w == 0) continue;
        for (std::size_t i = 0; i < d; ++i) {
          ritz[c][i] += w * q[b][i];
          aritz[c][i] += w * aq[b][i];
        }
      }
    }
    double worst = 0;
    for (std::size_t c = 0; c < k; ++c) {
      double r = 0;
      for (std::size_t i = 0; i < d; ++i) {
        const double e = aritz[c][i] - vals[c] * ritz[c][i];
        r += e * e;
      }
      worst = std::max(worst, std::sqrt(r));
    }
    if (worst <= opts.tolerance * scale || block == d) {
      q = std::move(ritz);
      model.iterations = it;
      break;
    }
    if (it >= opts.max_iterations) throw Error("PCA did not converge within the iteration budget");
    q = std::move(aritz);
    detail::orthonormalize(q, rng);
  }

  for (std::size_t c = 0; c < k; ++c) {
    auto comp = q[c];
    std::size_t arg = 0;
    for (std::size_t i = 1; i < d; ++i) {
      if (std::abs(comp[i]) > std::abs(comp[arg]) + 1e-12) arg = i;
    }
    if (comp[arg] < 0) {
      for (double& v : comp) v = -v;
    }
    model.components.push_back(std::move(comp));
    const double var = std::max(0.0, vals[c]);
    model.variances.push_back(var);
    model.explained_ratio.push_back(model.total_variance > 0 ? var / model.total_variance : 0.0);
  }
  return model;
}

inline Matrix pca_project(const PcaModel& model, const Matrix& rows) {
  Matrix out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    if (r.size() != model.mean.size()) throw std::invalid_argument("projected row has the wrong dimension");
    std::vector<double> coords(model.components.size(), 0);
    for (std::size_t c = 0; c < model.components.size(); ++c) {
      for (std::size_t j = 0; j < r.size(); ++j) coords[c] += (r[j] - model.mean[j]) * model.components[c][j];
    }
    out.push_back(std::move(coords));
  }
  return out;
}

// ------------------------------------------------------- sliced Wasserstein

// Exact 2-Wasserstein distance between two 1-D empirical measures with
// uniform weights, integrating the squared quantile difference over the
// merged breakpoints.
inline double wasserstein_1d(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("Wasserstein needs non-empty point sets");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const std::size_t n = a.size(), m = b.size();
  double total = 0;
  if (n == m) {
    for (std::size_t i = 0; i < n; ++i) total += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(total / static_cast<double>(n));
  }
  // Walk breakpoints i/n and j/m in integer units of 1/(n·m).
  std::size_t i = 0, j = 0, pos = 0;
  while (i < n && j < m) {
    const std::size_t next_a = (i + 1) * m, next_b = (j + 1) * n;
    const std::size_t next = std::min(next_a, next_b);
    total += static_cast<double>(next - pos) * (a[i] - b[j]) * (a[i] - b[j]);
    pos = next;
    if (next_a == next) ++i;
    if (next_b == next) ++j;
  }
  return std::sqrt(total / (static_cast<double>(n) * static_cast<double>(m)));
}

struct WassersteinReport {
  double distance = 0;
  std::size_t num_projections = 0;
  std::uint64_t seed = 0;
  double percent_error = 0;  // distance / dimension * 100
};

inline std::size_t common_dimension(const Matrix& x, const Matrix& y) {
  if (x.empty() || y.empty()) throw std::invalid_argument("Wasserstein needs non-empty point sets");
  const std::size_t d = x[0].size();
  for (const auto& p : x) {
    if (p.size() != d) throw std::invalid_argument("point dimension mismatch");
  }
  for (const auto& p : y) {
    if (p.size() != d) throw std::invalid_argument("point dimension mismatch");
  }
  if (d == 0) throw std::invalid_argument("points need at least one coordinate");
  return d;
}

inline std::vector<double> project(const Matrix& pts, std::span<const double> dir) {
  std::vector<double> out(pts.size(), 0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < dir.size(); ++j) out[i] += pts[i][j] * dir[j];
  }
  return out;
}

// Mean of the 1-D distances along the given unit directions.
inline double sliced_wasserstein_along(const Matrix& x, const Matrix& y, const Matrix& directions) {
  const std::size_t d = common_dimension(x, y);
  if (directions.empty()) throw std::invalid_argument("at least one projection direction required");
  double sum = 0;
  for (const auto& dir : directions) {
    if (dir.size() != d) throw std::invalid_argument("direction dimension mismatch");
    sum += wasserstein_1d(project(x, dir), project(y, dir));
  }
  return sum / static_cast<double>(directions.size());
}

// Uniform random unit directions on the sphere, seeded.
inline Matrix random_directions(std::size_t dimension, std::size_t count, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "sliced-wasserstein"));
  Matrix dirs(count, std::vector<double>(dimension));
  for (auto& dir : dirs) {
    double norm = 0;
    while (norm < 1e-12) {
      norm = 0;
      for (double& v : dir) {
        v = rng.normal();
        norm += v * v;
      }
    }
    norm = std::sqrt(norm);
    for (double& v : dir) v /= norm;
  }
  return dirs;
}

inline WassersteinReport sliced_wasserstein(const Matrix& x, const Matrix& y, std::size_t num_projections = 50,
                                            std::uint64_t seed = 0) {
  const std::size_t d = common_dimension(x, y);
  if (num_projections == 0) throw std::invalid_argument("at least one projection required");
  WassersteinReport rep;
  rep.num_projections = num_projections;
  rep.seed = seed;
  rep.distance = sliced_wasserstein_along(x, y, random_directions(d, num_projections, seed));
  rep.percent_error = rep.distance / static_cast<double>(d) * 100.0;
  return rep;
}

}  // namespace satgen::metrics
