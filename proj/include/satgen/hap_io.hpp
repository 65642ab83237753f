#pragma once

#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "satgen/error.hpp"
#include "satgen/hapdata.hpp"

namespace satgen::hap {

enum class Format { hap, vcf };

struct ParseOptions {
  // When set, every site uses this alphabet (in this order) and tokens
  // outside it are parse errors.
  std::optional<std::vector<std::string>> declared_alphabet;
};

namespace detail {

inline bool is_token_char(char c) noexcept {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '.' ||
         c == '*' || c == '-';
}

inline bool is_token(std::string_view s) noexcept {
  if (s.empty()) return false;
  for (char c : s) {
    if (!is_token_char(c)) return false;
  }
  return true;
}

inline bool is_label(std::string_view s) noexcept {
  if (s.empty()) return false;
  for (char c : s) {
    if (c == '\t' || c == '\n' || c == '\r' || c == ' ') return false;
  }
  return true;
}

// Splits text into lines on LF. A missing final newline is tolerated; CR is
// not (files must use LF endings).
inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t end = s.find(sep, start);
    if (end == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, end - start));
    start = end + 1;
  }
}

inline std::size_t parse_count(std::string_view s, std::size_t line, const char* what) {
  if (s.empty() || s.size() > 18) throw ParseError(line, std::string("bad ") + what);
  std::size_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') throw ParseError(line, std::string("bad ") + what + " '" + std::string(s) + "'");
    v = v * 10 + static_cast<std::size_t>(c - '0');
  }
  return v;
}

inline AlleleMatrix build(std::vector<std::string> site_ids, std::vector<std::string> sample_ids,
                          std::vector<std::vector<std::string>> alphabets, std::vector<TokenId> cells,
                          std::size_t line) {
  try {
    return AlleleMatrix(std::move(site_ids), std::move(sample_ids), std::move(alphabets), std::move(cells));
  } catch (const std::invalid_argument& e) {
    throw ParseError(line, e.what());
  }
}

}  // namespace detail

// HAP: `HAP <S> <M>`, a tab-separated sample id line, then S lines of
// `site_id<TAB>tok1<TAB>...<TAB>tokM`.
inline AlleleMatrix parse_hap(std::string_view text, const ParseOptions& opts = {}) {
  const auto lines = detail::split_lines(text);
  if (lines.empty()) throw ParseError(1, "empty input");
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].find('\r') != std::string_view::npos) throw ParseError(i + 1, "CR line ending");
  }
  const auto head = detail::split(lines[0], ' ');
  if (head.size() != 3 || head[0] != "HAP") throw ParseError(1, "malformed header, expected 'HAP <S> <M>'");
  const std::size_t s = detail::parse_count(head[1], 1, "site count");
  const std::size_t m = detail::parse_count(head[2], 1, "sample count");
  if (s == 0 || m == 0) throw ParseError(1, "site and sample counts must be positive");
  if (lines.size() < 2) throw ParseError(2, "missing sample id line");
  const auto ids = detail::split(lines[1], '\t');
  if (ids.size() != m) {
    throw ParseError(2, "expected " + std::to_string(m) + " sample ids, found " + std::to_string(ids.size()));
  }
  std::vector<std::string> sample_ids;
  sample_ids.reserve(m);
  for (auto id : ids) {
    if (!detail::is_label(id)) throw ParseError(2, "bad sample id '" + std::string(id) + "'");
    sample_ids.emplace_back(id);
  }
  if (lines.size() != s + 2) {
    throw ParseError(std::min(lines.size(), s + 2) + 1,
                     "expected " + std::to_string(s) + " site lines, found " + std::to_string(lines.size() - 2));
  }

  std::vector<std::string> site_ids;
  std::vector<std::vector<std::string>> alphabets(s);
  std::vector<TokenId> cells(s * m);
  site_ids.reserve(s);
  for (std::size_t j = 0; j < s; ++j) {
    const std::size_t line = j + 3;
    const auto fields = detail::split(lines[j + 2], '\t');
    if (fields.size() != m + 1) {
      throw ParseError(line, "ragged row: expected " + std::to_string(m + 1) + " fields, found " +
                                 std::to_string(fields.size()));
    }
    if (!detail::is_label(fields[0])) throw ParseError(line, "bad site id");
    site_ids.emplace_back(fields[0]);
    auto& alpha = alphabets[j];
    if (opts.declared_alphabet) alpha = *opts.declared_alphabet;
    for (std::size_t i = 0; i < m; ++i) {
      const auto tok = fields[i + 1];
      if (!detail::is_token(tok)) throw ParseError(line, "bad token '" + std::string(tok) + "'");
      std::size_t t = 0;
      while (t < alpha.size() && alpha[t] != tok) ++t;
      if (t == alpha.size()) {
        if (opts.declared_alphabet) {
          throw ParseError(line, "token '" + std::string(tok) + "' absent from declared alphabet");
        }
        alpha.emplace_back(tok);
      }
      cells[j * m + i] = static_cast<TokenId>(t);
    }
  }
  return detail::build(std::move(site_ids), std::move(sample_ids), std::move(alphabets), std::move(cells),
                       lines.size());
}

inline std::string write_hap(const AlleleMatrix& m) {
  std::string out;
  out += "HAP " + std::to_string(m.sites()) + " " + std::to_string(m.samples()) + "\n";
  for (std::size_t i = 0; i < m.samples(); ++i) {
    if (i) out += '\t';
    out += m.sample_ids()[i];
  }
  out += '\n';
  for (std::size_t j = 0; j < m.sites(); ++j) {
    out += m.site_ids()[j];
    for (TokenId t : m.row(j)) {
      out += '\t';
      out += m.token(j, t);
    }
    out += '\n';
  }
  return out;
}

// VCF subset: GT-only phased calls. Diploid `a|b` calls become two columns
// `<sample>_0` and `<sample>_1`; haploid calls keep the sample name. The
// site alphabet is [REF, ALT...].
inline AlleleMatrix parse_vcf(std::string_view text, const ParseOptions& opts = {}) {
  const auto lines = detail::split_lines(text);
  std::size_t ln = 0;
  while (ln < lines.size() && lines[ln].starts_with("##")) ++ln;
  if (ln == lines.size() || !lines[ln].starts_with("#CHROM")) throw ParseError(ln + 1, "missing #CHROM header");
  const auto header = detail::split(lines[ln], '\t');
  static constexpr std::string_view fixed[] = {"#CHROM", "POS",    "ID",   "REF",   "ALT",
                                               "QUAL",   "FILTER", "INFO", "FORMAT"};
  if (header.size() < 10) throw ParseError(ln + 1, "header needs FORMAT and at least one sample column");
  for (std::size_t c = 0; c < 9; ++c) {
    if (header[c] != fixed[c]) throw ParseError(ln + 1, "unexpected header column '" + std::string(header[c]) + "'");
  }
  const std::size_t n_vcf_samples = header.size() - 9;
  std::vector<int> ploidy(n_vcf_samples, 0);
  std::vector<std::string> site_ids;
  std::vector<std::vector<std::string>> alphabets;
  std::vector<std::vector<TokenId>> rows;

  for (std::size_t i = ln + 1; i < lines.size(); ++i) {
    const std::size_t line = i + 1;
    if (lines[i].find('\r') != std::string_view::npos) throw ParseError(line, "CR line ending");
    const auto f = detail::split(lines[i], '\t');
    if (f.size() != header.size()) throw ParseError(line, "ragged row");
    std::string id = f[2] == "." ? std::string(f[0]) + ":" + std::string(f[1]) : std::string(f[2]);
    if (!detail::is_label(id)) throw ParseError(line, "bad site id");
    std::vector<std::string> alpha;
    if (!detail::is_token(f[3])) throw ParseError(line, "bad REF allele");
    alpha.emplace_back(f[3]);
    if (f[4] != ".") {
      for (auto a : detail::split(f[4], ',')) {
        if (!detail::is_token(a)) throw ParseError(line, "ALT allele '" + std::string(a) + "' is not a plain token");
        alpha.emplace_back(a);
      }
    }
    const auto keys = detail::split(f[8], ':');
    std::size_t gt = keys.size();
    for (std::size_t k = 0; k < keys.size(); ++k) {
      if (keys[k] == "GT") gt = k;
    }
    if (gt == keys.size()) throw ParseError(line, "FORMAT lacks GT");

    std::vector<TokenId> row;
    for (std::size_t s = 0; s < n_vcf_samples; ++s) {
      const auto parts = detail::split(f[9 + s], ':');
      if (gt >= parts.size()) throw ParseError(line, "missing GT value");
      const auto call = parts[gt];
      if (call.find('/') != std::string_view::npos) throw ParseError(line, "unphased genotype '" + std::string(call) + "'");
      const auto alleles = detail::split(call, '|');
      if (alleles.size() > 2) throw ParseError(line, "only haploid and diploid calls are supported");
      const int p = static_cast<int>(alleles.size());
      if (ploidy[s] == 0) ploidy[s] = p;
      if (ploidy[s] != p) throw ParseError(line, "ploidy changes for sample " + std::string(header[9 + s]));
      for (auto a : alleles) {
        if (a == ".") throw ParseError(line, "missing genotype");
        const std::size_t idx = detail::parse_count(a, line, "allele index");
        if (idx >= alpha.size()) throw ParseError(line, "allele index " + std::to_string(idx) + " outside REF/ALT");
        row.push_back(static_cast<TokenId>(idx));
      }
    }
    if (opts.declared_alphabet) {
      // Remap onto the declared alphabet.
      const auto& decl = *opts.declared_alphabet;
      std::vector<TokenId> remap(alpha.size());
      for (std::size_t t = 0; t < alpha.size(); ++t) {
        std::size_t d = 0;
        while (d < decl.size() && decl[d] != alpha[t]) ++d;
        if (d == decl.size()) throw ParseError(line, "allele '" + alpha[t] + "' absent from declared alphabet");
        remap[t] = static_cast<TokenId>(d);
      }
      for (auto& c : row) c = remap[c];
      alpha = decl;
    }
    site_ids.push_back(std::move(id));
    alphabets.push_back(std::move(alpha));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(lines.size() + 1, "no variant lines");

  std::vector<std::string> sample_ids;
  for (std::size_t s = 0; s < n_vcf_samples; ++s) {
    const std::string name(header[9 + s]);
    if (!detail::is_label(name)) throw ParseError(ln + 1, "bad sample name");
    if (ploidy[s] == 1) {
      sample_ids.push_back(name);
    } else {
      sample_ids.push_back(name + "_0");
      sample_ids.push_back(name + "_1");
    }
  }
  const std::size_t m = sample_ids.size();
  std::vector<TokenId> cells;
  cells.reserve(rows.size() * m);
  for (const auto& r : rows) cells.insert(cells.end(), r.begin(), r.end());
  return detail::build(std::move(site_ids), std::move(sample_ids), std::move(alphabets), std::move(cells),
                       lines.size());
}

inline std::string write_vcf(const AlleleMatrix& m) {
  // Consecutive columns named X_0, X_1 are written back as one diploid sample.
  const auto& ids = m.sample_ids();
  bool diploid = ids.size() % 2 == 0;
  for (std::size_t i = 0; diploid && i < ids.size(); i += 2) {
    const auto& a = ids[i];
    const auto& b = ids[i + 1];
    diploid = a.size() > 2 && b.size() == a.size() && a.ends_with("_0") && b.ends_with("_1") &&
              a.compare(0, a.size() - 2, b, 0, b.size() - 2) == 0;
  }
  std::string out = "##fileformat=VCFv4.2\n##source=satgen\n";
  out += "##FORMAT=<ID=GT,Number=1,Type=String,Description=\"Genotype\">\n";
  out += "#CHROM\tPOS\tID\tREF\tALT\tQUAL\tFILTER\tINFO\tFORMAT";
  if (diploid) {
    for (std::size_t i = 0; i < ids.size(); i += 2) out += "\t" + ids[i].substr(0, ids[i].size() - 2);
  } else {
    for (const auto& id : ids) out += "\t" + id;
  }
  out += '\n';
  for (std::size_t j = 0; j < m.sites(); ++j) {
    const auto& alpha = m.alphabet(j);
    for (const auto& t : alpha) {
      if (t == "." || t.find(',') != std::string::npos) {
        throw std::invalid_argument("token '" + t + "' cannot be written as a VCF allele");
      }
    }
    out += "1\t" + std::to_string(j + 1) + "\t" + m.site_ids()[j] + "\t" + alpha[0] + "\t";
    if (alpha.size() == 1) {
      out += ".";
    } else {
      for (std::size_t t = 1; t < alpha.size(); ++t) {
        if (t > 1) out += ',';
        out += alpha[t];
      }
    }
    out += "\t.\tPASS\t.\tGT";
    const auto r = m.row(j);
    if (diploid) {
      for (std::size_t i = 0; i < r.size(); i += 2) {
        out += "\t" + std::to_string(r[i]) + "|" + std::to_string(r[i + 1]);
      }
    } else {
      for (TokenId t : r) out += "\t" + std::to_string(t);
    }
    out += '\n';
  }
  return out;
}

inline AlleleMatrix parse_matrix(std::string_view text, Format fmt, const ParseOptions& opts = {}) {
  return fmt == Format::hap ? parse_hap(text, opts) : parse_vcf(text, opts);
}

inline std::string write_matrix(const AlleleMatrix& m, Format fmt) {
  return fmt == Format::hap ? write_hap(m) : write_vcf(m);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("write to '" + path + "' failed");
}

// Format from a file extension: .vcf means VCF-subset, everything else HAP.
inline Format format_for_path(std::string_view path) {
  return path.ends_with(".vcf") ? Format::vcf : Format::hap;
}

inline AlleleMatrix load_matrix(const std::string& path, std::optional<Format> fmt = std::nullopt,
                                const ParseOptions& opts = {}) {
  return parse_matrix(read_text_file(path), fmt.value_or(format_for_path(path)), opts);
}

}  // namespace satgen::hap
