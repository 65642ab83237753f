#pragma once

#include <sys/resource.h>

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "satgen/satgen.hpp"

#ifndef SATGEN_VERSION
#define SATGEN_VERSION "unknown"
#endif

namespace satgen::cli {

using json = nlohmann::ordered_json;
using hap::AlleleMatrix;
using hap::SampleIndex;
using hap::TokenId;

// Bad flag values that CLI11 validators cannot express.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::uint64_t seed = 0;
  unsigned threads = default_threads();
  std::string format;
  std::string config;
  std::string alphabet;
  std::string report;
  std::string dump_cnf;
  bool quiet = false;

  std::string input;
  std::string output;
  std::string real;
  std::vector<std::string> synth;
  std::string method = "genomator";
  std::size_t n = 10;
  double z = 0.0;
  std::size_t count = 1;
  std::size_t clusters = 0;
  std::string cluster_mode = "plan";
  std::size_t retry = 0;
  std::size_t window = 10;
  std::size_t diversity = 0;
  std::string diversity_target = "inputs";
  std::uint64_t budget = 10'000'000;

  std::vector<std::size_t> records;
  std::size_t trials = 20;
  bool enumerate = false;
  std::size_t limit = 1000;
  std::string target;

  std::size_t k = 4;
  std::size_t tuples = 1000;
  std::string proposal = "mixed";
  std::string occurrence = "pooled";

  std::size_t max_distance = 0;
  std::vector<std::size_t> windows;
  std::size_t components = 2;
  std::size_t projections = 50;

  std::size_t start = 10000;
  std::size_t steps = 5;
  std::size_t samples = 100;
};

// --------------------------------------------------------------- formatting

inline std::string num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

inline std::string join_ids(const AlleleMatrix& m, const std::vector<SampleIndex>& members) {
  std::string s;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (i) s += ';';
    s += m.sample_ids()[members[i]];
  }
  return s;
}

// ------------------------------------------------------------------- config

// Reads `key = value` lines; blank lines and lines starting with '#' are skipped.
inline std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t ln = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++ln;
    const auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(ln) + ": expected 'key = value'");
    auto key = trim(t.substr(0, eq));
    auto value = trim(t.substr(eq + 1));
    if (key.empty()) throw UsageError(path + ":" + std::to_string(ln) + ": empty key");
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

// Splices config values in as flags right after the subcommand words, for
// keys the command line does not already set, so flags always win.
inline std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].starts_with("--config=")) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::size_t insert_at = 0;
  if (!args.empty() && !args[0].starts_with("-")) insert_at = 1;
  if ((args.size() > 1 && (args[0] == "audit" || args[0] == "eval")) && !args[1].starts_with("-")) insert_at = 2;
  std::vector<std::string> extra;
  for (const auto& [key, value] : read_config(path)) {
    const std::string flag = "--" + key;
    const bool given = std::any_of(args.begin(), args.end(),
                                   [&](const std::string& a) { return a == flag || a.starts_with(flag + "="); });
    if (given) continue;
    if (value == "true") {
      extra.push_back(flag);
    } else if (value != "false") {
      extra.push_back(flag + "=" + value);
    }
  }
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(insert_at), extra.begin(), extra.end());
  return args;
}

// ------------------------------------------------------------------- runner

class Runner {
 public:
  Runner(Options o, std::string command, std::vector<std::string> argv, json config, std::ostream& out,
         std::ostream& err)
      : o_(std::move(o)), command_(std::move(command)), out_(out), err_(err) {
    header_ = json::object();
    header_["type"] = "header";
    header_["tool"] = "satgen";
    header_["version"] = SATGEN_VERSION;
    header_["command"] = command_;
    header_["argv"] = std::move(argv);
    header_["config"] = std::move(config);
    report_ << header_.dump() << '\n';
  }

  void dispatch() {
    if (command_ == "gen") return gen();
    if (command_ == "reverse") return reverse();
    if (command_ == "audit attr") return audit_attr();
    if (command_ == "audit ktuple") return audit_ktuple();
    if (command_ == "audit exposure") return audit_exposure();
    if (command_ == "audit posterior") return audit_posterior();
    if (command_ == "eval ld") return eval_ld();
    if (command_ == "eval pca") return eval_pca();
    if (command_ == "eval wasserstein") return eval_wasserstein();
    if (command_ == "eval freq") return eval_freq();
    if (command_ == "bench") return bench();
    if (command_ == "convert") return convert();
    throw UsageError("unknown command '" + command_ + "'");
  }

  // Reports go to --report, else standard output.
  void flush_report() {
    if (o_.report.empty()) {
      out_ << report_.str();
    } else {
      hap::write_text_file(o_.report, report_.str());
    }
  }

 private:
  void log(const std::string& stage) {
    if (!o_.quiet) err_ << "satgen: " << stage << '\n';
  }

  void emit(const json& j) { report_ << j.dump() << '\n'; }

  hap::ParseOptions parse_options() const {
    hap::ParseOptions p;
    if (!o_.alphabet.empty()) {
      std::vector<std::string> a;
      std::stringstream ss(o_.alphabet);
      std::string tok;
      while (std::getline(ss, tok, ',')) a.push_back(tok);
      p.declared_alphabet = a;
    }
    return p;
  }

  // Input format is sniffed from content: HAP files start with "HAP ".
  AlleleMatrix load(const std::string& path, bool declared = true) {
    if (path.empty()) throw UsageError("missing input file");
    const auto text = hap::read_text_file(path);
    const auto fmt = text.starts_with("HAP ") ? hap::Format::hap : hap::Format::vcf;
    auto m = hap::parse_matrix(text, fmt, declared ? parse_options() : hap::ParseOptions{});
    log("loaded " + path + " (" + std::to_string(m.sites()) + " sites, " + std::to_string(m.samples()) + " samples)");
    return m;
  }

  hap::Format output_format(const std::string& path) const {
    if (o_.format == "hap") return hap::Format::hap;
    if (o_.format == "vcf") return hap::Format::vcf;
    return hap::format_for_path(path);
  }

  void save_matrix(const AlleleMatrix& m, const std::string& path) {
    if (path.empty()) throw UsageError("missing output file (-o)");
    hap::write_text_file(path, hap::write_matrix(m, output_format(path)));
    log("wrote " + path);
  }

  void save_text(const std::string& path, const std::string& text) {
    if (path.empty()) return;
    hap::write_text_file(path, text);
    log("wrote " + path);
  }

  // Synthetic records re-expressed as cohort token ids, matched by site id and token string.
  static std::vector<std::vector<TokenId>> align(const AlleleMatrix& cohort, const AlleleMatrix& synth) {
    if (synth.site_ids() != cohort.site_ids()) throw Error("synthetic file sites do not match the cohort");
    std::vector<std::vector<TokenId>> out(synth.samples(), std::vector<TokenId>(cohort.sites()));
    for (std::size_t j = 0; j < cohort.sites(); ++j) {
      std::vector<TokenId> remap(synth.alphabet(j).size());
      for (TokenId t = 0; t < remap.size(); ++t) {
        const auto id = cohort.find_token(j, synth.token(j, t));
        if (!id) throw Error("synthetic token '" + synth.token(j, t) + "' is not in the cohort alphabet at site " +
                             cohort.site_ids()[j]);
        remap[t] = *id;
      }
      for (std::size_t i = 0; i < synth.samples(); ++i) out[i][j] = remap[synth.at(j, i)];
    }
    return out;
  }

  AlleleMatrix aligned_matrix(const AlleleMatrix& cohort, const AlleleMatrix& synth) {
    return cohort.with_columns(align(cohort, synth), synth.sample_ids());
  }

  std::vector<std::size_t> selected_records(std::size_t available) const {
    if (o_.records.empty()) {
      std::vector<std::size_t> all(available);
      for (std::size_t i = 0; i < available; ++i) all[i] = i;
      return all;
    }
    for (auto r : o_.records) {
      if (r >= available) throw UsageError("record index " + std::to_string(r) + " out of range");
    }
    return o_.records;
  }

  const std::string& first_synth() const {
    if (o_.synth.empty()) throw UsageError("missing --synth file");
    return o_.synth.front();
  }

  gen::GenParams gen_params() const {
    gen::GenParams p;
    p.n = o_.n;
    p.z_max = o_.z;
    p.seed = o_.seed;
    p.retries = o_.retry;
    p.solver.conflict_budget = o_.budget;
    if (o_.diversity > 0) p.diversity_min_distance = o_.diversity;
    if (o_.diversity_target == "outputs") p.diversity_target = gen::DiversityTarget::outputs;
    if (o_.diversity_target == "both") p.diversity_target = gen::DiversityTarget::both;
    return p;
  }

  rev::ReverseParams reverse_params() const {
    rev::ReverseParams p;
    p.n = o_.n;
    p.z_max = o_.z;
    p.seed = o_.seed;
    p.threads = o_.threads;
    p.solver.conflict_budget = o_.budget;
    return p;
  }

  std::vector<gen::SyntheticRecord> synthesize(const AlleleMatrix& m, std::size_t count, std::uint64_t seed) {
    if (o_.method == "markov") {
      return markov::markov_generate(markov::markov_fit(m, o_.window), count, seed, o_.threads);
    }
    auto p = gen_params();
    p.seed = seed;
    if (p.n > m.samples()) throw UsageError("--n exceeds the cohort's sample count");
    const std::size_t k = o_.clusters ? o_.clusters : m.samples();
    const auto plan = hap::build_clusters(m, p.n, k, derive_seed(seed, "cluster-plan"));
    gen::CohortOptions co;
    co.threads = o_.threads;
    co.mode = o_.cluster_mode == "fresh" ? gen::ClusterMode::fresh : gen::ClusterMode::plan;
    return gen::generate_cohort(m, plan, p, count, co);
  }

  // ---------------------------------------------------------------- commands

  void gen() {
    const auto m = load(o_.input);
    const auto records = synthesize(m, o_.count, o_.seed);
    save_matrix(gen::records_to_matrix(m, records), o_.output);
    std::size_t attempts = 0;
    for (const auto& r : records) attempts += r.attempts;
    if (!o_.dump_cnf.empty() && o_.method != "markov") {
      const auto p = gen_params();
      std::vector<std::vector<TokenId>> others;
      if (p.diversity_min_distance && p.diversity_target != gen::DiversityTarget::outputs) {
        for (auto s : records[0].members) others.push_back(m.column(s));
      }
      const auto problem = gen::build_problem(m, records[0].members, p.z_max, records[0].seed, others, o_.diversity);
      save_text(o_.dump_cnf, sat::export_dimacs(problem.formula));
    }
    json r;
    r["type"] = "gen";
    r["method"] = o_.method;
    r["records"] = records.size();
    r["sites"] = m.sites();
    r["attempts"] = attempts;
    emit(r);
  }

  void reverse() {
    const auto m = load(o_.input);
    const auto records = align(m, load(first_synth(), false));
    const auto params = reverse_params();
    std::string csv = o_.enumerate ? "record,set,members\n" : "record,trial,status,members\n";
    std::size_t failed = 0;
    const auto selection = selected_records(records.size());
    for (auto r : selection) {
      json line;
      line["type"] = "reverse";
      line["record"] = r;
      if (o_.enumerate) {
        const auto fam = rev::enumerate_candidate_sets(records[r], m, o_.n, o_.limit, o_.seed);
        for (std::size_t s = 0; s < fam.sets.size(); ++s) {
          csv += std::to_string(r) + "," + std::to_string(s) + "," + csv_field(join_ids(m, fam.sets[s])) + "\n";
        }
        const auto exp = rev::exposure_report(fam.sets, m.samples());
        line["sets"] = fam.sets.size();
        line["exhausted"] = fam.exhausted;
        line["exposed"] = join_ids(m, exp.exposed);
        failed += fam.sets.empty();
      } else {
        try {
          const auto s = rev::sample_candidate_sets(records[r], m, params, o_.trials);
          std::size_t found = 0;
          for (const auto& t : s.trials) {
            std::string members;
            if (t.status == rev::TrialStatus::found) members = join_ids(m, s.sets[found++].members);
            const char* status = t.status == rev::TrialStatus::found        ? "found"
                                 : t.status == rev::TrialStatus::infeasible ? "infeasible"
                                                                            : "timeout";
            csv += std::to_string(r) + "," + std::to_string(t.trial) + "," + status + "," + csv_field(members) + "\n";
          }
          const auto exp = rev::exposure_report(s.sets, m.samples());
          line["found"] = s.sets.size();
          line["trials"] = s.trials.size();
          line["exposed"] = join_ids(m, exp.exposed);
        } catch (const InfeasibleError& e) {
          csv += std::to_string(r) + ",all,infeasible,\n";
          line["found"] = 0;
          line["trials"] = o_.trials;
          line["error"] = e.what();
          ++failed;
        }
      }
      emit(line);
    }
    if (!o_.dump_cnf.empty()) {
      save_text(o_.dump_cnf, sat::export_dimacs(rev::build_reverse_constraints(records[selection[0]], m, params).formula));
    }
    save_text(o_.output, csv);
    if (failed == selection.size()) throw InfeasibleError("no candidate input set found for any selected record");
  }

  void audit_exposure() {
    const auto m = load(o_.input);
    const auto records = align(m, load(first_synth(), false));
    const auto params = reverse_params();
    std::string csv = "record,sample,frequency\n";
    std::size_t with_exposure = 0, scored = 0;
    for (auto r : selected_records(records.size())) {
      json line;
      line["type"] = "exposure";
      line["record"] = r;
      try {
        const auto s = rev::sample_candidate_sets(records[r], m, params, o_.trials);
        const auto exp = rev::exposure_report(s.sets, m.samples());
        for (SampleIndex i = 0; i < m.samples(); ++i) {
          if (exp.frequency[i] > 0) {
            csv += std::to_string(r) + "," + csv_field(m.sample_ids()[i]) + "," + num(exp.frequency[i]) + "\n";
          }
        }
        line["iterations"] = exp.iterations;
        line["exposed"] = join_ids(m, exp.exposed);
        line["exposed_count"] = exp.exposed.size();
        with_exposure += !exp.exposed.empty();
        ++scored;
      } catch (const InfeasibleError& e) {
        line["error"] = e.what();
      }
      emit(line);
    }
    json sum;
    sum["type"] = "exposure_summary";
    sum["records"] = scored;
    sum["records_with_exposure"] = with_exposure;
    if (scored > 0) {
      const auto ci = rev::wilson_interval(with_exposure, scored);
      sum["rate"] = static_cast<double>(with_exposure) / static_cast<double>(scored);
      sum["wilson_lower"] = ci.lower;
      sum["wilson_upper"] = ci.upper;
    }
    emit(sum);
    save_text(o_.output, csv);
  }

  void audit_posterior() {
    const auto m = load(o_.input);
    const auto records = align(m, load(first_synth(), false));
    const std::size_t r = o_.records.empty() ? 0 : o_.records.front();
    if (r >= records.size()) throw UsageError("record index out of range");
    if (o_.target.empty()) throw UsageError("missing --target sample");
    SampleIndex target = 0;
    const auto& ids = m.sample_ids();
    const auto it = std::find(ids.begin(), ids.end(), o_.target);
    if (it == ids.end()) throw UsageError("target sample '" + o_.target + "' is not in the cohort");
    target = static_cast<SampleIndex>(it - ids.begin());
    const auto rep = rev::exact_posterior(records[r], m, target, o_.n);
    std::string csv = "members,model_count\n";
    for (const auto& c : rep.combinations) csv += csv_field(join_ids(m, c.members)) + "," + std::to_string(c.model_count) + "\n";
    json line;
    line["type"] = "posterior";
    line["record"] = r;
    line["target"] = o_.target;
    line["n_in"] = rep.n_in;
    line["n_out"] = rep.n_out;
    line["zeta"] = rep.zeta;
    line["r"] = rep.r;
    line["posterior"] = rep.posterior;
    line["no_member_combinations"] = rep.no_member_combinations;
    emit(line);
    if (!o_.dump_cnf.empty()) {
      save_text(o_.dump_cnf, sat::export_dimacs(rev::build_reverse_constraints(records[r], m, reverse_params()).formula));
    }
    save_text(o_.output, csv);
  }

  void audit_attr() {
    const auto m = load(o_.input);
    auto generate = [&](const AlleleMatrix& half, std::uint64_t seed) {
      const std::size_t count = o_.count > 1 ? o_.count : half.samples();
      return gen::records_to_matrix(half, synthesize(half, count, seed));
    };
    const auto rep = priv::attr_inference_experiment(m, generate, o_.seed);
    json line;
    line["type"] = "attr";
    line["method"] = o_.method;
    line["in_distance"] = rep.in_distance;
    line["out_distance"] = rep.out_distance;
    line["difference"] = rep.difference;
    line["frontier_distance"] = priv::frontier_distance(rep);
    line["targets"] = rep.targets;
    emit(line);
  }

  void audit_ktuple() {
    const auto m = load(o_.input);
    if (o_.synth.empty()) throw UsageError("missing --synth file");
    std::vector<AlleleMatrix> corpus;
    for (const auto& p : o_.synth) corpus.push_back(load(p, false));
    const auto proposal = o_.proposal == "individual"    ? priv::TokenProposal::individual
                          : o_.proposal == "independent" ? priv::TokenProposal::independent
                                                         : priv::TokenProposal::mixed;
    const auto pv = priv::sample_ktuples(m, o_.k, priv::TupleClass::private_tuple, o_.tuples,
                                         derive_seed(o_.seed, "private"), proposal);
    const auto fc = priv::sample_ktuples(m, o_.k, priv::TupleClass::fictitious, o_.tuples,
                                         derive_seed(o_.seed, "fictitious"), proposal);
    auto tuples = pv.tuples;
    tuples.insert(tuples.end(), fc.tuples.begin(), fc.tuples.end());
    const auto mode = o_.occurrence == "per-dataset" ? priv::Occurrence::per_dataset : priv::Occurrence::pooled;
    const auto rep = priv::revelation_rates(tuples, m, corpus, mode, o_.threads);
    std::string csv = "class,positions,tokens,occurs\n";
    for (const auto& t : tuples) {
      std::string pos, tok;
      for (std::size_t p = 0; p < t.k(); ++p) {
        if (p) pos += ';', tok += ';';
        pos += m.site_ids()[t.positions[p]];
        tok += m.token(t.positions[p], t.tokens[p]);
      }
      bool occurs = false;
      for (const auto& d : corpus) occurs = occurs || priv::occurs_in(t, m, d);
      csv += std::string(priv::to_string(t.cls)) + "," + csv_field(pos) + "," + csv_field(tok) + "," +
             (occurs ? "1" : "0") + "\n";
    }
    json line;
    line["type"] = "ktuple";
    line["k"] = o_.k;
    line["private_rate"] = rep.private_rate;
    line["fictitious_rate"] = rep.fictitious_rate;
    line["private_sampled"] = rep.private_sampled;
    line["fictitious_sampled"] = rep.fictitious_sampled;
    line["private_budget_exhausted"] = pv.exhausted;
    line["fictitious_budget_exhausted"] = fc.exhausted;
    line["corpus_datasets"] = rep.corpus_datasets;
    line["corpus_records"] = rep.corpus_records;
    emit(line);
    save_text(o_.output, csv);
  }

  std::pair<AlleleMatrix, AlleleMatrix> real_and_synth() {
    const auto real = load(o_.real.empty() ? o_.input : o_.real);
    const auto synth = aligned_matrix(real, load(first_synth(), false));
    return {real, synth};
  }

  void eval_ld() {
    const auto [real, synth] = real_and_synth();
    const auto rep = metrics::ld_square_error(real, synth, {o_.max_distance, o_.windows});
    std::string csv = "distance,pairs,mean_square_error,mean_real_r2,mean_synth_r2\n";
    for (const auto& b : rep.bins) {
      csv += std::to_string(b.distance) + "," + std::to_string(b.pairs) + "," + num(b.mean_square_error) + "," +
             num(b.mean_real_r2) + "," + num(b.mean_synth_r2) + "\n";
    }
    json line;
    line["type"] = "ld";
    line["binned_error"] = rep.binned_error;
    line["overall_error"] = rep.overall_error;
    json win = json::object();
    for (const auto& [w, e] : rep.windowed_error) win[std::to_string(w)] = e;
    line["windowed_error"] = win;
    line["reference_average_ld"] = rep.reference_average_ld;
    line["percent_of_reference"] = rep.percent_of_reference;
    line["scored_pairs"] = rep.scored_pairs;
    line["excluded_pairs"] = rep.excluded_pairs;
    emit(line);
    save_text(o_.output, csv);
  }

  void eval_pca() {
    const auto real = load(o_.real.empty() ? o_.input : o_.real);
    const auto minor = metrics::minor_tokens(real);
    const auto rows = metrics::dosage_rows(real, minor);
    const auto model = metrics::pca_fit(rows, o_.components, {10000, 1e-8, o_.seed});
    std::string csv = "set,sample";
    for (std::size_t c = 0; c < o_.components; ++c) csv += ",pc" + std::to_string(c + 1);
    csv += '\n';
    auto add = [&](const char* set, const AlleleMatrix& m, const metrics::Matrix& coords) {
      for (std::size_t i = 0; i < coords.size(); ++i) {
        csv += std::string(set) + "," + csv_field(m.sample_ids()[i]);
        for (double v : coords[i]) csv += "," + num(v);
        csv += '\n';
      }
    };
    add("real", real, metrics::pca_project(model, rows));
    if (!o_.synth.empty()) {
      const auto synth = aligned_matrix(real, load(first_synth(), false));
      add("synthetic", synth, metrics::pca_project(model, metrics::dosage_rows(synth, minor)));
    }
    json line;
    line["type"] = "pca";
    line["variances"] = model.variances;
    line["explained_ratio"] = model.explained_ratio;
    line["iterations"] = model.iterations;
    emit(line);
    save_text(o_.output, csv);
  }

  void eval_wasserstein() {
    const auto [real, synth] = real_and_synth();
    const auto minor = metrics::minor_tokens(real);
    const auto rep = metrics::sliced_wasserstein(metrics::dosage_rows(real, minor), metrics::dosage_rows(synth, minor),
                                                 o_.projections, o_.seed);
    json line;
    line["type"] = "wasserstein";
    line["distance"] = rep.distance;
    line["percent_error"] = rep.percent_error;
    line["num_projections"] = rep.num_projections;
    line["seed"] = rep.seed;
    emit(line);
  }

  void eval_freq() {
    const auto [real, synth] = real_and_synth();
    std::string csv = "site,token,real,synthetic\n";
    for (std::size_t j = 0; j < real.sites(); ++j) {
      for (TokenId t = 0; t < real.alphabet(j).size(); ++t) {
        csv += csv_field(real.site_ids()[j]) + "," + csv_field(real.token(j, t)) + "," +
               num(metrics::allele_frequency(real, j, t)) + "," + num(metrics::allele_frequency(synth, j, t)) + "\n";
      }
    }
    json line;
    line["type"] = "freq";
    const auto cc = metrics::frequency_correlation(real, synth);
    line["correlation"] = cc ? json(*cc) : json(nullptr);
    emit(line);
    save_text(o_.output, csv);
  }

  static AlleleMatrix random_cohort(std::size_t sites, std::size_t samples, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::string> site_ids(sites), sample_ids(samples);
    for (std::size_t j = 0; j < sites; ++j) site_ids[j] = "s" + std::to_string(j);
    for (std::size_t i = 0; i < samples; ++i) sample_ids[i] = "h" + std::to_string(i);
    std::vector<TokenId> cells(sites * samples);
    for (auto& c : cells) c = static_cast<TokenId>(rng.coin());
    return AlleleMatrix(std::move(site_ids), std::move(sample_ids),
                        std::vector<std::vector<std::string>>(sites, {"0", "1"}), std::move(cells));
  }

  static long peak_rss_kb() {
    rusage u{};
    getrusage(RUSAGE_SELF, &u);
    return u.ru_maxrss;
  }

  void bench() {
    using clock = std::chrono::steady_clock;
    std::optional<AlleleMatrix> file;
    if (!o_.input.empty()) {
      const auto t0 = clock::now();
      file = load(o_.input);
      json line;
      line["type"] = "bench_load";
      line["seconds"] = std::chrono::duration<double>(clock::now() - t0).count();
      emit(line);
    }
    std::string csv = "sites,seconds,peak_rss_kb,status\n";
    std::size_t sites = o_.start;
    for (std::size_t step = 0; step < o_.steps; ++step, sites *= 2) {
      if (file && sites > file->sites()) break;
      std::string status = "ok";
      double seconds = 0;
      try {
        AlleleMatrix m;
        if (file) {
          std::vector<std::vector<TokenId>> cols;
          std::vector<std::vector<std::string>> rows;
          std::vector<std::string> ids(file->site_ids().begin(), file->site_ids().begin() + static_cast<std::ptrdiff_t>(sites));
          std::vector<std::vector<std::string>> alpha;
          std::vector<TokenId> cells;
          for (std::size_t j = 0; j < sites; ++j) {
            alpha.push_back(file->alphabet(j));
            const auto r = file->row(j);
            cells.insert(cells.end(), r.begin(), r.end());
          }
          m = AlleleMatrix(std::move(ids), file->sample_ids(), std::move(alpha), std::move(cells));
        } else {
          m = random_cohort(sites, o_.samples, derive_seed(o_.seed, "bench-cohort", step));
        }
        if (o_.n > m.samples()) throw UsageError("--n exceeds the bench sample count");
        const auto cluster = hap::nearest_cluster(m, 0, o_.n, o_.seed);
        auto p = gen_params();
        p.seed = derive_seed(o_.seed, "bench-record", step);
        const auto t0 = clock::now();
        gen::generate_one(m, cluster, p);
        seconds = std::chrono::duration<double>(clock::now() - t0).count();
      } catch (const UsageError&) {
        throw;
      } catch (const std::exception& e) {
        status = std::string("failed: ") + e.what();
      }
      csv += std::to_string(sites) + "," + num(seconds) + "," + std::to_string(peak_rss_kb()) + "," + csv_field(status) + "\n";
      json line;
      line["type"] = "bench";
      line["sites"] = sites;
      line["seconds"] = seconds;
      line["status"] = status;
      emit(line);
      log("bench " + std::to_string(sites) + " sites: " + num(seconds) + " s");
    }
    save_text(o_.output, csv);
  }

  void convert() {
    const auto m = load(o_.input);
    save_matrix(m, o_.output);
    json line;
    line["type"] = "convert";
    line["sites"] = m.sites();
    line["samples"] = m.samples();
    emit(line);
  }

  Options o_;
  std::string command_;
  std::ostream& out_;
  std::ostream& err_;
  json header_;
  std::ostringstream report_;
};

// --------------------------------------------------------------------- run

inline int run(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  const CLI::Validator positive(
      [](std::string& v) -> std::string {
        double x = 0;
        if (!CLI::detail::lexical_cast(v, x) || !(x > 0)) return "must be positive, got '" + v + "'";
        return {};
      },
      "POSITIVE");
  Options o;
  CLI::App app{"SAT-based synthetic haplotype generation and privacy auditing", "satgen"};
  app.set_version_flag("--version", SATGEN_VERSION);
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  auto common = [&](CLI::App* s) {
    s->add_option("--seed", o.seed, "Master seed");
    s->add_option("--threads", o.threads, "Worker threads")->check(positive);
    s->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"hap", "vcf"}));
    s->add_option("--config", o.config, "Config file of key = value lines");
    s->add_option("--alphabet", o.alphabet, "Declared alphabet for input parsing, comma separated");
    s->add_option("--report", o.report, "Report file (default: standard output)");
    s->add_option("--dump-cnf", o.dump_cnf, "Write the constraint formula in DIMACS form");
    s->add_flag("--quiet", o.quiet, "No stage log on standard error");
  };
  auto generation = [&](CLI::App* s) {
    s->add_option("--method", o.method, "Generator")->check(CLI::IsMember({"genomator", "markov"}));
    s->add_option("--n", o.n, "Cluster size N")->check(positive);
    s->add_option("--z", o.z, "Maximum drawn Z")->check(CLI::NonNegativeNumber);
    s->add_option("--count", o.count, "Records to generate")->check(positive);
    s->add_option("--clusters", o.clusters, "Cluster count (default: sample count)");
    s->add_option("--cluster-mode", o.cluster_mode, "Cluster source")->check(CLI::IsMember({"plan", "fresh"}));
    s->add_option("--retry", o.retry, "Retries with re-derived seeds after an infeasible draw");
    s->add_option("--window", o.window, "Markov window size")->check(positive);
    s->add_option("--diversity", o.diversity, "Minimum Hamming distance to other sequences");
    s->add_option("--diversity-target", o.diversity_target, "Sequences the distance applies to")
        ->check(CLI::IsMember({"inputs", "outputs", "both"}));
    s->add_option("--budget", o.budget, "Solver conflict budget")->check(positive);
  };
  auto reversing = [&](CLI::App* s) {
    s->add_option("--synth", o.synth, "Synthetic records file")->required();
    s->add_option("--n", o.n, "Cluster size N")->check(positive);
    s->add_option("--z", o.z, "Maximum drawn Z")->check(CLI::NonNegativeNumber);
    s->add_option("--record", o.records, "Record indices (default: all)");
    s->add_option("--trials", o.trials, "Sampling trials per record")->check(positive);
    s->add_option("--budget", o.budget, "Solver conflict budget")->check(positive);
  };
  auto io = [&](CLI::App* s, bool output_required) {
    s->add_option("-i,--input", o.input, "Input cohort (HAP or VCF)")->required();
    auto* opt = s->add_option("-o,--output", o.output, "Output file");
    if (output_required) opt->required();
  };

  std::map<CLI::App*, std::string> names;
  auto* gen = app.add_subcommand("gen", "Generate synthetic records");
  io(gen, true);
  generation(gen);
  names[gen] = "gen";

  auto* reverse = app.add_subcommand("reverse", "Reconstruct candidate input sets for synthetic records");
  io(reverse, false);
  reversing(reverse);
  reverse->add_flag("--enumerate", o.enumerate, "Enumerate every candidate set at Z = 0");
  reverse->add_option("--limit", o.limit, "Enumeration limit");
  names[reverse] = "reverse";

  auto* audit = app.add_subcommand("audit", "Privacy audits");
  audit->require_subcommand(1);
  auto* attr = audit->add_subcommand("attr", "Attribute inference: in-data vs out-data distances");
  io(attr, false);
  generation(attr);
  names[attr] = "audit attr";
  auto* ktuple = audit->add_subcommand("ktuple", "Private and fictitious k-tuple revelation");
  io(ktuple, false);
  ktuple->add_option("--synth", o.synth, "Synthetic corpus files")->required();
  ktuple->add_option("--k", o.k, "Tuple order")->check(positive);
  ktuple->add_option("--tuples", o.tuples, "Tuples per class")->check(positive);
  ktuple->add_option("--proposal", o.proposal, "Token proposal")->check(CLI::IsMember({"mixed", "individual", "independent"}));
  ktuple->add_option("--occurrence", o.occurrence, "Occurrence rule")->check(CLI::IsMember({"pooled", "per-dataset"}));
  names[ktuple] = "audit ktuple";
  auto* exposure = audit->add_subcommand("exposure", "Samples present in every reconstructed input set");
  io(exposure, false);
  reversing(exposure);
  names[exposure] = "audit exposure";
  auto* posterior = audit->add_subcommand("posterior", "Exact membership posterior on desk-scale instances");
  io(posterior, false);
  reversing(posterior);
  posterior->add_option("--target", o.target, "Target sample id")->required();
  names[posterior] = "audit posterior";

  auto* eval = app.add_subcommand("eval", "Accuracy metrics");
  eval->require_subcommand(1);
  auto eval_leaf = [&](const char* name, const char* desc, bool synth_required) {
    auto* s = eval->add_subcommand(name, desc);
    s->add_option("--real,-i,--input", o.real, "Reference cohort")->required();
    auto* syn = s->add_option("--synth", o.synth, "Synthetic cohort");
    if (synth_required) syn->required();
    s->add_option("-o,--output", o.output, "CSV output file");
    names[s] = std::string("eval ") + name;
    return s;
  };
  auto* ld = eval_leaf("ld", "LD reproduction error", true);
  ld->add_option("--max-distance", o.max_distance, "Largest site distance scored (0 = all)");
  ld->add_option("--window", o.windows, "Window widths in sites for windowed error");
  auto* pca = eval_leaf("pca", "Principal components of the reference, with projections", false);
  pca->add_option("--components", o.components, "Components")->check(positive);
  auto* sw = eval_leaf("wasserstein", "Sliced Wasserstein distance", true);
  sw->add_option("--projections", o.projections, "Random projections")->check(positive);
  eval_leaf("freq", "Allele frequency comparison", true);

  auto* bench = app.add_subcommand("bench", "Generation time over a doubling site ladder");
  bench->add_option("-i,--input", o.input, "Cohort to take site prefixes from (default: random cohorts)");
  bench->add_option("-o,--output", o.output, "CSV output file");
  bench->add_option("--start", o.start, "First site count")->check(positive);
  bench->add_option("--steps", o.steps, "Ladder steps")->check(positive);
  bench->add_option("--samples", o.samples, "Samples in random cohorts")->check(positive);
  generation(bench);
  names[bench] = "bench";

  auto* convert = app.add_subcommand("convert", "Convert between HAP and VCF");
  io(convert, true);
  names[convert] = "convert";

  for (auto& [sub, name] : names) common(sub);

  std::vector<std::string> expanded;
  try {
    expanded = expand_config(args);
    std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "satgen: " << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    err << "satgen: " << e.what() << "\n";
    return 2;
  }

  CLI::App* leaf = nullptr;
  for (auto& [sub, name] : names) {
    if (sub->parsed()) leaf = sub;
  }
  if (!leaf) {
    err << "satgen: no command given\n";
    return 2;
  }
  json config = json::object();
  for (const auto* opt : leaf->get_options()) {
    const auto& lname = opt->get_lnames();
    if (lname.empty() || lname[0] == "help") continue;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      config[lname[0]] = res.size() == 1 ? json(res[0]) : json(res);
    } else if (!opt->get_default_str().empty()) {
      config[lname[0]] = opt->get_default_str();
    }
  }

  Runner runner(o, names[leaf], expanded, config, out, err);
  try {
    runner.dispatch();
    runner.flush_report();
    return 0;
  } catch (const UsageError& e) {
    err << "satgen: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "satgen: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    err << "satgen: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "satgen: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace satgen::cli
