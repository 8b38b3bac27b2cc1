#pragma once

#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dvino/combinatorics.hpp"
#include "dvino/error.hpp"
#include "dvino/prime_sets.hpp"
#include "dvino/representations.hpp"
#include "dvino/residue_selection.hpp"
#include "dvino/sumsets.hpp"
#include "dvino/transference.hpp"

namespace dvino::io {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

inline json stamp(json j) {
  json out = {{"schema_version", kSchemaVersion}};
  for (auto& [key, value] : j.items()) out[key] = std::move(value);
  return out;
}

// Rationals travel as "p/q" strings so nothing is lost to binary64.
inline json rational(const Rational& r) { return r.str(); }

inline Rational rational_from(const json& j) {
  if (j.is_string()) return Rational::parse(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_number()) return Rational::parse(j.dump());
  fail(ErrorKind::InvalidArgument, "expected a rational, got " + j.dump());
}

inline std::string big(const boost::multiprecision::cpp_int& x) { return x.str(); }

inline json error_json(ErrorKind kind, const std::string& message) {
  return stamp({{"error", {{"kind", std::string(to_string(kind))}, {"message", message}}}});
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::string trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return std::string(s.substr(a, b - a + 1));
}

inline u64 parse_u64(std::string_view s) {
  u64 v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(ErrorKind::InvalidArgument, "not a non-negative integer: '" + std::string(s) + "'");
  }
  return v;
}

inline double parse_double(std::string_view s) {
  try {
    std::size_t used = 0;
    double v = std::stod(std::string(s), &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorKind::InvalidArgument, "not a number: '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Prime subsets

/// Subset specs:
///   all | empty | mod<m>:r1,r2,... | random:<alpha>:<seed> | except:p1,p2,...
/// "mod3:1" is the usual congruence class. Any spec may carry "@<limit>" to
/// drop primes above limit.
inline PrimeSubset subset_from_spec(const PrimeTable& table, const std::string& spec_in) {
  std::string spec = trim(spec_in);
  std::optional<u64> limit;
  if (auto at = spec.find('@'); at != std::string::npos) {
    limit = parse_u64(spec.substr(at + 1));
    spec = spec.substr(0, at);
  }
  PrimeSubset out;
  if (spec == "all") {
    out = all_primes(table);
  } else if (spec == "empty") {
    out = empty_subset(table);
  } else if (spec.rfind("mod", 0) == 0) {
    auto colon = spec.find(':');
    if (colon == std::string::npos) fail(ErrorKind::InvalidArgument, "subset spec '" + spec + "' needs residues");
    const u64 m = parse_u64(spec.substr(3, colon - 3));
    std::vector<u64> residues;
    for (const auto& r : split(spec.substr(colon + 1), ',')) residues.push_back(parse_u64(r));
    out = congruence_subset(table, m, residues);
  } else if (spec.rfind("random:", 0) == 0) {
    auto parts = split(spec, ':');
    if (parts.size() != 3) fail(ErrorKind::InvalidArgument, "random subsets need random:<alpha>:<seed>");
    out = random_density_subset(table, parse_double(parts[1]), parse_u64(parts[2]));
  } else if (spec.rfind("except:", 0) == 0) {
    std::vector<u64> drop;
    for (const auto& r : split(spec.substr(7), ',')) drop.push_back(parse_u64(r));
    out = filter_primes(
        table, [&](u64 p) { return std::find(drop.begin(), drop.end(), p) == drop.end(); }, spec);
  } else {
    fail(ErrorKind::InvalidArgument, "unknown subset spec '" + spec + "'");
  }
  if (limit) out = truncate(table, out, *limit);
  out.set_label(trim(spec_in));
  return out;
}

inline json subset_json(const PrimeSubset& s) {
  return stamp({{"label", s.label()}, {"bound", s.bound()}, {"primes", s.primes()}});
}

inline PrimeSubset subset_from_json(const PrimeTable& table, const json& j) {
  const u64 bound = j.at("bound").get<u64>();
  if (bound != table.bound()) fail(ErrorKind::BoundMismatch, "subset bound differs from the prime table");
  BitVector bits(static_cast<std::size_t>(bound) + 1);
  for (const auto& p : j.at("primes")) {
    const u64 x = p.get<u64>();
    if (x > bound) fail(ErrorKind::InvalidArgument, "prime above the subset bound");
    bits.set(static_cast<std::size_t>(x));
  }
  return PrimeSubset(table, std::move(bits), j.value("label", std::string("json")));
}

// ---------------------------------------------------------------------------
// Combinatorics

inline json selection_json(const SelectionWitness& w) {
  return stamp({{"indices", w.indices},
                {"index_sum", w.index_sum},
                {"value_sum", rational(w.value_sum)},
                {"threshold", rational(w.threshold)},
                {"exceeds_threshold", w.exceeds_threshold()},
                {"all_positive", w.all_positive}});
}

inline ValueSequence sequence_from(const json& j) {
  std::vector<Rational> v;
  for (const auto& x : j) v.push_back(rational_from(x));
  return ValueSequence(std::move(v));
}

inline json grid_report_json(const GridReport& r) {
  json failures = json::array();
  for (const auto& f : r.failures) {
    json cols = json::array();
    for (const auto& col : f.columns) {
      json c = json::array();
      for (const auto& v : col) c.push_back(rational(v));
      cols.push_back(c);
    }
    failures.push_back({{"columns", cols}, {"reason", f.reason}});
  }
  return stamp({{"lemma", to_string(r.lemma)},
                {"n", r.n},
                {"k", r.k},
                {"c", rational(r.c)},
                {"instances_checked", r.instances_checked},
                {"hypothesis_hits", r.hypothesis_hits},
                {"oracle_checked", r.oracle_checked},
                {"failure_count", r.failure_count},
                {"failures", failures}});
}

// ---------------------------------------------------------------------------
// Residue selection

/// {"q": 15, "weights": [w_1, ..., w_k]} where each w_i is either an array
/// aligned with the units of Z_q in increasing order or an object mapping
/// unit -> value (missing units are 0).
inline std::vector<WeightVector> weights_from_json(const json& j, std::optional<u64> q_flag = std::nullopt) {
  u64 q = q_flag.value_or(0);
  if (j.contains("q")) {
    const u64 jq = j.at("q").get<u64>();
    if (q_flag && jq != *q_flag) fail(ErrorKind::InvalidArgument, "q in the weights file differs from --q");
    q = jq;
  }
  if (q == 0) fail(ErrorKind::InvalidArgument, "weights need a modulus q");
  const SqfModulus m = factor_squarefree(q);
  std::vector<WeightVector> out;
  for (const auto& w : j.at("weights")) {
    if (w.is_array()) {
      std::vector<Rational> v;
      for (const auto& x : w) v.push_back(rational_from(x));
      out.emplace_back(m, std::move(v));
    } else {
      std::map<u64, Rational> mp;
      for (u64 u : units(m)) mp[u] = Rational(0);
      for (const auto& [key, value] : w.items()) {
        const u64 u = parse_u64(key);
        if (!mp.contains(u)) fail(ErrorKind::InvalidArgument, key + " is not a unit mod " + std::to_string(q));
        mp[u] = rational_from(value);
      }
      out.push_back(WeightVector::from_map(m, mp));
    }
  }
  return out;
}

inline json residue_witness_json(const ResidueWitness& w, std::int64_t n) {
  json values = json::array();
  for (const auto& v : w.values) values.push_back(rational(v));
  json j = {{"q", w.q},
            {"k", w.k},
            {"n", n},
            {"residues", w.residues},
            {"values", values},
            {"value_sum", rational(w.value_sum)},
            {"threshold", rational(w.threshold)},
            {"meets_threshold", w.meets_threshold()},
            {"branch", w.branch}};
  if (w.statement_bound) {
    j["statement_bound"] = rational(*w.statement_bound);
    j["meets_statement_bound"] = *w.meets_statement_bound();
  }
  if (w.recap_bound) j["recap_bound"] = rational(*w.recap_bound);
  return stamp(j);
}

// ---------------------------------------------------------------------------
// Representation scans

inline json scan_summary_json(const ScanSummary& s) {
  auto opt = [](const std::optional<u64>& v) { return v ? json(*v) : json(nullptr); };
  return stamp({{"k", s.k},
                {"labels", s.labels},
                {"range", {s.lo, s.hi}},
                {"parity", s.parity ? "k mod 2" : "all"},
                {"admissible", s.admissible},
                {"zero_count", s.zero_count},
                {"largest_zero", opt(s.largest_zero)},
                {"smallest_zero", opt(s.smallest_zero)},
                {"min_count_after", big(s.min_count_after)},
                {"median_count_after", big(s.median_count_after)},
                {"zeros_by_class_mod3", s.zeros_by_class_mod3},
                {"admissible_by_class_mod3", s.admissible_by_class_mod3}});
}

inline void write_scan_csv(std::ostream& os, const std::vector<ScanRow>& rows) {
  os << "# schema_version=" << kSchemaVersion << "\n";
  os << "n,count\n";
  for (const auto& r : rows) os << r.n << ',' << r.count << '\n';
}

// ---------------------------------------------------------------------------
// Transference

struct TransferenceInput {
  TransferenceConfig config;
  u64 bound = 0;  // sieve bound; 0 means gamma * n
  std::vector<std::string> subset_specs;
};

/// key = value lines; '#' starts a comment. Keys: n, k, kappa, delta, epsilon,
/// W_override, direct_check_limit, bound, subset (repeatable, one per P_i;
/// a single subset line is used for every i).
inline TransferenceInput parse_transference_config(std::istream& is) {
  TransferenceInput in;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorKind::InvalidArgument, "config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "n") {
      in.config.n = parse_u64(value);
    } else if (key == "k") {
      in.config.k = static_cast<int>(parse_u64(value));
    } else if (key == "kappa") {
      in.config.kappa = Rational::parse(value);
    } else if (key == "delta") {
      in.config.delta = parse_double(value);
    } else if (key == "epsilon") {
      in.config.epsilon = parse_double(value);
    } else if (key == "W_override") {
      in.config.W_override = parse_u64(value);
    } else if (key == "direct_check_limit") {
      in.config.direct_check_limit = parse_u64(value);
    } else if (key == "bound") {
      in.bound = parse_u64(value);
    } else if (key == "subset") {
      in.subset_specs.push_back(value);
    } else {
      fail(ErrorKind::InvalidArgument, "config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  if (in.subset_specs.empty()) in.subset_specs.push_back("all");
  if (in.subset_specs.size() == 1) in.subset_specs.resize(static_cast<std::size_t>(in.config.k), in.subset_specs[0]);
  if (in.subset_specs.size() != static_cast<std::size_t>(in.config.k)) {
    fail(ErrorKind::InvalidArgument, "need one subset line or exactly k of them");
  }
  return in;
}

inline json transference_json(const TransferenceReport& r) {
  json cfg = {{"n", r.config.n},
              {"k", r.config.k},
              {"kappa", rational(r.config.kappa)},
              {"delta", r.config.delta},
              {"epsilon", r.config.epsilon},
              {"W_override", r.config.W_override ? json(*r.config.W_override) : json(nullptr)}};
  json indicators = json::array();
  for (const auto& d : r.indicators) {
    indicators.push_back({{"b", d.b},
                          {"f_b", d.f_b},
                          {"alpha_prime", d.alpha_prime},
                          {"alpha_prime_smoothed", d.alpha_prime_smoothed},
                          {"support_size", d.support_size},
                          {"R_size", d.R_size},
                          {"B_size", d.B_size},
                          {"max_scaled", d.max_scaled},
                          {"level_set_size", d.level_set_size},
                          {"level_set_bound", d.level_set_bound},
                          {"level_set_bound_holds", d.level_set_bound_holds},
                          {"alpha_positive_bound_holds", d.alpha_positive_bound_holds},
                          {"mass_error", d.mass_error},
                          {"damping_excess", d.damping_excess},
                          {"parseval_error", d.parseval_error},
                          {"parseval_error_smoothed", d.parseval_error_smoothed},
                          {"convolution_theorem_error", d.convolution_theorem_error}});
  }
  auto opt_ld = [](const std::optional<long double>& v) {
    return v ? json(static_cast<double>(*v)) : json(nullptr);
  };
  json j = {{"config", cfg},
            {"omega", r.w.omega},
            {"W", r.w.W},
            {"W_formula", r.w.W_formula},
            {"degenerate", r.degenerate},
            {"halted_at", r.halted_at.empty() ? json(nullptr) : json(r.halted_at)},
            {"halt_reason", r.halt_reason},
            {"weights", r.weights},
            {"weights_clamped", r.weights_clamped}};
  if (r.selection) {
    j["selection"] = residue_witness_json(*r.selection, static_cast<std::int64_t>(r.config.n));
    j["selection"].erase("schema_version");
    j["selection_c"] = rational(r.selection_c);
    j["selection_value_sum"] = r.selection_value_sum;
    j["selection_exceeds_half_k_plus_1"] = r.selection_exceeds_half_k_plus_1;
  }
  if (!r.halted_at.empty()) return stamp(j);
  j["N"] = r.N;
  j["n_prime"] = r.n_prime;
  j["lift_ok"] = r.lift_ok;
  j["lift_max_sum"] = r.lift_max_sum;
  j["indicators"] = indicators;
  j["alpha_prime_sum"] = r.alpha_prime_sum;
  j["alpha_prime_target"] = r.alpha_prime_target;
  j["alpha_prime_target_holds"] = r.alpha_prime_target_holds;
  j["alpha_prime_chain"] = r.alpha_prime_chain;
  j["lemma41"] = {{"conv_a", r.conv_a},
                  {"conv_a_smoothed", r.conv_a_smoothed},
                  {"difference", r.conv_difference},
                  {"conv_a_direct", opt_ld(r.conv_a_direct)},
                  {"conv_a_smoothed_direct", opt_ld(r.conv_a_smoothed_direct)},
                  {"shape", r.lemma41_shape},
                  {"ratio", r.lemma41_ratio}};
  j["final"] = {{"bound", r.final_bound}, {"ratio", r.final_ratio}};
  j["count_in_Z"] = r.count_in_Z;
  j["count_in_ZN"] = r.count_in_ZN;
  j["identities"] = {{"max_mass_error", r.max_mass_error},
                     {"max_damping_excess", r.max_damping_excess},
                     {"max_parseval_error", r.max_parseval_error},
                     {"max_convolution_theorem_error", r.max_convolution_theorem_error}};
  return stamp(j);
}

}  // namespace dvino::io
