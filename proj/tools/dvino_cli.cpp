#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "dvino/io.hpp"

using namespace dvino;
namespace dj = dvino::io;
namespace fs = std::filesystem;

namespace {

unsigned g_threads = default_threads();

// Prime tables are cached as raw bit files under $DVINO_CACHE_DIR when set.
PrimeTable load_table(u64 bound) {
  const char* dir = std::getenv("DVINO_CACHE_DIR");
  if (dir == nullptr || *dir == '\0') return sieve(bound);
  const fs::path path = fs::path(dir) / ("primes_" + std::to_string(bound) + ".bin");
  if (fs::exists(path)) {
    PrimeTable t = read_prime_table(path.string());
    if (t.bound() == bound) return t;
  }
  PrimeTable t = sieve(bound);
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (!ec) write_prime_table(path.string(), t);
  return t;
}

std::vector<PrimeSubset> subsets_from(const PrimeTable& table, std::vector<std::string> specs, int k) {
  if (specs.empty()) specs.push_back("all");
  if (specs.size() == 1) specs.resize(static_cast<std::size_t>(k), specs[0]);
  if (specs.size() != static_cast<std::size_t>(k)) {
    fail(ErrorKind::InvalidArgument, "give one --subset or exactly k of them");
  }
  std::vector<PrimeSubset> out;
  for (const auto& s : specs) out.push_back(dj::subset_from_spec(table, s));
  return out;
}

dj::json read_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorKind::Io, "cannot open " + path);
  try {
    return dj::json::parse(is);
  } catch (const dj::json::exception& e) {
    fail(ErrorKind::InvalidArgument, path + ": " + e.what());
  }
}

void emit(const dj::json& j) { std::cout << j.dump(2) << '\n'; }

std::vector<Rational> parse_grid(const std::string& text) {
  std::vector<Rational> out;
  for (const auto& g : dj::split(text, ',')) out.push_back(Rational::parse(dj::trim(g)));
  return out;
}

std::vector<u64> obstruction_classes(const std::vector<PrimeSubset>& subsets) {
  std::vector<u64> reach = reachable_mod3(subsets), out;
  for (u64 r = 0; r < 3; ++r)
    if (!std::binary_search(reach.begin(), reach.end(), r)) out.push_back(r);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dvino: density Vinogradov toolkit"};
  app.require_subcommand(1);
  app.add_option("--threads", g_threads, "cap on worker threads")->check(CLI::PositiveNumber);
  std::function<int()> run;

  // sieve
  auto* sieve_cmd = app.add_subcommand("sieve", "build (and cache) a prime table");
  u64 sieve_bound = 1'000'000;
  std::size_t segment = std::size_t{1} << 18;
  std::string sieve_out;
  sieve_cmd->add_option("--bound", sieve_bound)->required();
  sieve_cmd->add_option("--segment", segment, "sieve segment size");
  sieve_cmd->add_option("--out", sieve_out, "write the raw bit file here");
  sieve_cmd->callback([&] {
    run = [&] {
      PrimeTable t = sieve_out.empty() ? load_table(sieve_bound) : sieve(sieve_bound, {segment, 100'000'000});
      if (!sieve_out.empty()) write_prime_table(sieve_out, t);
      emit(dj::stamp({{"bound", t.bound()}, {"prime_count", t.prime_count()}, {"out", sieve_out}}));
      return 0;
    };
  });

  // subset
  auto* subset_cmd = app.add_subcommand("subset", "construct and serialize a prime subset");
  u64 subset_bound = 1000;
  std::string subset_spec, subset_out, subset_format = "json";
  subset_cmd->add_option("--bound", subset_bound)->required();
  subset_cmd->add_option("--spec", subset_spec, "all | empty | mod<m>:r,.. | random:<alpha>:<seed> | except:p,..")
      ->required();
  subset_cmd->add_option("--format", subset_format)->check(CLI::IsMember({"json", "bits"}));
  subset_cmd->add_option("--out", subset_out);
  subset_cmd->callback([&] {
    run = [&] {
      PrimeTable t = load_table(subset_bound);
      PrimeSubset s = dj::subset_from_spec(t, subset_spec);
      if (subset_format == "bits") {
        if (subset_out.empty()) fail(ErrorKind::InvalidArgument, "--format bits needs --out");
        std::ofstream os(subset_out, std::ios::binary);
        if (!os) fail(ErrorKind::Io, "cannot open " + subset_out);
        write_bit_file(os, s.bits());
        emit(dj::stamp({{"label", s.label()}, {"bound", s.bound()}, {"size", s.size()}, {"out", subset_out}}));
        return 0;
      }
      dj::json j = dj::subset_json(s);
      j["size"] = s.size();
      j["density"] = dj::rational(lower_density_estimate(s));
      if (subset_out.empty()) {
        emit(j);
      } else {
        std::ofstream os(subset_out);
        os << j.dump() << '\n';
      }
      return 0;
    };
  });

  // count
  auto* count_cmd = app.add_subcommand("count", "ordered k-fold representation count of one n");
  u64 count_n = 0, count_bound = 0;
  int count_k = 4;
  std::vector<std::string> count_subsets;
  count_cmd->add_option("--n", count_n)->required();
  count_cmd->add_option("--k", count_k);
  count_cmd->add_option("--bound", count_bound, "prime bound (default n)");
  count_cmd->add_option("--subset", count_subsets, "one spec for all P_i, or k specs");
  count_cmd->callback([&] {
    run = [&] {
      PrimeTable t = load_table(count_bound == 0 ? std::max<u64>(count_n, 2) : count_bound);
      auto sets = subsets_from(t, count_subsets, count_k);
      std::vector<std::string> labels;
      for (const auto& s : sets) labels.push_back(s.label());
      emit(dj::stamp({{"n", count_n}, {"k", count_k}, {"labels", labels}, {"count", count_kfold(sets, count_n).str()}}));
      return 0;
    };
  });

  // scan
  auto* scan_cmd = app.add_subcommand("scan", "counts for every admissible n in a range");
  u64 scan_min = 0, scan_max = 0, scan_bound = 0;
  int scan_k = 4;
  std::string scan_parity = "auto", scan_csv;
  std::vector<std::string> scan_subsets;
  scan_cmd->add_option("--subset", scan_subsets);
  scan_cmd->add_option("--k", scan_k);
  scan_cmd->add_option("--min", scan_min);
  scan_cmd->add_option("--max", scan_max)->required();
  scan_cmd->add_option("--bound", scan_bound, "prime bound (default max)");
  scan_cmd->add_option("--parity", scan_parity)->check(CLI::IsMember({"even", "odd", "all", "auto"}));
  scan_cmd->add_option("--csv", scan_csv, "write n,count rows here");
  scan_cmd->callback([&] {
    run = [&] {
      bool parity = scan_parity != "all";
      if ((scan_parity == "even" && scan_k % 2 != 0) || (scan_parity == "odd" && scan_k % 2 == 0)) {
        fail(ErrorKind::ParityMismatch, "sums of k odd primes have the parity of k; use --parity auto or all");
      }
      PrimeTable t = load_table(scan_bound == 0 ? std::max<u64>(scan_max, 2) : scan_bound);
      auto sets = subsets_from(t, scan_subsets, scan_k);
      auto r = scan_theorem(sets, scan_min, scan_max, parity, !scan_csv.empty());
      if (!scan_csv.empty()) {
        std::ofstream os(scan_csv);
        if (!os) fail(ErrorKind::Io, "cannot open " + scan_csv);
        dj::write_scan_csv(os, r.rows);
      }
      dj::json j = dj::scan_summary_json(r.summary);
      auto bad = obstruction_classes(sets);
      bool all_zero = true;
      for (u64 c : bad) all_zero = all_zero && r.summary.zeros_by_class_mod3[c] == r.summary.admissible_by_class_mod3[c];
      j["obstruction_classes_mod3"] = bad;
      j["obstruction_classes_all_zero"] = all_zero;
      emit(j);
      return all_zero ? 0 : 1;
    };
  });

  // select-lemma
  auto* lemma_cmd = app.add_subcommand("select-lemma", "run a combinatorial selector on a JSON instance");
  std::string lemma_input;
  lemma_cmd->add_option("--input", lemma_input,
                        "{lemma: 3.1|3.2|3.3, c, k (3.1 only), columns: [[values]...], allow_odd}")
      ->required();
  lemma_cmd->callback([&] {
    run = [&] {
      dj::json in = read_json(lemma_input);
      const LemmaId lemma = parse_lemma(in.at("lemma").get<std::string>());
      const Rational c = dj::rational_from(in.at("c"));
      std::vector<ValueSequence> cols;
      for (const auto& col : in.at("columns")) cols.push_back(dj::sequence_from(col));
      if (cols.empty()) fail(ErrorKind::BadShape, "no columns");
      SelectionWitness w;
      int k = static_cast<int>(cols.size());
      switch (lemma) {
        case LemmaId::Single:
          k = in.at("k").get<int>();
          w = select_single(cols[0], k, c, in.value("allow_odd", false));
          cols.assign(static_cast<std::size_t>(k), cols[0]);
          break;
        case LemmaId::Sharp4:
          if (cols.size() != 4) fail(ErrorKind::BadShape, "lemma 3.2 takes four columns");
          w = select_sharp4(cols[0], cols[1], cols[2], cols[3], c);
          break;
        case LemmaId::Multi: w = select_multi(cols, c); break;
      }
      const std::size_t n = cols[0].size();
      const bool sound = witness_is_sound(cols, w, n);
      dj::json j = dj::selection_json(w);
      j["lemma"] = to_string(lemma);
      j["sound"] = sound;
      bool agrees = true;
      if (std::pow(static_cast<double>(n), k) <= 1e7) {
        auto best = brute_force_select(cols, k, n);
        agrees = best && best->value_sum == w.value_sum;
        j["oracle_value_sum"] = best ? dj::json(dj::rational(best->value_sum)) : dj::json(nullptr);
      }
      j["oracle_agrees"] = agrees;
      emit(j);
      return sound && agrees ? 0 : 1;
    };
  });

  // verify-grid
  auto* grid_cmd = app.add_subcommand("verify-grid", "exhaustive lemma check over a value grid");
  std::string grid_lemma, grid_values = "0,1/4,1/2,3/4,1", grid_c;
  std::size_t grid_n = 2;
  int grid_k = 4;
  grid_cmd->add_option("--lemma", grid_lemma)->required();
  grid_cmd->add_option("--n", grid_n);
  grid_cmd->add_option("--k", grid_k);
  grid_cmd->add_option("--grid", grid_values, "comma-separated values in [0,1]");
  grid_cmd->add_option("--c", grid_c)->required();
  grid_cmd->callback([&] {
    run = [&] {
      auto r = grid_verify(parse_lemma(grid_lemma), grid_n, grid_k, parse_grid(grid_values), Rational::parse(grid_c),
                           g_threads);
      emit(dj::grid_report_json(r));
      return r.failure_count == 0 ? 0 : 1;
    };
  });

  // select-residues
  auto* res_cmd = app.add_subcommand("select-residues", "residue selection on JSON weights");
  u64 res_q = 0;
  int res_k = 0;
  std::string res_c, res_weights;
  std::int64_t res_n = 0;
  bool res_prime = false;
  std::uint64_t res_budget = 10'000'000;
  res_cmd->add_option("--q", res_q)->required();
  res_cmd->add_option("--k", res_k, "copies of a single weight function (default: number of functions)");
  res_cmd->add_option("--c", res_c)->required();
  res_cmd->add_option("--n", res_n)->required();
  res_cmd->add_option("--weights", res_weights, "{q, weights: [...]} with one or k functions")->required();
  res_cmd->add_flag("--prime-base", res_prime, "use the prime-modulus base case directly");
  res_cmd->add_option("--oracle-budget", res_budget, "exhaustive check when phi(q)^k is at most this");
  res_cmd->callback([&] {
    run = [&] {
      auto fs = dj::weights_from_json(read_json(res_weights), res_q);
      if (fs.empty()) fail(ErrorKind::InvalidArgument, "no weight functions");
      const Rational c = Rational::parse(res_c);
      const int k = res_k != 0 ? res_k : static_cast<int>(fs.size());
      ResidueWitness w;
      if (fs.size() == 1 && k > 1) {
        fs.assign(static_cast<std::size_t>(k), fs[0]);
        w = res_prime ? prime_base_case(fs, c, res_n) : select_residues_single(fs[0], k, c, res_n);
      } else {
        if (static_cast<int>(fs.size()) != k) fail(ErrorKind::InvalidArgument, "--k differs from the number of weights");
        w = res_prime ? prime_base_case(fs, c, res_n) : select_residues_multi(fs, c, res_n);
      }
      const bool sound = residue_witness_is_sound(fs, w);
      dj::json j = dj::residue_witness_json(w, res_n);
      j["sound"] = sound;
      bool agrees = true;
      if (std::pow(static_cast<double>(fs[0].units().size()), k) <= static_cast<double>(res_budget)) {
        auto best = brute_force_residues(fs, res_n);
        agrees = best.has_value() && !(w.value_sum > best->value_sum);
        j["oracle_value_sum"] = best ? dj::json(dj::rational(best->value_sum)) : dj::json(nullptr);
      }
      j["oracle_agrees"] = agrees;
      emit(j);
      return sound && agrees ? 0 : 1;
    };
  });

  // cd-check
  auto* cd_cmd = app.add_subcommand("cd-check", "Cauchy-Davenport on given or random sets");
  u64 cd_p = 0;
  int cd_k = 2;
  std::size_t cd_trials = 0;
  std::optional<u64> cd_seed;
  std::string cd_sets;
  cd_cmd->add_option("--p", cd_p, "prime modulus (random runs draw p <= this)")->required();
  cd_cmd->add_option("--k", cd_k, "number of sets (random runs draw k in [2, this])");
  cd_cmd->add_option("--sets", cd_sets, "explicit sets, e.g. 1,2;3,4");
  cd_cmd->add_option("--trials", cd_trials);
  cd_cmd->add_option("--seed", cd_seed);
  cd_cmd->callback([&] {
    run = [&] {
      if (!cd_sets.empty()) {
        std::vector<ResidueSet> sets;
        for (const auto& part : dj::split(cd_sets, ';')) {
          std::vector<u64> xs;
          for (const auto& x : dj::split(part, ',')) xs.push_back(dj::parse_u64(dj::trim(x)));
          sets.push_back(residue_set(cd_p, xs));
        }
        auto r = cauchy_davenport_check(cd_p, sets);
        emit(dj::stamp({{"p", cd_p}, {"k", sets.size()}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"holds", r.holds}}));
        return r.holds ? 0 : 1;
      }
      if (!cd_seed) fail(ErrorKind::InvalidArgument, "random runs need --seed");
      std::vector<u64> primes;
      for (u64 p = 2; p <= cd_p; ++p)
        if (is_prime_trial(p)) primes.push_back(p);
      if (primes.empty()) fail(ErrorKind::NotPrime, "no prime <= " + std::to_string(cd_p));
      std::mt19937_64 rng(*cd_seed);
      std::size_t failures = 0;
      for (std::size_t t = 0; t < cd_trials; ++t) {
        const u64 p = primes[rng() % primes.size()];
        const int k = 2 + static_cast<int>(rng() % static_cast<u64>(std::max(1, cd_k - 1)));
        std::vector<ResidueSet> sets;
        for (int j = 0; j < k; ++j) {
          ResidueSet s(p);
          const u64 size = 1 + rng() % p;
          while (s.count() < size) s.set(rng() % p);
          sets.push_back(std::move(s));
        }
        if (!cauchy_davenport_check(p, sets).holds) ++failures;
      }
      emit(dj::stamp({{"max_p", cd_p}, {"max_k", cd_k}, {"seed", *cd_seed}, {"instances", cd_trials},
                      {"failures", failures}}));
      return failures == 0 ? 0 : 1;
    };
  });

  // varnavides
  auto* var_cmd = app.add_subcommand("varnavides", "property run of the k-fold lower bound on Z_N");
  std::vector<int> var_k{2, 3, 4};
  std::size_t var_trials = 100;
  u64 var_seed = 0, var_max_N = 500;
  var_cmd->add_option("--k", var_k);
  var_cmd->add_option("--trials", var_trials, "instances per k");
  var_cmd->add_option("--seed", var_seed)->required();
  var_cmd->add_option("--max-N", var_max_N);
  var_cmd->callback([&] {
    run = [&] {
      std::mt19937_64 rng(var_seed);
      dj::json per_k = dj::json::array();
      std::size_t total_failures = 0;
      for (int k : var_k) {
        std::size_t failures = 0;
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < var_trials; ++t) {
          auto tr = varnavides_trial(k, rng, var_max_N);
          if (!tr.holds) ++failures;
          worst = std::min(worst, static_cast<double>(BigRational(tr.min_nu) / tr.bound.bound));
        }
        total_failures += failures;
        per_k.push_back({{"k", k}, {"instances", var_trials}, {"failures", failures}, {"min_ratio", worst}});
      }
      emit(dj::stamp({{"seed", var_seed}, {"max_N", var_max_N}, {"runs", per_k}}));
      return total_failures == 0 ? 0 : 1;
    };
  });

  // transference
  auto* tr_cmd = app.add_subcommand("transference", "end-to-end transference report");
  std::string tr_config;
  tr_cmd->add_option("--config", tr_config, "key = value file")->required();
  tr_cmd->callback([&] {
    run = [&] {
      std::ifstream is(tr_config);
      if (!is) fail(ErrorKind::Io, "cannot open " + tr_config);
      auto in = dj::parse_transference_config(is);
      u64 bound = in.bound;
      if (bound == 0) bound = static_cast<u64>(std::ceil(in.config.gamma() * static_cast<double>(in.config.n)));
      PrimeTable t = load_table(bound);
      auto sets = subsets_from(t, in.subset_specs, in.config.k);
      auto rep = transference_report(in.config, sets);
      emit(dj::transference_json(rep));
      if (!rep.halted_at.empty()) return 0;
      const bool ok = rep.max_mass_error <= 1e-9 && rep.max_damping_excess <= 1e-9 &&
                      rep.max_parseval_error <= 1e-9 && rep.alpha_prime_target_holds;
      return ok ? 0 : 1;
    };
  });

  // sharpness
  auto* sh_cmd = app.add_subcommand("sharpness", "sharpness families and their zero-count patterns");
  std::string sh_kind = "all";
  int sh_k = 4;
  u64 sh_bound = 100'000;
  std::vector<u64> sh_shift{1, 2};
  sh_cmd->add_option("--kind", sh_kind)->check(CLI::IsMember({"shifted", "empty", "all"}));
  sh_cmd->add_option("--k", sh_k);
  sh_cmd->add_option("--bound", sh_bound, "prime bound and scan range");
  sh_cmd->add_option("--shift", sh_shift, "residue shift(s) for the shifted family");
  sh_cmd->callback([&] {
    run = [&] {
      PrimeTable t = load_table(sh_bound);
      dj::json fams = dj::json::array();
      bool all_ok = true;
      auto add = [&](SharpnessKind kind, u64 shift) {
        auto chk = sharpness_check(t, kind, sh_k, sh_bound, shift);
        dj::json j = dj::scan_summary_json(chk.summary);
        j.erase("schema_version");
        j["family"] = kind == SharpnessKind::ShiftedMod3 ? "shifted-mod3" : "empty-last";
        if (kind == SharpnessKind::ShiftedMod3) j["shift"] = shift;
        j["obstruction_classes_mod3"] = chk.family.obstruction_classes;
        j["all_blocked"] = chk.family.all_blocked;
        dj::json dens = dj::json::array();
        for (const auto& s : chk.family.subsets) dens.push_back(lower_density_estimate(s).to_double());
        j["densities"] = dens;
        j["pattern_holds"] = chk.pattern_holds;
        all_ok = all_ok && chk.pattern_holds;
        fams.push_back(j);
      };
      if (sh_kind != "empty")
        for (u64 s : sh_shift) add(SharpnessKind::ShiftedMod3, s);
      if (sh_kind != "shifted") add(SharpnessKind::EmptyLast, 1);
      emit(dj::stamp({{"k", sh_k}, {"bound", sh_bound}, {"families", fams}}));
      return all_ok ? 0 : 1;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    return run();
  } catch (const Error& e) {
    std::cout << dj::error_json(e.kind(), e.what()).dump(2) << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cout << dj::error_json(ErrorKind::InvalidArgument, e.what()).dump(2) << '\n';
    return 2;
  }
}
