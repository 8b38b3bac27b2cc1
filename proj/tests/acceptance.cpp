// Acceptance gate: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "dvino/combinatorics.hpp"
#include "dvino/convolution.hpp"
#include "dvino/representations.hpp"
#include "dvino/residue_selection.hpp"
#include "dvino/sumsets.hpp"
#include "dvino/transference.hpp"

using namespace dvino;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// 1 -----------------------------------------------------------------------

Outcome lemma_grids() {
  const std::vector<Rational> grid{Rational(0), Rational(1, 4), Rational(1, 2), Rational(3, 4), Rational(1)};
  struct Case {
    LemmaId lemma;
    std::size_t n;
    int k;
    Rational c;
  };
  std::vector<Case> cases;
  for (std::size_t n : {2u, 4u})
    for (int k : {4, 5}) cases.push_back({LemmaId::Single, n, k, Rational(51, 100)});
  for (const auto& cp : {Rational(16, 25), Rational(7, 10)}) cases.push_back({LemmaId::Sharp4, 2, 4, cp});
  cases.push_back({LemmaId::Multi, 2, 5, Rational(6, 10) + Rational(1, 100)});
  cases.push_back({LemmaId::Multi, 3, 4, Rational(5, 8) + Rational(1, 100)});

  std::uint64_t checked = 0, hits = 0, oracle = 0, failures = 0;
  std::ostringstream bad;
  for (const auto& cs : cases) {
    auto r = grid_verify(cs.lemma, cs.n, cs.k, grid, cs.c, default_threads());
    checked += r.instances_checked;
    hits += r.hypothesis_hits;
    oracle += r.oracle_checked;
    failures += r.failure_count;
    if (r.failure_count != 0 || r.hypothesis_hits == 0) {
      bad << " [lemma " << to_string(cs.lemma) << " n=" << cs.n << " k=" << cs.k << " c=" << cs.c
          << " failures=" << r.failure_count << " hits=" << r.hypothesis_hits << "]";
    }
  }
  std::ostringstream os;
  os << cases.size() << " grids, " << checked << " instances, " << hits << " meeting hypotheses, " << oracle
     << " oracle-checked, " << failures << " counterexamples" << bad.str();
  return {bad.str().empty(), os.str()};
}

// 2 -----------------------------------------------------------------------

Outcome sharp4_threshold() {
  bool ok = true;
  std::ostringstream os;
  for (std::int64_t inv : {10, 100, 1000}) {
    const Rational eps(1, inv);
    const ValueSequence a({Rational(1), Rational(2, 3)});
    const ValueSequence d({eps, Rational(0)});
    const Rational cp = (Rational(5) + eps) / Rational(8) - Rational(1, 1'000'000);
    const Rational threshold = Rational(16, 3) * cp - Rational(1);
    auto w = select_sharp4(a, a, a, d, cp);
    std::vector<ValueSequence> cols{a, a, a, d};
    auto best = brute_force_select(cols, 4, 2);
    const Rational excess = w.value_sum - threshold;
    const bool good = best && best->value_sum == w.value_sum && excess.is_positive() && excess < Rational(2) * eps;
    ok = ok && good;
    os << " eps=1/" << inv << ": excess " << excess << " (" << excess.to_double() << ")";
  }
  return {ok, "optimum over (16/3)cp-1 stays below 2 eps:" + os.str()};
}

// 3 -----------------------------------------------------------------------

struct ResidueInstance {
  bool single = false;
  Rational c;
  std::vector<WeightVector> fs;
};

// Weights on a 1/20 grid with some zeros; c drawn strictly between the
// lemma's lower limit and the realised mass ratio.
ResidueInstance residue_instance(u64 q, int k, bool single, std::mt19937_64& rng) {
  const SqfModulus m = factor_squarefree(q);
  const auto phi = static_cast<std::int64_t>(m.totient);
  const Rational floor_c = single ? Rational(1, 2) : Rational(k + 1, 2 * k);
  for (;;) {
    const int lo = 4 + static_cast<int>(rng() % 12);
    const int zero_pct = static_cast<int>(rng() % 30);
    auto draw = [&] {
      std::vector<Rational> v;
      for (std::int64_t i = 0; i < phi; ++i)
        v.emplace_back(static_cast<int>(rng() % 100) < zero_pct ? 0 : lo + static_cast<int>(rng() % (21 - lo)), 20);
      return WeightVector(m, std::move(v));
    };
    ResidueInstance in;
    in.single = single;
    Rational ratio;
    if (single) {
      in.fs.assign(static_cast<std::size_t>(k), draw());
      ratio = in.fs[0].mass() / Rational(phi);
    } else {
      Rational total;
      bool zero = false;
      for (int j = 0; j < k; ++j) {
        in.fs.push_back(draw());
        zero = zero || in.fs.back().is_zero();
        total += in.fs.back().mass();
      }
      if (zero) continue;
      ratio = total / Rational(phi * k);
    }
    if (!(ratio > floor_c)) continue;
    const Rational u(1 + static_cast<std::int64_t>(rng() % 999), 1000);
    in.c = floor_c + (ratio - floor_c) * u;
    return in;
  }
}

struct ResidueTally {
  std::uint64_t instances = 0, selections = 0, oracle_targets = 0, failures = 0;
  std::uint64_t sharp_high_c_instances = 0;  // multi, k = 4, 3 | q, c > 3/4
  std::uint64_t sharp_high_c_failures = 0;
  std::string first_failure;
};

Outcome residue_selection_sweep() {
  std::vector<u64> qs;
  for (u64 q = 1; q <= 105; ++q)
    if (is_squarefree(q)) qs.push_back(q);
  struct Job {
    u64 q;
    int k;
  };
  std::vector<Job> jobs;
  for (u64 q : qs)
    for (int k : {4, 5}) jobs.push_back({q, k});
  constexpr int kInstances = 200;
  std::vector<ResidueTally> parts(jobs.size());
  parallel_chunks(jobs.size(), jobs.size(), default_threads(), [&](std::size_t j, std::size_t, std::size_t) {
    const auto [q, k] = jobs[j];
    ResidueTally& t = parts[j];
    const SqfModulus m = factor_squarefree(q);
    const bool use_oracle = std::pow(static_cast<double>(m.totient), k) <= 1e7;
    for (int i = 0; i < kInstances; ++i) {
      std::mt19937_64 rng(mix(q * 1000 + static_cast<u64>(k) * 100'000'000 + static_cast<u64>(i)));
      ResidueInstance in = residue_instance(q, k, i % 2 == 0, rng);
      ++t.instances;
      if (!in.single && k == 4 && q % 3 == 0 && in.c > Rational(3, 4)) ++t.sharp_high_c_instances;
      std::vector<std::optional<ResidueWitness>> oracle;
      if (use_oracle) oracle = brute_force_residues_all(in.fs);
      const Rational threshold = in.single ? in.c * Rational(k) : multi_threshold(q, k, in.c);
      for (u64 n = 0; n < q; ++n) {
        if (q % 2 == 0 && (n + static_cast<u64>(k)) % 2 != 0) continue;
        ++t.selections;
        std::string why;
        try {
          ResidueWitness w = in.single ? select_residues_single(in.fs[0], k, in.c, static_cast<std::int64_t>(n))
                                       : select_residues_multi(in.fs, in.c, static_cast<std::int64_t>(n));
          if (!residue_witness_is_sound(in.fs, w)) why = "unsound witness";
          else if (w.threshold != threshold) why = "wrong threshold";
          else if (w.target != n) why = "wrong target";
          if (use_oracle) {
            ++t.oracle_targets;
            const auto& best = oracle[n];
            if (!best || !(best->value_sum > threshold) || best->value_sum < w.value_sum) why = "oracle disagrees";
          }
        } catch (const Error& e) {
          why = std::string(to_string(e.kind())) + ": " + e.what();
          if (use_oracle) {
            ++t.oracle_targets;
            const auto& best = oracle[n];
            if (best && best->value_sum > threshold) why += " (oracle has a witness)";
            else why += " (oracle finds none above the threshold)";
          }
        }
        if (!why.empty()) {
          ++t.failures;
          if (!in.single && k == 4 && q % 3 == 0 && in.c > Rational(3, 4)) ++t.sharp_high_c_failures;
          if (t.first_failure.empty()) {
            std::ostringstream os;
            os << "q=" << q << " k=" << k << " " << (in.single ? "single" : "multi") << " c=" << in.c << " n=" << n
               << ": " << why;
            t.first_failure = os.str();
          }
        }
      }
    }
  });
  ResidueTally all;
  for (const auto& t : parts) {
    all.instances += t.instances;
    all.selections += t.selections;
    all.oracle_targets += t.oracle_targets;
    all.failures += t.failures;
    all.sharp_high_c_instances += t.sharp_high_c_instances;
    all.sharp_high_c_failures += t.sharp_high_c_failures;
    if (all.first_failure.empty()) all.first_failure = t.first_failure;
  }
  std::ostringstream os;
  os << qs.size() << " squarefree q, k in {4,5}, " << all.instances << " instances, " << all.selections
     << " selections, " << all.oracle_targets << " oracle-checked, " << all.failures << " failures; "
     << all.sharp_high_c_instances << " instances with k=4, 3|q, c>3/4";
  if (all.failures != 0) {
    os << " (" << all.sharp_high_c_failures << " failures there); first: " << all.first_failure;
  }
  return {all.failures == 0, os.str()};
}

// 4 -----------------------------------------------------------------------

Outcome cauchy_davenport_sweep() {
  std::vector<u64> primes;
  for (u64 p = 2; p <= 101; ++p)
    if (is_prime_trial(p)) primes.push_back(p);
  std::mt19937_64 rng(2024);
  std::size_t failures = 0, mismatches = 0;
  for (int t = 0; t < 10'000; ++t) {
    const u64 p = primes[rng() % primes.size()];
    const std::size_t k = 2 + rng() % 4;
    std::vector<ResidueSet> sets;
    std::vector<std::set<u64>> plain;
    for (std::size_t j = 0; j < k; ++j) {
      const u64 size = 1 + rng() % (rng() % 2 == 0 ? p : std::max<u64>(1, p / 4));
      ResidueSet s(p);
      while (s.count() < size) s.set(rng() % p);
      sets.push_back(s);
      auto e = elements(s);
      plain.emplace_back(e.begin(), e.end());
    }
    auto r = cauchy_davenport_check(p, sets);
    // independent sumset by pairwise set addition
    std::set<u64> acc = plain[0];
    for (std::size_t j = 1; j < k; ++j) {
      std::set<u64> next;
      for (u64 x : acc)
        for (u64 y : plain[j]) next.insert((x + y) % p);
      acc = std::move(next);
    }
    if (acc.size() != r.lhs) ++mismatches;
    if (!r.holds) ++failures;
  }
  std::ostringstream os;
  os << "10000 instances, p <= 101, k <= 5: " << failures << " violations, " << mismatches
     << " sumset sizes differing from pairwise enumeration";
  return {failures == 0 && mismatches == 0, os.str()};
}

// 5 -----------------------------------------------------------------------

// nu by iterated cyclic convolution of indicator vectors, independent of the
// transform path.
std::vector<std::uint64_t> naive_nu(const std::vector<ResidueSet>& sets) {
  const std::size_t N = sets[0].size();
  std::vector<std::uint64_t> acc(N, 0);
  for (std::size_t x = 0; x < N; ++x) acc[x] = sets[0].test(x) ? 1 : 0;
  for (std::size_t j = 1; j < sets.size(); ++j) {
    std::vector<std::uint64_t> next(N, 0);
    auto members = elements(sets[j]);
    for (std::size_t x = 0; x < N; ++x) {
      if (acc[x] == 0) continue;
      for (u64 y : members) next[(x + y) % N] += acc[x];
    }
    acc = std::move(next);
  }
  return acc;
}

Outcome varnavides_sweep() {
  std::mt19937_64 rng(4243);
  std::ostringstream os;
  bool ok = true;
  for (int k : {2, 3, 4}) {
    std::size_t failures = 0, mismatches = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 100; ++t) {
      auto tr = varnavides_trial(k, rng, 500);
      auto nu = naive_nu(tr.sets);
      const auto lo = *std::min_element(nu.begin(), nu.end());
      if (BigInt(lo) != tr.min_nu) ++mismatches;
      if (!(BigRational(BigInt(lo)) >= tr.bound.bound)) ++failures;
      worst = std::min(worst, static_cast<double>(BigRational(BigInt(lo)) / tr.bound.bound));
    }
    ok = ok && failures == 0 && mismatches == 0;
    os << " k=" << k << ": " << failures << " failures, " << mismatches << " count mismatches, min nu/bound "
       << worst << ";";
  }
  return {ok, "100 instances per k, N prime in (2/theta^2, 500]:" + os.str()};
}

// 6 -----------------------------------------------------------------------

// r_4(n) by direct enumeration over a sorted prime list.
std::uint64_t enumerate4(const std::vector<u64>& ps, u64 n) {
  std::uint64_t count = 0;
  for (u64 a : ps) {
    if (a > n) break;
    for (u64 b : ps) {
      if (a + b > n) break;
      for (u64 c : ps) {
        if (a + b + c > n) break;
        if (std::binary_search(ps.begin(), ps.end(), n - a - b - c)) ++count;
      }
    }
  }
  return count;
}

Outcome obstruction_exactness(const PrimeTable& t) {
  PrimeSubset p = congruence_subset(t, 3, {1});
  std::vector<PrimeSubset> four(4, p);
  auto r = scan_theorem(four, 0, 1'000'000, true, true);
  std::size_t bad_nonzero = 0, good_zero = 0, good_checked = 0, spot_mismatch = 0;
  for (const auto& row : r.rows) {
    if (row.n % 3 != 1) {
      if (row.count != 0) ++bad_nonzero;
    } else if (row.n >= 40) {
      ++good_checked;
      if (row.count == 0) ++good_zero;
    }
  }
  const auto small = truncate(t, p, 3000).primes();
  for (const auto& row : r.rows) {
    if (row.n > 3000) break;
    if (row.count != enumerate4(small, row.n)) ++spot_mismatch;
  }
  std::ostringstream os;
  os << "P = {p = 1 mod 3}, k = 4, even n <= 10^6: " << bad_nonzero << " nonzero counts off the class 1 mod 3, "
     << good_zero << " zeros among " << good_checked << " even n = 1 mod 3 in [40, 10^6], " << spot_mismatch
     << " enumeration mismatches for n <= 3000";
  return {bad_nonzero == 0 && good_zero == 0 && spot_mismatch == 0 && good_checked > 0, os.str()};
}

// 7 -----------------------------------------------------------------------

Outcome random_density_scan(const PrimeTable& t) {
  constexpr u64 kSlack = 10'000;
  const int k = 4;
  PrimeSubset p = random_density_subset(t, 0.55, 7);
  std::vector<PrimeSubset> four(4, p);
  const u64 hi = 4'000'000 - k * kSlack;
  auto r = scan_theorem(four, 0, hi, true, false);
  const auto& s = r.summary;
  // finite: the last zero sits inside the bound of P, far from the top of the window
  const bool finite = s.largest_zero && *s.largest_zero <= p.bound();
  std::ostringstream os;
  os << "density " << lower_density_estimate(p).to_double() << ", even n <= " << hi << ": largest zero "
     << (s.largest_zero ? std::to_string(*s.largest_zero) : "none") << ", " << s.zero_count
     << " zeros, min count above it " << s.min_count_after;
  return {finite && s.min_count_after > 0, os.str()};
}

// 8 -----------------------------------------------------------------------

Outcome sharpness(const PrimeTable& t) {
  bool ok = true;
  std::ostringstream os;
  for (int k : {4, 5}) {
    auto chk = sharpness_check(t, SharpnessKind::ShiftedMod3, k, 1'000'000, 1);
    // the stated pattern: remainder k-1 mod 3 is never hit
    const u64 claimed = static_cast<u64>(k - 1) % 3;
    const bool matches = chk.family.obstruction_classes == std::vector<u64>{claimed};
    ok = ok && chk.pattern_holds && matches;
    os << " shifted k=" << k << ": class " << claimed << " zeros " << chk.summary.zeros_by_class_mod3[claimed] << "/"
       << chk.summary.admissible_by_class_mod3[claimed] << ";";
  }
  auto empty = sharpness_check(t, SharpnessKind::EmptyLast, 4, 1'000'000);
  ok = ok && empty.pattern_holds && empty.family.all_blocked;
  os << " empty-last k=4: zeros " << empty.summary.zero_count << "/" << empty.summary.admissible;
  return {ok, "scan range 10^6:" + os.str()};
}

// 9 -----------------------------------------------------------------------

Outcome ntt_equivalence() {
  std::mt19937_64 rng(99);
  std::size_t mismatches = 0, transform_path = 0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t a = 1 + rng() % 512, b = 1 + rng() % 512;
    const std::int64_t range = t % 4 == 0 ? 100'000'000 : (t % 4 == 1 ? 1 : 1'000'000);
    std::uniform_int_distribution<std::int64_t> val(t % 2 == 0 ? -range : 0, range);
    std::vector<std::int64_t> u(a), v(b);
    for (auto& x : u) x = val(rng);
    for (auto& x : v) x = val(rng);
    if (std::min(a, b) > 48) ++transform_path;
    if (convolve_ntt(u, v) != convolve_quadratic(u, v)) ++mismatches;
  }
  std::ostringstream os;
  os << "1000 random pairs of length <= 512 (" << transform_path << " beyond the quadratic cutoff): " << mismatches
     << " mismatches";
  return {mismatches == 0, os.str()};
}

// 10 ----------------------------------------------------------------------

Outcome transference_identities() {
  PrimeTable t = sieve(50'000);
  std::vector<PrimeSubset> sets(4, all_primes(t));
  TransferenceConfig cfg;
  cfg.n = 100'000;
  cfg.k = 4;
  cfg.kappa = Rational(1, 100);
  cfg.W_override = 6;
  cfg.delta = 0.2;
  cfg.epsilon = 0.1;
  auto r = transference_report(cfg, sets);
  std::ostringstream os;
  if (!r.halted_at.empty()) return {false, "pipeline halted at " + r.halted_at + ": " + r.halt_reason};
  const bool each = std::all_of(r.indicators.begin(), r.indicators.end(),
                               [](const IndicatorDiagnostics& d) { return d.alpha_positive_bound_holds; });
  const bool ok = r.max_mass_error <= 1e-9 && r.max_damping_excess <= 1e-9 && r.max_parseval_error <= 1e-9 &&
                  r.alpha_prime_target_holds && each && std::isfinite(r.conv_difference);
  os << "N=" << r.N << " n'=" << r.n_prime << ": mass " << r.max_mass_error << ", damping " << r.max_damping_excess
     << ", Parseval " << r.max_parseval_error << ", sum alpha' " << r.alpha_prime_sum << " vs 1+1/k+kappa "
     << r.alpha_prime_target << (each ? ", each alpha' >= kappa/k" : ", some alpha' below kappa/k") << "; Lemma 4.1 difference " << r.conv_difference << ", ratio " << r.lemma41_ratio
     << "; final-bound ratio " << r.final_ratio << " (diagnostic)";
  return {ok, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  auto wanted = [&](int id) { return only.empty() || only.contains(id); };

  std::optional<PrimeTable> big;
  auto table = [&]() -> const PrimeTable& {
    if (!big) big = sieve(1'000'000);
    return *big;
  };

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"lemma grid verification", lemma_grids},
      {"sharpness of the four-sequence threshold", sharp4_threshold},
      {"residue-selection soundness and existence", residue_selection_sweep},
      {"Cauchy-Davenport", cauchy_davenport_sweep},
      {"Varnavides bound", varnavides_sweep},
      {"obstruction exactness", [&] { return obstruction_exactness(table()); }},
      {"desk-scale density scan", [&] { return random_density_scan(table()); }},
      {"sharpness families", [&] { return sharpness(table()); }},
      {"NTT oracle equivalence", ntt_equivalence},
      {"transference numerical identities", transference_identities},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!wanted(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failed;
    std::printf("%s %d %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(), o.detail.c_str(),
                secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
