#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dvino/convolution.hpp"
#include "dvino/error.hpp"
#include "dvino/number_core.hpp"
#include "dvino/prime_sets.hpp"
#include "dvino/rational.hpp"
#include "dvino/residue_selection.hpp"

namespace dvino {

struct TransferenceConfig {
  u64 n = 100'000;
  int k = 4;
  Rational kappa{1, 100};
  std::optional<u64> W_override;
  double delta = 0.2;
  double epsilon = 0.1;
  /// Direct O(k N^2) evaluation of the k-fold convolutions is done when N is
  /// at most this, as a cross-check on the transform route.
  u64 direct_check_limit = 20'000;

  [[nodiscard]] double gamma() const { return 2.0 / k; }

  void validate() const {
    if (k < 2) fail(ErrorKind::InvalidArgument, "k must be at least 2");
    if (n < 16) fail(ErrorKind::InvalidArgument, "n must be at least 16");
    if ((n + static_cast<u64>(k)) % 2 != 0) {
      fail(ErrorKind::ParityMismatch, "n must be congruent to k mod 2");
    }
    if (!kappa.is_positive()) fail(ErrorKind::InvalidArgument, "kappa must be positive");
    if (!(delta > 0 && delta < 1)) fail(ErrorKind::InvalidArgument, "delta must lie in (0, 1)");
    if (!(epsilon > 0 && epsilon < 1)) fail(ErrorKind::InvalidArgument, "epsilon must lie in (0, 1)");
    if (W_override) {
      if (*W_override == 0) fail(ErrorKind::InvalidArgument, "W_override must be positive");
      factor_squarefree(*W_override);
    }
  }
};

struct WTrick {
  double omega = 0;
  u64 W = 1;
  u64 W_formula = 1;  // the product of primes <= omega, before any override
};

inline u64 primorial_upto(double omega) {
  u64 W = 1;
  for (u64 p = 2; static_cast<double>(p) <= omega; ++p) {
    if (!is_prime_trial(p)) continue;
    if (W > std::numeric_limits<u64>::max() / p) fail(ErrorKind::Overflow, "W overflows 64 bits");
    W *= p;
  }
  return W;
}

inline WTrick wtrick(u64 n, std::optional<u64> override = std::nullopt) {
  if (n < 16) fail(ErrorKind::InvalidArgument, "n must be at least 16");
  WTrick w;
  w.omega = 0.25 * std::log(std::log(static_cast<double>(n)));
  w.W_formula = primorial_upto(w.omega);
  w.W = override ? *override : w.W_formula;
  return w;
}

// ---------------------------------------------------------------------------
// Residue weights

struct ResidueWeights {
  WeightVector f;             // exact, each raw value rounded down to a multiple of 1e-9
  std::vector<double> raw;    // before clamping to [0, 1]
  bool clamped = false;       // some raw value exceeded 1
};

inline constexpr std::int64_t kWeightDenominator = 1'000'000'000;

/// f(b) = max(0, (phi(W)/(gamma n)) * sum_{x <= gamma n, x = b mod W} 1_P(x) log x - kappa),
/// clamped at 1, for b in Z_W^*.
inline ResidueWeights residue_weights(const PrimeSubset& P, u64 n, u64 W, double kappa, double gamma) {
  SqfModulus m = factor_squarefree(W);
  const double limit = gamma * static_cast<double>(n);
  const auto top = static_cast<u64>(std::floor(limit));
  if (P.bound() < top) {
    fail(ErrorKind::BoundMismatch, "subset bound " + std::to_string(P.bound()) + " is below gamma*n = " +
                                       std::to_string(top));
  }
  std::vector<u64> us = units(m);
  std::vector<double> sums(W, 0.0);
  for (u64 p : P.primes()) {
    if (p > top) break;
    sums[p % W] += std::log(static_cast<double>(p));
  }
  ResidueWeights r;
  std::vector<Rational> vals;
  const double scale = static_cast<double>(m.totient) / limit;
  for (u64 b : us) {
    double v = std::max(0.0, scale * sums[W == 1 ? 0 : b] - kappa);
    r.raw.push_back(v);
    if (v > 1.0) {
      r.clamped = true;
      v = 1.0;
    }
    vals.push_back(Rational::floor_of(v, kWeightDenominator));
  }
  r.f = WeightVector(std::move(m), std::move(vals));
  return r;
}

inline u64 choose_prime_in(u64 lo, u64 hi) {
  if (lo <= hi) {
    PrimeTable t = sieve(hi);
    for (u64 x = std::max<u64>(lo, 2); x <= hi; ++x)
      if (t.is_prime(x)) return x;
  }
  fail(ErrorKind::NoPrimeInInterval, "no prime in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

/// Smallest prime in [(1+kappa) n/W, (1+2kappa) n/W].
inline u64 choose_N(u64 n, u64 W, double kappa) {
  if (W == 0) fail(ErrorKind::InvalidArgument, "W must be positive");
  const double base = static_cast<double>(n) / static_cast<double>(W);
  const auto lo = static_cast<u64>(std::ceil((1 + kappa) * base - 1e-9));
  const auto hi = static_cast<u64>(std::floor((1 + 2 * kappa) * base + 1e-9));
  return choose_prime_in(lo, hi);
}

// ---------------------------------------------------------------------------
// Weighted indicators on Z_N

struct WeightedIndicator {
  std::vector<double> a;     // a(x) = 1_A(x) * lambda(x) on Z_N
  std::vector<u64> support;  // A = {x : Wx + b in P, 1 <= Wx + b <= limit, x <= N}
  double alpha_prime = 0;    // sum of a
};

/// lambda(x) = phi(W) log(Wx + b) / (W N) when x <= N and Wx + b is in P up to
/// `limit`; the elements live in Z_N, so x = N (if admitted) folds onto 0.
inline WeightedIndicator build_weighted_indicator(const PrimeSubset& P, u64 b, u64 W, u64 N, u64 limit) {
  SqfModulus m = factor_squarefree(W);
  if (W > 1 && std::gcd(b, W) != 1) fail(ErrorKind::InvalidArgument, "b must be a unit mod W");
  if (P.bound() < limit) fail(ErrorKind::BoundMismatch, "subset bound is below the range limit");
  WeightedIndicator w;
  w.a.assign(N, 0.0);
  const double scale = static_cast<double>(m.totient) / (static_cast<double>(W) * static_cast<double>(N));
  for (u64 x = 0; x <= N; ++x) {
    const u64 y = W * x + b;
    if (y > limit) break;
    if (y == 0 || !P.contains(y)) continue;
    w.support.push_back(x);
    w.a[x % N] += scale * std::log(static_cast<double>(y));
  }
  for (double v : w.a) w.alpha_prime += v;
  return w;
}

// ---------------------------------------------------------------------------
// Fourier analysis on Z_N

using Spectrum = std::vector<std::complex<double>>;

namespace detail {

inline Spectrum fftw_run(const Spectrum& in, int sign) {
  const int n = static_cast<int>(in.size());
  Spectrum out(in.size());
  if (in.empty()) return out;
  Spectrum buf = in;
  fftw_plan plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(buf.data()),
                                    reinterpret_cast<fftw_complex*>(out.data()), sign, FFTW_ESTIMATE);
  if (!plan) fail(ErrorKind::InvalidArgument, "could not plan a DFT of length " + std::to_string(n));
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  return out;
}

}  // namespace detail

/// f~(r) = sum_x f(x) e(-rx/N).
inline Spectrum dft(std::span<const double> f) {
  Spectrum in(f.begin(), f.end());
  return detail::fftw_run(in, FFTW_FORWARD);
}

inline Spectrum dft(const Spectrum& f) { return detail::fftw_run(f, FFTW_FORWARD); }

/// Inverse of dft: f(x) = (1/N) sum_r f~(r) e(rx/N).
inline Spectrum inverse_dft(const Spectrum& g) {
  Spectrum out = detail::fftw_run(g, FFTW_BACKWARD);
  const double inv = out.empty() ? 0.0 : 1.0 / static_cast<double>(out.size());
  for (auto& z : out) z *= inv;
  return out;
}

inline std::vector<u64> bohr_set(u64 N, std::span<const u64> R, double epsilon) {
  std::vector<u64> B;
  for (u64 x = 0; x < N; ++x) {
    bool inside = true;
    for (u64 r : R) {
      const u64 t = static_cast<u64>(static_cast<unsigned __int128>(x) * r % N);
      const u64 dist = std::min(t, N - t);
      if (static_cast<double>(dist) > epsilon * static_cast<double>(N)) {
        inside = false;
        break;
      }
    }
    if (inside) B.push_back(x);
  }
  return B;
}

struct BohrData {
  std::vector<u64> R;      // {r : |f~(r)| >= delta}
  std::vector<u64> B;      // {x : ||x r / N|| <= epsilon for all r in R}
  std::vector<double> beta;  // uniform probability on B
};

/// ||xr/N|| is evaluated from the integer xr mod N, so membership is exact up
/// to the comparison with epsilon.
inline BohrData superlevel_and_bohr(const Spectrum& spectrum, double delta, double epsilon) {
  if (!(delta > 0 && delta < 1) || !(epsilon > 0 && epsilon < 1)) {
    fail(ErrorKind::InvalidArgument, "delta and epsilon must lie in (0, 1)");
  }
  const u64 N = spectrum.size();
  BohrData d;
  for (u64 r = 0; r < N; ++r)
    if (std::abs(spectrum[r]) >= delta) d.R.push_back(r);
  d.B = bohr_set(N, d.R, epsilon);
  d.beta.assign(N, 0.0);
  for (u64 x : d.B) d.beta[x] = 1.0 / static_cast<double>(d.B.size());
  return d;
}


/// Cyclic convolution with a sparse probability vector.
inline std::vector<double> convolve_sparse(std::span<const double> a, std::span<const double> beta) {
  const std::size_t N = a.size();
  std::vector<double> out(N, 0.0);
  for (std::size_t y = 0; y < N; ++y) {
    if (beta[y] == 0.0) continue;
    for (std::size_t x = 0; x < N; ++x) {
      std::size_t t = x + y;
      if (t >= N) t -= N;
      out[t] += a[x] * beta[y];
    }
  }
  return out;
}

/// a' = a * beta * beta.
inline std::vector<double> smooth(std::span<const double> a, std::span<const double> beta) {
  if (a.size() != beta.size()) fail(ErrorKind::InvalidArgument, "length mismatch");
  double mass = 0;
  for (double v : beta) {
    if (v < 0) fail(ErrorKind::InvalidArgument, "beta must be a probability vector");
    mass += v;
  }
  if (std::abs(mass - 1.0) > 1e-9) fail(ErrorKind::InvalidArgument, "beta must sum to 1");
  auto once = convolve_sparse(a, beta);
  return convolve_sparse(once, beta);
}

/// (f_1 * ... * f_k)(n) on Z_N through the transforms.
inline double kfold_at_spectral(std::span<const Spectrum> spectra, u64 n) {
  const u64 N = spectra[0].size();
  std::complex<double> acc = 0;
  for (u64 r = 0; r < N; ++r) {
    std::complex<double> prod = 1;
    for (const auto& s : spectra) prod *= s[r];
    const double angle = 2 * std::numbers::pi * static_cast<double>(static_cast<unsigned __int128>(n) * r % N) /
                         static_cast<double>(N);
    acc += prod * std::polar(1.0, angle);
  }
  return acc.real() / static_cast<double>(N);
}

/// Same value by direct iterated cyclic convolution, in long double.
inline long double kfold_at_direct(std::span<const std::vector<double>> fs, u64 n) {
  const std::size_t N = fs[0].size();
  std::vector<long double> acc(fs[0].begin(), fs[0].end());
  for (std::size_t i = 1; i < fs.size(); ++i) {
    std::vector<long double> next(N, 0.0L);
    for (std::size_t y = 0; y < N; ++y) {
      if (fs[i][y] == 0.0) continue;
      const long double v = fs[i][y];
      for (std::size_t x = 0; x < N; ++x) {
        std::size_t t = x + y;
        if (t >= N) t -= N;
        next[t] += acc[x] * v;
      }
    }
    acc = std::move(next);
  }
  return acc[n % N];
}

// ---------------------------------------------------------------------------
// Pipeline

struct IndicatorDiagnostics {
  u64 b = 0;
  double f_b = 0;
  double alpha_prime = 0;
  double alpha_prime_smoothed = 0;
  std::size_t support_size = 0;
  std::size_t R_size = 0;
  std::size_t B_size = 0;
  double max_scaled = 0;              // max_x a'(x) * N
  std::size_t level_set_size = 0;     // |A'| with A' = {a' >= alpha' kappa / N}
  double level_set_bound = 0;         // alpha' (1 - kappa) N / (1 + kappa)
  bool level_set_bound_holds = false;
  bool alpha_positive_bound_holds = false;  // alpha' >= kappa / k
  double mass_error = 0;              // |sum a' - sum a| / sum a
  double damping_excess = 0;          // max_r (|a'~(r)| - |a~(r)|), clipped below at 0
  double parseval_error = 0;          // relative, on a
  double parseval_error_smoothed = 0; // relative, on a'
  double convolution_theorem_error = 0;  // max |dft(a') - a~ beta~^2|, relative to sum a
};

struct TransferenceReport {
  TransferenceConfig config;
  WTrick w;
  bool degenerate = false;  // W = 1: residue selection is vacuous
  std::string halted_at;    // empty when the pipeline completed
  std::string halt_reason;
  std::vector<std::vector<double>> weights;  // f_i on Z_W^*, in unit order
  bool weights_clamped = false;
  std::optional<ResidueWitness> selection;
  Rational selection_c;
  double selection_value_sum = 0;
  bool selection_exceeds_half_k_plus_1 = false;  // f_1(b_1) + ... + f_k(b_k) > (k+1)/2
  u64 N = 0;
  u64 n_prime = 0;
  bool lift_ok = false;      // max A_1 + ... + max A_k < n' + N
  u64 lift_max_sum = 0;
  std::vector<IndicatorDiagnostics> indicators;
  double alpha_prime_sum = 0;
  double alpha_prime_target = 0;      // 1 + 1/k + kappa
  bool alpha_prime_target_holds = false;
  double alpha_prime_chain = 0;       // gamma/(1+2kappa) (sum f(b_i) + k kappa)
  // (i)
  double conv_a = 0;
  double conv_a_smoothed = 0;
  double conv_difference = 0;
  std::optional<long double> conv_a_direct;
  std::optional<long double> conv_a_smoothed_direct;
  // (ii)
  double lemma41_shape = 0;  // (eps^2 delta^(-5/2) + delta^(k/(k+1))) / N
  double lemma41_ratio = 0;
  // (v)
  double final_bound = 0;    // (1/2) kappa^(2k) k^(3-2k) / N
  double final_ratio = 0;
  // ordered tuples (x_1..x_k), x_i in A_i, with sum n' in Z and in Z_N
  std::int64_t count_in_Z = 0;
  std::int64_t count_in_ZN = 0;
  // numerical identity summary
  double max_mass_error = 0;
  double max_damping_excess = 0;
  double max_parseval_error = 0;
  double max_convolution_theorem_error = 0;
};

namespace detail {

inline double parseval_relative(std::span<const double> f, const Spectrum& s) {
  double lhs = 0, rhs = 0;
  for (double v : f) lhs += v * v;
  for (const auto& z : s) rhs += std::norm(z);
  rhs /= static_cast<double>(f.size());
  return lhs == 0 ? std::abs(rhs) : std::abs(lhs - rhs) / lhs;
}

}  // namespace detail

/// Runs W-trick, residue weights, residue selection, choice of N, weighted
/// indicators, Bohr smoothing and the numerical diagnostics. Stage failures
/// are recorded in halted_at / halt_reason rather than thrown.
inline TransferenceReport transference_report(const TransferenceConfig& cfg, std::span<const PrimeSubset> subsets) {
  cfg.validate();
  if (static_cast<int>(subsets.size()) != cfg.k) {
    fail(ErrorKind::InvalidArgument, "expected " + std::to_string(cfg.k) + " subsets");
  }
  TransferenceReport rep;
  rep.config = cfg;
  const int k = cfg.k;
  const double kappa = cfg.kappa.to_double();
  const double gamma = cfg.gamma();
  const auto limit = static_cast<u64>(std::floor(gamma * static_cast<double>(cfg.n)));

  rep.w = wtrick(cfg.n, cfg.W_override);
  const u64 W = rep.w.W;
  rep.degenerate = (W == 1);

  // residue weights
  std::vector<WeightVector> fs;
  for (const auto& P : subsets) {
    auto rw = residue_weights(P, cfg.n, W, kappa, gamma);
    rep.weights_clamped = rep.weights_clamped || rw.clamped;
    std::vector<double> vals;
    for (const auto& v : rw.f.values()) vals.push_back(v.to_double());
    rep.weights.push_back(std::move(vals));
    fs.push_back(std::move(rw.f));
  }
  for (const auto& f : fs) {
    if (f.is_zero()) {
      rep.halted_at = "residue_weights";
      rep.halt_reason = "a weight function is identically zero";
      return rep;
    }
  }

  // residue selection with c halfway between (k+1)/(2k) and the mass ratio
  Rational total;
  for (const auto& f : fs) total += f.mass();
  const SqfModulus& m = fs[0].modulus();
  const Rational ratio = total / Rational(static_cast<std::int64_t>(k * m.totient));
  const Rational floor_c(k + 1, 2 * k);
  if (!(ratio > floor_c)) {
    rep.halted_at = "residue_selection";
    rep.halt_reason = "weight mass " + ratio.str() + " per unit does not exceed (k+1)/(2k)";
    return rep;
  }
  rep.selection_c = (ratio + floor_c) / Rational(2);
  try {
    rep.selection = select_residues_multi(fs, rep.selection_c, static_cast<std::int64_t>(cfg.n));
  } catch (const Error& e) {
    rep.halted_at = "residue_selection";
    rep.halt_reason = e.what();
    return rep;
  }
  const auto& sel = *rep.selection;
  rep.selection_value_sum = sel.value_sum.to_double();
  rep.selection_exceeds_half_k_plus_1 = sel.value_sum > Rational(k + 1, 2);

  // N and n'
  try {
    rep.N = choose_N(cfg.n, W, kappa);
  } catch (const Error& e) {
    rep.halted_at = "choose_N";
    rep.halt_reason = e.what();
    return rep;
  }
  const u64 N = rep.N;
  std::vector<u64> bs = sel.residues;
  if (W == 1) std::fill(bs.begin(), bs.end(), 0);
  u64 bsum = 0;
  for (u64 b : bs) bsum += b;
  if (bsum > cfg.n || (cfg.n - bsum) % W != 0) {
    rep.halted_at = "n_prime";
    rep.halt_reason = "n - sum b_i is not a nonnegative multiple of W";
    return rep;
  }
  rep.n_prime = (cfg.n - bsum) / W;

  // indicators, spectra, Bohr sets, smoothing
  std::vector<std::vector<double>> as, smoothed;
  std::vector<Spectrum> spectra, spectra_smoothed;
  rep.lift_max_sum = 0;
  for (int i = 0; i < k; ++i) {
    IndicatorDiagnostics d;
    d.b = bs[static_cast<std::size_t>(i)];
    d.f_b = fs[static_cast<std::size_t>(i)].at(sel.residues[static_cast<std::size_t>(i)]).to_double();
    WeightedIndicator wi = build_weighted_indicator(subsets[static_cast<std::size_t>(i)], d.b, W, N, limit);
    d.alpha_prime = wi.alpha_prime;
    d.support_size = wi.support.size();
    if (!wi.support.empty()) rep.lift_max_sum += wi.support.back();
    Spectrum s = dft(wi.a);
    BohrData bohr = superlevel_and_bohr(s, cfg.delta, cfg.epsilon);
    d.R_size = bohr.R.size();
    d.B_size = bohr.B.size();
    std::vector<double> ap = smooth(wi.a, bohr.beta);
    Spectrum sp = dft(ap);
    Spectrum sb = dft(bohr.beta);

    for (double v : ap) {
      d.alpha_prime_smoothed += v;
      d.max_scaled = std::max(d.max_scaled, v * static_cast<double>(N));
    }
    const double scale = std::max(d.alpha_prime, 1e-300);
    d.mass_error = std::abs(d.alpha_prime_smoothed - d.alpha_prime) / scale;
    for (u64 r = 0; r < N; ++r) {
      d.damping_excess = std::max(d.damping_excess, std::abs(sp[r]) - std::abs(s[r]));
      d.convolution_theorem_error =
          std::max(d.convolution_theorem_error, std::abs(sp[r] - s[r] * sb[r] * sb[r]) / scale);
    }
    d.parseval_error = detail::parseval_relative(wi.a, s);
    d.parseval_error_smoothed = detail::parseval_relative(ap, sp);
    const double level = d.alpha_prime * kappa / static_cast<double>(N);
    for (double v : ap)
      if (v >= level) ++d.level_set_size;
    d.level_set_bound = d.alpha_prime * (1 - kappa) * static_cast<double>(N) / (1 + kappa);
    d.level_set_bound_holds = static_cast<double>(d.level_set_size) >= d.level_set_bound;
    d.alpha_positive_bound_holds = d.alpha_prime >= kappa / k;

    rep.alpha_prime_sum += d.alpha_prime;
    rep.max_mass_error = std::max(rep.max_mass_error, d.mass_error);
    rep.max_damping_excess = std::max(rep.max_damping_excess, d.damping_excess);
    rep.max_parseval_error = std::max({rep.max_parseval_error, d.parseval_error, d.parseval_error_smoothed});
    rep.max_convolution_theorem_error = std::max(rep.max_convolution_theorem_error, d.convolution_theorem_error);
    rep.indicators.push_back(d);
    as.push_back(std::move(wi.a));
    smoothed.push_back(std::move(ap));
    spectra.push_back(std::move(s));
    spectra_smoothed.push_back(std::move(sp));
  }
  rep.lift_ok = rep.lift_max_sum < rep.n_prime + N;
  rep.alpha_prime_target = 1.0 + 1.0 / k + kappa;
  rep.alpha_prime_target_holds = rep.alpha_prime_sum >= rep.alpha_prime_target;
  double fsum = 0;
  for (const auto& d : rep.indicators) fsum += d.f_b;
  rep.alpha_prime_chain = gamma / (1 + 2 * kappa) * (fsum + k * kappa);

  // exact representation counts of n' by the sets A_i
  {
    std::vector<std::int64_t> acc;
    std::vector<std::vector<std::int64_t>> inds;
    for (const auto& a : as) {
      std::vector<std::int64_t> ind(N, 0);
      for (u64 x = 0; x < N; ++x) ind[x] = a[x] > 0 ? 1 : 0;
      inds.push_back(std::move(ind));
    }
    acc = inds[0];
    for (std::size_t i = 1; i < inds.size(); ++i) acc = convolve_exact(acc, inds[i]);
    rep.count_in_Z = rep.n_prime < acc.size() ? acc[rep.n_prime] : 0;
    for (std::size_t t = rep.n_prime % N; t < acc.size(); t += N) rep.count_in_ZN += acc[t];
  }

  // (i) and (ii)
  rep.conv_a = kfold_at_spectral(spectra, rep.n_prime);
  rep.conv_a_smoothed = kfold_at_spectral(spectra_smoothed, rep.n_prime);
  rep.conv_difference = std::abs(rep.conv_a_smoothed - rep.conv_a);
  if (N <= cfg.direct_check_limit) {
    rep.conv_a_direct = kfold_at_direct(as, rep.n_prime);
    rep.conv_a_smoothed_direct = kfold_at_direct(smoothed, rep.n_prime);
  }
  rep.lemma41_shape = (cfg.epsilon * cfg.epsilon * std::pow(cfg.delta, -2.5) +
                       std::pow(cfg.delta, static_cast<double>(k) / (k + 1))) /
                      static_cast<double>(N);
  rep.lemma41_ratio = rep.conv_difference / rep.lemma41_shape;
  // (v)
  rep.final_bound = 0.5 * std::pow(kappa, 2.0 * k) * std::pow(static_cast<double>(k), 3.0 - 2.0 * k) /
                    static_cast<double>(N);
  rep.final_ratio = rep.conv_a / rep.final_bound;
  return rep;
}

}  // namespace dvino
