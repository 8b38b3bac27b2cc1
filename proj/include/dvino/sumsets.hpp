#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <boost/dynamic_bitset.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "dvino/convolution.hpp"
#include "dvino/error.hpp"
#include "dvino/number_core.hpp"
#include "dvino/rational.hpp"

namespace dvino {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// A subset of Z_m as a bitset of length m.
using ResidueSet = boost::dynamic_bitset<std::uint64_t>;

inline ResidueSet residue_set(u64 m, std::span<const u64> elements) {
  if (m == 0) fail(ErrorKind::InvalidArgument, "modulus must be positive");
  ResidueSet s(m);
  for (u64 x : elements) s.set(x % m);
  return s;
}

inline std::vector<u64> elements(const ResidueSet& s) {
  std::vector<u64> out;
  for (auto i = s.find_first(); i != ResidueSet::npos; i = s.find_next(i)) out.push_back(i);
  return out;
}

/// {x_1 + ... + x_k mod m : x_i in A_i}, by shift-and-or over the smaller
/// operand at each step.
inline ResidueSet sumset(std::span<const ResidueSet> sets) {
  if (sets.empty()) fail(ErrorKind::EmptySet, "no sets given");
  const std::size_t m = sets[0].size();
  for (const auto& s : sets) {
    if (s.size() != m) fail(ErrorKind::InvalidArgument, "sets must share a modulus");
    if (s.none()) fail(ErrorKind::EmptySet, "an operand of the sumset is empty");
  }
  ResidueSet acc = sets[0];
  for (std::size_t i = 1; i < sets.size(); ++i) {
    const ResidueSet& small = sets[i].count() <= acc.count() ? sets[i] : acc;
    const ResidueSet& large = sets[i].count() <= acc.count() ? acc : sets[i];
    ResidueSet next(m);
    for (auto u = small.find_first(); u != ResidueSet::npos; u = small.find_next(u)) {
      // cyclic rotation of `large` by u
      if (u == 0) {
        next |= large;
      } else {
        next |= (large << u) | (large >> (m - u));
      }
    }
    acc = std::move(next);
  }
  return acc;
}

struct CauchyDavenport {
  std::size_t lhs = 0;  // |A_1 + ... + A_k|
  std::size_t rhs = 0;  // min(p, sum |A_i| - k + 1)
  bool holds = false;
};

inline CauchyDavenport cauchy_davenport_check(u64 p, std::span<const ResidueSet> sets) {
  if (!is_prime_trial(p)) fail(ErrorKind::NotPrime, std::to_string(p) + " is not prime");
  for (const auto& s : sets)
    if (s.size() != p) fail(ErrorKind::InvalidArgument, "sets must live in Z_p");
  CauchyDavenport r;
  r.lhs = sumset(sets).count();
  std::size_t total = 0;
  for (const auto& s : sets) total += s.count();
  r.rhs = std::min<std::size_t>(p, total - sets.size() + 1);
  r.holds = r.lhs >= r.rhs;
  return r;
}

namespace detail {

inline std::vector<std::int64_t> fold_mod(const std::vector<std::int64_t>& v, std::size_t m) {
  std::vector<std::int64_t> out(m, 0);
  for (std::size_t i = 0; i < v.size(); ++i) out[i % m] += v[i];
  return out;
}

inline std::vector<BigInt> cyclic_big(const std::vector<BigInt>& a, const std::vector<BigInt>& b) {
  const std::size_t m = a.size();
  std::vector<BigInt> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < m; ++j) {
      if (b[j] == 0) continue;
      out[(i + j) % m] += a[i] * b[j];
    }
  }
  return out;
}

}  // namespace detail

/// nu(n) for every n in Z_N: the number of ordered tuples (x_1..x_k) with
/// x_i in X_i and x_1 + ... + x_k = n mod N.
inline std::vector<BigInt> representation_counts_modN(std::span<const ResidueSet> sets) {
  if (sets.empty()) fail(ErrorKind::EmptySet, "no sets given");
  const std::size_t m = sets[0].size();
  for (const auto& s : sets)
    if (s.size() != m) fail(ErrorKind::InvalidArgument, "sets must share a modulus");
  // every count is at most the product of the set sizes
  BigInt ceiling = 1;
  for (const auto& s : sets) ceiling *= s.count();
  std::vector<BigInt> out(m);
  if (ceiling <= BigInt(std::numeric_limits<std::int64_t>::max() / 2)) {
    auto indicator = [&](const ResidueSet& s) {
      std::vector<std::int64_t> v(m, 0);
      for (auto i = s.find_first(); i != ResidueSet::npos; i = s.find_next(i)) v[i] = 1;
      return v;
    };
    std::vector<std::int64_t> acc = indicator(sets[0]);
    for (std::size_t i = 1; i < sets.size(); ++i) {
      auto next = indicator(sets[i]);
      acc = detail::fold_mod(convolve_exact(acc, next), m);
    }
    for (std::size_t i = 0; i < m; ++i) out[i] = acc[i];
    return out;
  }
  std::vector<BigInt> acc(m);
  for (auto i = sets[0].find_first(); i != ResidueSet::npos; i = sets[0].find_next(i)) acc[i] = 1;
  for (std::size_t t = 1; t < sets.size(); ++t) {
    std::vector<BigInt> ind(m);
    for (auto i = sets[t].find_first(); i != ResidueSet::npos; i = sets[t].find_next(i)) ind[i] = 1;
    acc = detail::cyclic_big(acc, ind);
  }
  return acc;
}

inline BigInt count_representations_modN(std::span<const ResidueSet> sets, std::int64_t n) {
  if (sets.empty()) fail(ErrorKind::EmptySet, "no sets given");
  const auto m = static_cast<std::int64_t>(sets[0].size());
  auto counts = representation_counts_modN(sets);
  return counts[static_cast<std::size_t>(((n % m) + m) % m)];
}

struct VarnavidesBound {
  Rational theta;
  BigRational bound;  // theta^(2k-3) * N^(k-1)
  u64 min_N = 0;      // smallest N with N > 2 theta^-2
};

inline VarnavidesBound varnavides_bound(std::span<const Rational> thetas, u64 N) {
  const auto k = static_cast<std::int64_t>(thetas.size());
  if (k < 2) fail(ErrorKind::HypothesisUnmet, "need k >= 2");
  Rational sum;
  for (const auto& t : thetas) {
    if (!t.is_positive() || t > Rational(1)) fail(ErrorKind::InvalidArgument, "theta must lie in (0, 1]");
    sum += t;
  }
  if (!(sum > Rational(1))) fail(ErrorKind::HypothesisUnmet, "thetas must sum to more than 1");
  Rational theta = (sum - Rational(1)) / Rational(3 * k - 5);
  for (const auto& t : thetas) theta = std::min(theta, t);
  // N > 2 / theta^2
  const BigRational th(BigInt(theta.num()), BigInt(theta.den()));
  const BigRational limit = BigRational(2) / (th * th);
  VarnavidesBound r;
  r.theta = theta;
  BigInt floor_limit = boost::multiprecision::numerator(limit) / boost::multiprecision::denominator(limit);
  r.min_N = static_cast<u64>(floor_limit) + 1;
  if (!(BigRational(BigInt(N)) > limit)) {
    fail(ErrorKind::HypothesisUnmet, "N = " + std::to_string(N) + " does not exceed 2/theta^2 = " + limit.str());
  }
  const auto e = static_cast<unsigned>(2 * k - 3);
  r.bound = BigRational(boost::multiprecision::pow(BigInt(theta.num()), e) *
                            boost::multiprecision::pow(BigInt(N), static_cast<unsigned>(k - 1)),
                        boost::multiprecision::pow(BigInt(theta.den()), e));
  return r;
}

struct VarnavidesTrial {
  u64 N = 0;
  std::vector<Rational> thetas;
  std::vector<ResidueSet> sets;
  VarnavidesBound bound;
  BigInt min_nu;
  bool holds = false;
};

/// One seeded instance: thetas on a 1/20 grid with a prime N in (2 theta^-2, max_N],
/// sets of exactly ceil(theta_i N) elements, random or an interval at a
/// random offset. Checks nu(n) >= theta^(2k-3) N^(k-1) for every n.
inline VarnavidesTrial varnavides_trial(int k, std::mt19937_64& rng, u64 max_N = 500) {
  if (k < 2) fail(ErrorKind::HypothesisUnmet, "need k >= 2");
  std::uniform_int_distribution<std::int64_t> grid(k == 2 ? 11 : 8, 20);
  VarnavidesTrial t;
  for (;;) {
    t.thetas.clear();
    for (int i = 0; i < k; ++i) t.thetas.emplace_back(grid(rng), 20);
    VarnavidesBound probe;
    try {
      probe = varnavides_bound(t.thetas, max_N);
    } catch (const Error&) {
      continue;
    }
    std::vector<u64> primes;
    for (u64 p = probe.min_N; p <= max_N; ++p)
      if (is_prime_trial(p)) primes.push_back(p);
    if (primes.empty()) continue;
    t.N = primes[rng() % primes.size()];
    break;
  }
  t.bound = varnavides_bound(t.thetas, t.N);
  for (const auto& th : t.thetas) {
    const auto need = static_cast<std::size_t>((th * Rational(static_cast<std::int64_t>(t.N))).ceil());
    ResidueSet s(t.N);
    if (rng() % 2 == 0) {
      while (s.count() < need) s.set(rng() % t.N);
    } else {
      const u64 start = rng() % t.N;
      for (std::size_t i = 0; i < need; ++i) s.set((start + i) % t.N);
    }
    t.sets.push_back(std::move(s));
  }
  auto counts = representation_counts_modN(t.sets);
  t.min_nu = *std::min_element(counts.begin(), counts.end());
  t.holds = BigRational(t.min_nu) >= t.bound.bound;
  return t;
}

}  // namespace dvino
