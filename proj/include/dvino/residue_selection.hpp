#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dvino/combinatorics.hpp"
#include "dvino/error.hpp"
#include "dvino/number_core.hpp"
#include "dvino/rational.hpp"

namespace dvino {

/// A function Z_q^* -> [0,1] with exact rational values, stored in the order
/// of units(modulus).
class WeightVector {
 public:
  WeightVector() = default;
  WeightVector(SqfModulus modulus, std::vector<Rational> values)
      : modulus_(std::move(modulus)), units_(dvino::units(modulus_)), values_(std::move(values)) {
    if (values_.size() != units_.size()) {
      fail(ErrorKind::InvalidArgument, "weight count " + std::to_string(values_.size()) +
                                           " differs from totient " + std::to_string(units_.size()));
    }
    index_.assign(modulus_.q, -1);
    for (std::size_t i = 0; i < units_.size(); ++i) {
      index_[units_[i]] = static_cast<std::int32_t>(i);
      if (values_[i] < Rational(0) || values_[i] > Rational(1)) {
        fail(ErrorKind::InvalidArgument, "weight " + values_[i].str() + " outside [0,1]");
      }
      mass_ += values_[i];
    }
  }

  /// Keys must be exactly the units of Z_q.
  static WeightVector from_map(const SqfModulus& modulus, const std::map<u64, Rational>& values) {
    std::vector<u64> us = dvino::units(modulus);
    if (values.size() != us.size()) fail(ErrorKind::InvalidArgument, "weights must cover exactly the units");
    std::vector<Rational> v;
    v.reserve(us.size());
    for (u64 u : us) {
      auto it = values.find(u);
      if (it == values.end()) fail(ErrorKind::InvalidArgument, "missing weight for unit " + std::to_string(u));
      v.push_back(it->second);
    }
    return WeightVector(modulus, std::move(v));
  }

  static WeightVector constant(const SqfModulus& modulus, const Rational& value) {
    return WeightVector(modulus, std::vector<Rational>(modulus.totient, value));
  }

  [[nodiscard]] const SqfModulus& modulus() const noexcept { return modulus_; }
  [[nodiscard]] u64 q() const noexcept { return modulus_.q; }
  [[nodiscard]] const std::vector<u64>& units() const noexcept { return units_; }
  [[nodiscard]] const std::vector<Rational>& values() const noexcept { return values_; }
  [[nodiscard]] const Rational& mass() const noexcept { return mass_; }
  [[nodiscard]] bool is_zero() const noexcept { return mass_.is_zero(); }
  [[nodiscard]] bool is_unit(u64 residue) const noexcept {
    return residue < modulus_.q && index_[residue] >= 0;
  }
  [[nodiscard]] const Rational& at(u64 residue) const {
    if (!is_unit(residue)) fail(ErrorKind::InvalidArgument, std::to_string(residue) + " is not a unit");
    return values_[static_cast<std::size_t>(index_[residue])];
  }

  friend bool operator==(const WeightVector& a, const WeightVector& b) {
    return a.modulus_ == b.modulus_ && a.values_ == b.values_;
  }

 private:
  SqfModulus modulus_;
  std::vector<u64> units_;
  std::vector<Rational> values_;
  std::vector<std::int32_t> index_;
  Rational mass_;
};

struct ResidueWitness {
  u64 q = 1;
  int k = 0;
  u64 target = 0;  // n mod q
  std::vector<u64> residues;
  std::vector<Rational> values;
  Rational value_sum;
  Rational threshold;  // the bound the witness is held to
  std::string branch;
  /// Informational: the conclusion constant as printed for k = 4, 3 | q,
  /// 4((16/3)c - 1), and the summary's (2c - 1)k. Absent elsewhere.
  std::optional<Rational> statement_bound;
  std::optional<Rational> recap_bound;

  [[nodiscard]] bool meets_threshold() const { return value_sum > threshold; }
  [[nodiscard]] std::optional<bool> meets_statement_bound() const {
    if (!statement_bound) return std::nullopt;
    return value_sum > *statement_bound;
  }
};

/// Recomputes congruence, positivity, the value sum and the threshold test.
inline bool residue_witness_is_sound(std::span<const WeightVector> fs, const ResidueWitness& w) {
  if (fs.empty() || w.residues.size() != fs.size() || w.values.size() != fs.size()) return false;
  const u64 q = fs[0].q();
  if (w.q != q) return false;
  u64 sum = 0;
  Rational vs;
  for (std::size_t j = 0; j < fs.size(); ++j) {
    if (!fs[j].is_unit(w.residues[j])) return false;
    const Rational& v = fs[j].at(w.residues[j]);
    if (!v.is_positive() || v != w.values[j]) return false;
    vs += v;
    sum = (sum + w.residues[j]) % q;
  }
  return sum == w.target % q && vs == w.value_sum && vs > w.threshold;
}

/// g(x) = (1/phi(p)) * sum over y in Z_p^* of f(crt_merge(x, y)), on Z_{q/p}^*.
inline WeightVector fiber_average(const WeightVector& f, u64 p) {
  const SqfModulus& m = f.modulus();
  if (!m.has_factor(p)) {
    fail(ErrorKind::BadFactor, std::to_string(p) + " is not a prime factor of " + std::to_string(m.q));
  }
  const u64 q1 = m.q / p;
  SqfModulus m1 = factor_squarefree(q1);
  std::vector<u64> xs = dvino::units(m1);
  std::vector<Rational> g;
  g.reserve(xs.size());
  const Rational scale(1, static_cast<std::int64_t>(p - 1));
  for (u64 x : xs) {
    Rational s;
    for (u64 y = 1; y < p; ++y) s += f.at(crt_merge(x, y, q1, p));
    g.push_back(s * scale);
  }
  return WeightVector(std::move(m1), std::move(g));
}

namespace detail {

inline u64 reduce_target(std::int64_t n, u64 q) {
  std::int64_t r = n % static_cast<std::int64_t>(q);
  if (r < 0) r += static_cast<std::int64_t>(q);
  return static_cast<u64>(r);
}

inline ResidueWitness assemble(std::span<const WeightVector> fs, u64 target, std::vector<u64> residues,
                               const Rational& threshold, std::string branch) {
  ResidueWitness w;
  w.q = fs[0].q();
  w.k = static_cast<int>(fs.size());
  w.target = target;
  w.residues = std::move(residues);
  w.threshold = threshold;
  w.branch = std::move(branch);
  for (std::size_t j = 0; j < fs.size(); ++j) {
    w.values.push_back(fs[j].at(w.residues[j]));
    w.value_sum += w.values.back();
  }
  return w;
}

/// Max-plus dynamic programme over Z_q: the largest value sum of a tuple with
/// residues drawn from allowed[j] (positive weight only) summing to target.
/// Ties resolve to the lexicographically smallest residue tuple.
inline std::optional<std::vector<u64>> maxplus_tuple(std::span<const WeightVector> fs,
                                                     const std::vector<std::vector<u64>>& allowed, u64 target) {
  const std::size_t k = fs.size();
  const u64 q = fs[0].q();
  // best[j][r]: best value from coordinates j.. when the partial sum is r
  std::vector<std::vector<std::optional<Rational>>> best(k + 1, std::vector<std::optional<Rational>>(q));
  best[k][target % q] = Rational(0);
  for (std::size_t j = k; j-- > 0;) {
    for (u64 r = 0; r < q; ++r) {
      std::optional<Rational> top;
      for (u64 u : allowed[j]) {
        const auto& tail = best[j + 1][(r + u) % q];
        if (!tail) continue;
        Rational cand = fs[j].at(u) + *tail;
        if (!top || cand > *top) top = cand;
      }
      best[j][r] = top;
    }
  }
  if (!best[0][0]) return std::nullopt;
  std::vector<u64> out(k);
  u64 r = 0;
  Rational remaining = *best[0][0];
  for (std::size_t j = 0; j < k; ++j) {
    for (u64 u : allowed[j]) {
      const auto& tail = best[j + 1][(r + u) % q];
      if (tail && fs[j].at(u) + *tail == remaining) {
        out[j] = u;
        remaining -= fs[j].at(u);
        r = (r + u) % q;
        break;
      }
    }
  }
  return out;
}

inline std::vector<std::vector<u64>> positive_support(std::span<const WeightVector> fs) {
  std::vector<std::vector<u64>> allowed(fs.size());
  for (std::size_t j = 0; j < fs.size(); ++j)
    for (std::size_t i = 0; i < fs[j].units().size(); ++i)
      if (fs[j].values()[i].is_positive()) allowed[j].push_back(fs[j].units()[i]);
  return allowed;
}

enum class Mode { Single, Multi };

struct Plan {
  Mode mode = Mode::Multi;
  int k = 4;
  Rational c;
  bool sharp4 = false;  // k = 4 and 3 | q in the multi lemma
};

/// Level-set step on a prime p: sort each weight descending, let a
/// combinatorial selector pick cut-offs with index sum >= p - 1, then find
/// residues in the level sets {f_j >= cut-off_j} summing to target. The
/// Cauchy-Davenport bound guarantees the level sets' sumset is all of Z_p.
inline std::optional<std::vector<u64>> prime_step(std::span<const WeightVector> fs, u64 target,
                                                  const Rational& threshold, const Plan& plan,
                                                  bool level_is_sharp4) {
  const u64 p = fs[0].q();
  const std::size_t k = fs.size();
  if (p == 2) {
    // Z_2^* = {1}: the only tuple is all ones
    if ((static_cast<u64>(k) - target) % 2 != 0) return std::nullopt;
    std::vector<u64> ones(k, 1);
    Rational vs;
    for (const auto& f : fs) {
      if (!f.at(1).is_positive()) return std::nullopt;
      vs += f.at(1);
    }
    if (!(vs > threshold)) return std::nullopt;
    return ones;
  }

  std::vector<ValueSequence> cols;
  cols.reserve(k);
  for (const auto& f : fs) {
    std::vector<Rational> v = f.values();
    std::sort(v.begin(), v.end(), std::greater<>());
    cols.emplace_back(std::move(v));
  }
  const std::size_t n = static_cast<std::size_t>(p - 1);
  const bool identical =
      std::all_of(fs.begin(), fs.end(), [&](const WeightVector& f) { return f == fs[0]; });

  std::optional<SelectionWitness> sel;
  try {
    if (plan.mode == Mode::Single && identical && n % 2 == 0) {
      sel = select_single(cols[0], static_cast<int>(k), plan.c);
    } else if (level_is_sharp4 && n == 2 && k == 4) {
      sel = select_sharp4(cols[0], cols[1], cols[2], cols[3], plan.c);
    } else {
      sel = select_multi(cols, plan.c);
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NoWitness) return std::nullopt;
    if (e.kind() != ErrorKind::HypothesisUnmet && e.kind() != ErrorKind::BadShape) throw;
    // Fiber data outside a selector's stated hypothesis: use the optimum directly.
    auto idx = optimal_selection(cols, n);
    if (!idx) return std::nullopt;
    sel = make_witness(cols, *idx, threshold);
  }
  if (!sel || !(sel->value_sum > threshold)) return std::nullopt;

  std::vector<std::vector<u64>> level(k);
  for (std::size_t j = 0; j < k; ++j) {
    const Rational& cut = cols[j][sel->indices[j]];
    for (std::size_t i = 0; i < fs[j].units().size(); ++i)
      if (fs[j].values()[i] >= cut) level[j].push_back(fs[j].units()[i]);
  }
  auto tuple = maxplus_tuple(fs, level, target);
  if (!tuple) fail(ErrorKind::NoWitness, "level sets fail to cover Z_" + std::to_string(p) + " (sumset defect)");
  return tuple;
}

/// Order in which prime factors are split off, outermost first: 2, then 3
/// when the four-sequence lemma is needed, then the rest from largest down.
inline std::vector<u64> peel_order(const SqfModulus& m, const Plan& plan) {
  std::vector<u64> odd;
  bool has2 = false, has3 = false;
  for (u64 p : m.factors) {
    if (p == 2) {
      has2 = true;
    } else if (p == 3 && plan.sharp4) {
      has3 = true;
    } else {
      odd.push_back(p);
    }
  }
  std::sort(odd.begin(), odd.end(), std::greater<>());
  std::vector<u64> order;
  if (has2) order.push_back(2);
  if (has3) order.push_back(3);
  order.insert(order.end(), odd.begin(), odd.end());
  return order;
}

inline std::optional<std::vector<u64>> solve_fiberwise(std::span<const WeightVector> fs, u64 target,
                                                       const Rational& threshold, const Plan& plan,
                                                       std::span<const u64> order, bool level_is_sharp4) {
  const SqfModulus& m = fs[0].modulus();
  const std::size_t k = fs.size();
  if (m.q == 1) {
    Rational vs;
    for (const auto& f : fs) {
      if (!f.at(0).is_positive()) return std::nullopt;
      vs += f.at(0);
    }
    if (!(vs > threshold)) return std::nullopt;
    return std::vector<u64>(k, 0);
  }
  if (m.factors.size() == 1) return prime_step(fs, target, threshold, plan, level_is_sharp4);

  const u64 p = order.front();
  const u64 q1 = m.q / p;
  std::vector<WeightVector> gs;
  gs.reserve(k);
  for (const auto& f : fs) gs.push_back(fiber_average(f, p));
  // Splitting off 2 passes the threshold through unchanged; any other prime
  // needs the stronger c*k conclusion one level down.
  const Rational strong = plan.c * Rational(plan.k);
  const bool inner_sharp4 = (p == 2) && level_is_sharp4;
  const Rational& inner_threshold = (p == 2) ? threshold : strong;
  auto xs = solve_fiberwise(gs, target % q1, inner_threshold, plan, order.subspan(1), inner_sharp4);
  if (!xs) return std::nullopt;

  SqfModulus mp = factor_squarefree(p);
  std::vector<WeightVector> hs;
  hs.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<Rational> h;
    h.reserve(p - 1);
    for (u64 y = 1; y < p; ++y) h.push_back(fs[j].at(crt_merge((*xs)[j], y, q1, p)));
    hs.emplace_back(mp, std::move(h));
  }
  auto ys = prime_step(hs, target % p, threshold, plan, level_is_sharp4 && p == 3);
  if (!ys) return std::nullopt;
  std::vector<u64> out(k);
  for (std::size_t j = 0; j < k; ++j) out[j] = crt_merge((*xs)[j], (*ys)[j], q1, p);
  return out;
}

inline std::string fiber_branch(const SqfModulus& m, const Plan& plan) {
  if (m.q == 1) return "trivial";
  if (m.factors.size() == 1) return plan.sharp4 && m.q == 3 ? "prime-base-sharp4" : "prime-base";
  return plan.sharp4 ? "fiberwise-sharp4" : "fiberwise";
}

inline ResidueWitness run_selection(std::span<const WeightVector> fs, u64 target, const Rational& threshold,
                                    const Plan& plan) {
  const SqfModulus& m = fs[0].modulus();
  std::vector<u64> order = peel_order(m, plan);
  if (auto tuple = solve_fiberwise(fs, target, threshold, plan, order, plan.sharp4)) {
    ResidueWitness w = assemble(fs, target, *tuple, threshold, fiber_branch(m, plan));
    if (residue_witness_is_sound(fs, w)) return w;
  }
  // The fiberwise construction did not certify this instance; take the exact
  // optimum over Z_q instead and hold it to the same bound.
  if (auto tuple = maxplus_tuple(fs, positive_support(fs), target)) {
    ResidueWitness w = assemble(fs, target, *tuple, threshold, "direct-dp");
    if (residue_witness_is_sound(fs, w)) return w;
    fail(ErrorKind::NoWitness, "optimum " + w.value_sum.str() + " does not exceed " + threshold.str() +
                                   " for target " + std::to_string(target) + " mod " + std::to_string(m.q));
  }
  fail(ErrorKind::NoWitness, "no positive-weight tuple reaches " + std::to_string(target) + " mod " +
                                 std::to_string(m.q));
}

inline void check_parity(const SqfModulus& m, int k, std::int64_t n) {
  if (m.is_even() && (((n - k) % 2) + 2) % 2 != 0) {
    fail(ErrorKind::ParityMismatch, "q is even, so any sum of " + std::to_string(k) +
                                        " units is congruent to k mod 2; n = " + std::to_string(n));
  }
}

}  // namespace detail

/// Single weight function, k >= 4 copies, c > 1/2, mass > c*phi(q). The
/// witness sums to n mod q with positive weights and value sum > c*k.
inline ResidueWitness select_residues_single(const WeightVector& f, int k, const Rational& c, std::int64_t n) {
  if (k < 4) fail(ErrorKind::HypothesisUnmet, "need k >= 4");
  if (!(c > Rational(1, 2))) fail(ErrorKind::HypothesisUnmet, "need c > 1/2");
  const SqfModulus& m = f.modulus();
  if (!(f.mass() > c * Rational(static_cast<std::int64_t>(m.totient)))) {
    fail(ErrorKind::HypothesisUnmet, "mass " + f.mass().str() + " does not exceed c*phi(q)");
  }
  detail::check_parity(m, k, n);
  std::vector<WeightVector> fs(static_cast<std::size_t>(k), f);
  detail::Plan plan{detail::Mode::Single, k, c, false};
  return detail::run_selection(fs, detail::reduce_target(n, m.q), c * Rational(k), plan);
}

/// The bound a multi-function witness is held to: (16/3)c - 1 when k = 4 and
/// 3 | q (the four-sequence selector's bound), c*k otherwise.
inline Rational multi_threshold(u64 q, int k, const Rational& c) {
  if (k == 4 && q % 3 == 0) return Rational(16, 3) * c - Rational(1);
  return c * Rational(k);
}

/// k weight functions on a common modulus, none identically zero,
/// c > (k+1)/(2k), total mass > k*c*phi(q); n = k mod 2 when q is even.
inline ResidueWitness select_residues_multi(std::span<const WeightVector> fs, const Rational& c, std::int64_t n) {
  const int k = static_cast<int>(fs.size());
  if (k < 4) fail(ErrorKind::HypothesisUnmet, "need k >= 4 weight functions");
  const SqfModulus& m = fs[0].modulus();
  Rational total;
  for (const auto& f : fs) {
    if (f.modulus() != m) fail(ErrorKind::InvalidArgument, "weight functions must share a modulus");
    if (f.is_zero()) fail(ErrorKind::HypothesisUnmet, "a weight function is identically zero");
    total += f.mass();
  }
  if (!(c > Rational(k + 1, 2 * k))) fail(ErrorKind::HypothesisUnmet, "need c > (k+1)/(2k)");
  if (!(total > c * Rational(k) * Rational(static_cast<std::int64_t>(m.totient)))) {
    fail(ErrorKind::HypothesisUnmet, "total mass " + total.str() + " does not exceed k*c*phi(q)");
  }
  detail::check_parity(m, k, n);
  const bool sharp4 = k == 4 && m.q % 3 == 0;
  detail::Plan plan{detail::Mode::Multi, k, c, sharp4};
  ResidueWitness w = detail::run_selection(fs, detail::reduce_target(n, m.q), multi_threshold(m.q, k, c), plan);
  if (sharp4) {
    w.statement_bound = Rational(4) * (Rational(16, 3) * c - Rational(1));
    w.recap_bound = (Rational(2) * c - Rational(1)) * Rational(k);
  }
  return w;
}

/// Lemma-specific prime step exposed directly: fs live on a prime modulus.
/// Identical weights use the single-sequence selector, k = 4 on Z_3 the
/// four-sequence selector, everything else the multi-sequence selector.
inline ResidueWitness prime_base_case(std::span<const WeightVector> fs, const Rational& c, std::int64_t n) {
  if (fs.empty()) fail(ErrorKind::InvalidArgument, "no weight functions");
  const SqfModulus& m = fs[0].modulus();
  if (m.factors.size() != 1) fail(ErrorKind::InvalidArgument, "prime_base_case needs a prime modulus");
  const int k = static_cast<int>(fs.size());
  if (k < 4) fail(ErrorKind::HypothesisUnmet, "need k >= 4");
  const bool identical =
      std::all_of(fs.begin(), fs.end(), [&](const WeightVector& f) { return f == fs[0]; });
  Rational total;
  for (const auto& f : fs) {
    if (f.modulus() != m) fail(ErrorKind::InvalidArgument, "weight functions must share a modulus");
    total += f.mass();
  }
  const Rational phi(static_cast<std::int64_t>(m.totient));
  detail::check_parity(m, k, n);
  const u64 target = detail::reduce_target(n, m.q);
  detail::Plan plan{identical ? detail::Mode::Single : detail::Mode::Multi, k, c, false};
  Rational threshold = c * Rational(k);
  if (identical) {
    if (!(c > Rational(1, 2)) || !(fs[0].mass() > c * phi)) {
      fail(ErrorKind::HypothesisUnmet, "single-weight hypothesis fails");
    }
  } else {
    if (!(c > Rational(k + 1, 2 * k)) || !(total > c * Rational(k) * phi)) {
      fail(ErrorKind::HypothesisUnmet, "multi-weight hypothesis fails");
    }
    for (const auto& f : fs)
      if (f.is_zero()) fail(ErrorKind::HypothesisUnmet, "a weight function is identically zero");
    if (k == 4 && m.q == 3) {
      plan.sharp4 = true;
      threshold = multi_threshold(3, 4, c);
    }
  }
  auto tuple = detail::prime_step(fs, target, threshold, plan, plan.sharp4);
  if (!tuple) fail(ErrorKind::NoWitness, "prime step found no witness");
  return detail::assemble(fs, target, *tuple, threshold, plan.sharp4 ? "prime-base-sharp4" : "prime-base");
}

// ---------------------------------------------------------------------------
// Exhaustive oracle

namespace detail {

inline std::uint64_t tuple_space(std::span<const WeightVector> fs, std::uint64_t budget) {
  std::uint64_t total = 1;
  for (const auto& f : fs) {
    total *= f.modulus().totient;
    if (total > budget) fail(ErrorKind::TooLarge, "phi(q)^k exceeds the enumeration budget");
  }
  return total;
}

/// Walks every tuple of positive-weight units in lexicographic order and keeps
/// the first maximiser for each residue class of the sum.
template <class Value>
void enumerate_tuples(const std::vector<std::vector<u64>>& allowed, const std::vector<std::vector<Value>>& vals,
                      u64 q, std::vector<std::optional<Value>>& best, std::vector<std::vector<u64>>& arg) {
  const std::size_t k = allowed.size();
  for (const auto& a : allowed)
    if (a.empty()) return;
  std::vector<u64> prefix(k);
  std::vector<u64> sums(k + 1, 0);
  std::vector<Value> accs(k + 1, Value(0));
  auto rec = [&](auto&& self, std::size_t j) -> void {
    const auto& units_j = allowed[j];
    const auto& vals_j = vals[j];
    if (j + 1 == k) {
      const u64 base = sums[j];
      const Value acc = accs[j];
      for (std::size_t i = 0; i < units_j.size(); ++i) {
        u64 r = base + units_j[i];
        if (r >= q) r -= q;
        Value v = acc + vals_j[i];
        auto& slot = best[r];
        if (!slot || v > *slot) {
          slot = v;
          prefix[j] = units_j[i];
          arg[r] = prefix;
        }
      }
      return;
    }
    for (std::size_t i = 0; i < units_j.size(); ++i) {
      prefix[j] = units_j[i];
      u64 r = sums[j] + units_j[i];
      if (r >= q) r -= q;
      sums[j + 1] = r;
      accs[j + 1] = accs[j] + vals_j[i];
      self(self, j + 1);
    }
  };
  rec(rec, 0);
}

}  // namespace detail

/// For every target residue, the exhaustive optimum (or nullopt when no
/// positive-weight tuple reaches it). Threshold fields are left at zero.
inline std::vector<std::optional<ResidueWitness>> brute_force_residues_all(std::span<const WeightVector> fs,
                                                                           std::uint64_t budget = 10'000'000) {
  if (fs.empty()) fail(ErrorKind::InvalidArgument, "no weight functions");
  const u64 q = fs[0].q();
  for (const auto& f : fs)
    if (f.q() != q) fail(ErrorKind::InvalidArgument, "weight functions must share a modulus");
  detail::tuple_space(fs, budget);
  auto allowed = detail::positive_support(fs);
  std::vector<std::vector<u64>> arg(q);

  // Integer path when every weight shares a modest common denominator.
  std::int64_t lcm = 1;
  bool integral = true;
  for (const auto& f : fs) {
    for (const auto& v : f.values()) {
      lcm = std::lcm(lcm, v.den());
      if (lcm > (std::int64_t{1} << 40)) {
        integral = false;
        break;
      }
    }
    if (!integral) break;
  }
  std::vector<std::optional<Rational>> best_value(q);
  if (integral) {
    std::vector<std::vector<std::int64_t>> vals(fs.size());
    for (std::size_t j = 0; j < fs.size(); ++j)
      for (u64 u : allowed[j]) vals[j].push_back(fs[j].at(u).num() * (lcm / fs[j].at(u).den()));
    std::vector<std::optional<std::int64_t>> best(q);
    detail::enumerate_tuples(allowed, vals, q, best, arg);
    for (u64 r = 0; r < q; ++r)
      if (best[r]) best_value[r] = Rational(*best[r], lcm);
  } else {
    std::vector<std::vector<Rational>> vals(fs.size());
    for (std::size_t j = 0; j < fs.size(); ++j)
      for (u64 u : allowed[j]) vals[j].push_back(fs[j].at(u));
    detail::enumerate_tuples(allowed, vals, q, best_value, arg);
  }
  std::vector<std::optional<ResidueWitness>> out(q);
  for (u64 r = 0; r < q; ++r)
    if (best_value[r]) out[r] = detail::assemble(fs, r, arg[r], Rational(0), "exhaustive");
  return out;
}

inline std::optional<ResidueWitness> brute_force_residues(std::span<const WeightVector> fs, std::int64_t n,
                                                          std::uint64_t budget = 10'000'000) {
  if (fs.empty()) fail(ErrorKind::InvalidArgument, "no weight functions");
  auto all = brute_force_residues_all(fs, budget);
  return all[detail::reduce_target(n, fs[0].q())];
}

}  // namespace dvino
