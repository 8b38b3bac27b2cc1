#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dvino/error.hpp"
#include "dvino/number_core.hpp"
#include "dvino/rational.hpp"

namespace dvino {

/// A set of primes in [2, bound], stored as a bit-vector over [0, bound].
class PrimeSubset {
 public:
  PrimeSubset() = default;

  /// Builds from an explicit membership vector; every member must be prime.
  PrimeSubset(const PrimeTable& table, BitVector membership, std::string label)
      : bits_(std::move(membership)), label_(std::move(label)) {
    if (bits_.size() != table.bits().size()) {
      fail(ErrorKind::BoundMismatch, "subset bound differs from prime table bound");
    }
    if (!bits_.subset_of(table.bits())) {
      fail(ErrorKind::InvalidArgument, "subset '" + label_ + "' contains a non-prime");
    }
    prime_count_ = table.prime_count();
  }

  [[nodiscard]] u64 bound() const noexcept { return bits_.size() == 0 ? 0 : bits_.size() - 1; }
  [[nodiscard]] const BitVector& bits() const noexcept { return bits_; }
  [[nodiscard]] const std::string& label() const noexcept { return label_; }
  [[nodiscard]] bool contains(u64 p) const noexcept { return bits_.test(static_cast<std::size_t>(p)); }
  [[nodiscard]] std::size_t size() const noexcept { return bits_.count(); }
  [[nodiscard]] std::vector<u64> primes() const { return bits_.ones(); }
  /// pi(bound) of the table this subset was drawn from.
  [[nodiscard]] std::size_t table_prime_count() const noexcept { return prime_count_; }

  void set_label(std::string label) { label_ = std::move(label); }

 private:
  BitVector bits_;
  std::string label_;
  std::size_t prime_count_ = 0;
};

template <class Pred>
PrimeSubset filter_primes(const PrimeTable& table, Pred&& keep, std::string label) {
  BitVector bits(table.bits().size());
  for (u64 p : table.primes())
    if (keep(p)) bits.set(static_cast<std::size_t>(p));
  return PrimeSubset(table, std::move(bits), std::move(label));
}

inline PrimeSubset all_primes(const PrimeTable& table) {
  return PrimeSubset(table, table.bits(), "all");
}

inline PrimeSubset empty_subset(const PrimeTable& table) {
  return PrimeSubset(table, BitVector(table.bits().size()), "empty");
}

/// {p <= N prime : p mod m in residues}.
inline PrimeSubset congruence_subset(const PrimeTable& table, u64 m, const std::vector<u64>& residues) {
  if (m == 0) fail(ErrorKind::InvalidArgument, "modulus must be positive");
  if (residues.empty()) fail(ErrorKind::EmptyResidues, "no residues given");
  std::vector<char> keep(m, 0);
  std::string label = "mod" + std::to_string(m) + ":";
  for (std::size_t i = 0; i < residues.size(); ++i) {
    if (residues[i] >= m) {
      fail(ErrorKind::InvalidArgument, "residue " + std::to_string(residues[i]) + " not in [0, m)");
    }
    keep[residues[i]] = 1;
    label += (i ? "," : "") + std::to_string(residues[i]);
  }
  return filter_primes(table, [&](u64 p) { return keep[p % m] != 0; }, label);
}

namespace detail {
// splitmix64 finalizer; hashing (seed, p) gives a counter-based stream that
// does not depend on iteration order.
constexpr u64 mix64(u64 z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Each prime kept independently with probability alpha, keyed on (seed, p).
inline PrimeSubset random_density_subset(const PrimeTable& table, double alpha, u64 seed) {
  if (!(alpha > 0.0 && alpha <= 1.0)) fail(ErrorKind::InvalidArgument, "alpha must lie in (0, 1]");
  const u64 key = detail::mix64(seed ^ 0x5DEECE66DULL);
  auto keep = [&](u64 p) {
    double u = static_cast<double>(detail::mix64(key ^ detail::mix64(p)) >> 11) * 0x1.0p-53;
    return u < alpha;
  };
  return filter_primes(table, keep, "random:" + std::to_string(alpha) + ":" + std::to_string(seed));
}

/// Finite-N stand-in for the lower density: |P| / pi(N).
inline Rational lower_density_estimate(const PrimeSubset& subset) {
  if (subset.bound() < 2) fail(ErrorKind::InvalidArgument, "bound must be at least 2");
  if (subset.table_prime_count() == 0) return Rational(0);
  return Rational(static_cast<std::int64_t>(subset.size()),
                  static_cast<std::int64_t>(subset.table_prime_count()));
}

/// Members not exceeding `limit`, keeping the original bound.
inline PrimeSubset truncate(const PrimeTable& table, const PrimeSubset& subset, u64 limit) {
  BitVector bits(subset.bits().size());
  for (u64 p : subset.primes()) {
    if (p > limit) break;
    bits.set(static_cast<std::size_t>(p));
  }
  return PrimeSubset(table, std::move(bits), subset.label());
}

// ---------------------------------------------------------------------------
// Sharpness families

enum class SharpnessKind { ShiftedMod3, EmptyLast };

struct SharpnessFamily {
  SharpnessKind kind;
  int k = 0;
  u64 shift = 1;
  std::vector<PrimeSubset> subsets;
  /// Residues mod 3 that no k-fold sum p_1 + ... + p_k (p_i in P_i) can hit,
  /// computed from the residues actually present in each subset.
  std::vector<u64> obstruction_classes;
  /// True when no integer at all is representable (some P_i empty).
  bool all_blocked = false;
};

/// Residues mod 3 reachable as sums of one member from each subset.
inline std::vector<u64> reachable_mod3(const std::vector<PrimeSubset>& subsets) {
  std::vector<char> reach = {1, 0, 0};
  for (const auto& s : subsets) {
    std::vector<char> present(3, 0);
    for (u64 p : s.primes()) present[p % 3] = 1;
    std::vector<char> next(3, 0);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        if (reach[a] && present[b]) next[(a + b) % 3] = 1;
    reach = next;
  }
  std::vector<u64> out;
  for (u64 r = 0; r < 3; ++r)
    if (reach[r]) out.push_back(r);
  return out;
}

/// ShiftedMod3: P_j = {p = shift mod 3} for j < k, P_k = all primes except 3.
/// EmptyLast: P_j = {p = 1 mod 3} for j <= k-2, P_{k-1} = all primes, P_k empty.
inline SharpnessFamily sharpness_family(const PrimeTable& table, SharpnessKind kind, int k, u64 shift = 1) {
  if (k < 4) fail(ErrorKind::BadK, "sharpness families need k >= 4");
  if (shift != 1 && shift != 2) fail(ErrorKind::InvalidArgument, "residue shift must be 1 or 2");
  SharpnessFamily fam{kind, k, shift, {}, {}, false};
  if (kind == SharpnessKind::ShiftedMod3) {
    PrimeSubset half = congruence_subset(table, 3, {shift});
    for (int j = 0; j < k - 1; ++j) fam.subsets.push_back(half);
    fam.subsets.push_back(filter_primes(table, [](u64 p) { return p != 3; }, "all-except-3"));
  } else {
    PrimeSubset half = congruence_subset(table, 3, {1});
    for (int j = 0; j < k - 2; ++j) fam.subsets.push_back(half);
    fam.subsets.push_back(all_primes(table));
    fam.subsets.push_back(empty_subset(table));
  }
  fam.all_blocked = std::any_of(fam.subsets.begin(), fam.subsets.end(),
                                [](const PrimeSubset& s) { return s.size() == 0; });
  std::vector<u64> reach = reachable_mod3(fam.subsets);
  for (u64 r = 0; r < 3; ++r)
    if (!std::binary_search(reach.begin(), reach.end(), r)) fam.obstruction_classes.push_back(r);
  return fam;
}

}  // namespace dvino
