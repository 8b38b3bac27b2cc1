#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "dvino/convolution.hpp"
#include "dvino/error.hpp"
#include "dvino/prime_sets.hpp"

namespace dvino {

/// Ordered k-fold representation counts indexed by n in [0, k*bound]. Entries
/// stay in 64-bit words when they fit and move to big integers otherwise.
class CountTable {
 public:
  CountTable() = default;
  explicit CountTable(std::vector<std::int64_t> v) : small_(std::move(v)) {}
  explicit CountTable(std::vector<boost::multiprecision::cpp_int> v) : wide_(std::move(v)), is_wide_(true) {}

  [[nodiscard]] std::size_t size() const noexcept { return is_wide_ ? wide_.size() : small_.size(); }
  [[nodiscard]] bool is_wide() const noexcept { return is_wide_; }
  [[nodiscard]] boost::multiprecision::cpp_int at(std::size_t n) const {
    if (n >= size()) return 0;
    return is_wide_ ? wide_[n] : boost::multiprecision::cpp_int(small_[n]);
  }
  [[nodiscard]] bool is_zero(std::size_t n) const {
    if (n >= size()) return true;
    return is_wide_ ? wide_[n] == 0 : small_[n] == 0;
  }
  [[nodiscard]] const std::vector<std::int64_t>& small() const noexcept { return small_; }

 private:
  std::vector<std::int64_t> small_;
  std::vector<boost::multiprecision::cpp_int> wide_;
  bool is_wide_ = false;
};

namespace detail {

inline std::vector<std::int64_t> indicator(const PrimeSubset& s) {
  std::vector<std::int64_t> v(s.bits().size(), 0);
  for (u64 p : s.primes()) v[p] = 1;
  return v;
}

inline std::vector<boost::multiprecision::cpp_int> widen(const std::vector<std::int64_t>& v) {
  return {v.begin(), v.end()};
}

struct Poly {
  std::vector<std::int64_t> small;
  std::vector<boost::multiprecision::cpp_int> wide;
  bool is_wide = false;
};

inline Poly multiply(const Poly& a, const Poly& b) {
  if (!a.is_wide && !b.is_wide) {
    try {
      return Poly{convolve_exact(a.small, b.small), {}, false};
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Overflow) throw;
    }
  }
  const auto& wa = a.is_wide ? a.wide : widen(a.small);
  const auto& wb = b.is_wide ? b.wide : widen(b.small);
  return Poly{{}, convolve_big(wa, wb), true};
}

/// Drops trailing zeros so later products stay short.
inline void trim(Poly& p) {
  if (p.is_wide) {
    while (p.wide.size() > 1 && p.wide.back() == 0) p.wide.pop_back();
  } else {
    while (p.small.size() > 1 && p.small.back() == 0) p.small.pop_back();
  }
}

inline Poly power(Poly base, int e) {
  std::optional<Poly> acc;
  while (e > 0) {
    if (e & 1) acc = acc ? multiply(*acc, base) : base;
    e >>= 1;
    if (e) {
      base = multiply(base, base);
      trim(base);
    }
  }
  return *acc;
}

}  // namespace detail

/// All ordered counts #{(p_1..p_k) : p_i in P_i, sum = n} for n in [0, k*bound].
/// Identical subsets are grouped and raised to a power by repeated squaring.
inline CountTable kfold_counts(std::span<const PrimeSubset> subsets) {
  if (subsets.empty()) fail(ErrorKind::InvalidArgument, "no subsets given");
  const u64 bound = subsets[0].bound();
  for (const auto& s : subsets)
    if (s.bound() != bound) fail(ErrorKind::BoundMismatch, "subsets must share a bound");
  std::vector<std::pair<const PrimeSubset*, int>> groups;
  for (const auto& s : subsets) {
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const auto& g) { return g.first->bits() == s.bits(); });
    if (it == groups.end()) {
      groups.emplace_back(&s, 1);
    } else {
      ++it->second;
    }
  }
  std::optional<detail::Poly> acc;
  for (const auto& [set, mult] : groups) {
    detail::Poly base{detail::indicator(*set), {}, false};
    detail::trim(base);
    detail::Poly part = detail::power(std::move(base), mult);
    acc = acc ? detail::multiply(*acc, part) : part;
  }
  const std::size_t full = static_cast<std::size_t>(subsets.size() * bound + 1);
  if (acc->is_wide) {
    acc->wide.resize(full, 0);
    return CountTable(std::move(acc->wide));
  }
  acc->small.resize(full, 0);
  return CountTable(std::move(acc->small));
}

inline boost::multiprecision::cpp_int count_kfold(std::span<const PrimeSubset> subsets, u64 n) {
  if (subsets.empty()) fail(ErrorKind::InvalidArgument, "no subsets given");
  if (n > subsets.size() * subsets[0].bound()) {
    fail(ErrorKind::InvalidArgument, "n exceeds k * bound");
  }
  return kfold_counts(subsets).at(static_cast<std::size_t>(n));
}

struct ScanRow {
  u64 n = 0;
  boost::multiprecision::cpp_int count;
};

struct ScanSummary {
  int k = 0;
  std::vector<std::string> labels;
  u64 lo = 0, hi = 0;
  bool parity = true;             // only n = k mod 2 scanned
  std::size_t admissible = 0;
  std::size_t zero_count = 0;
  std::optional<u64> largest_zero;
  std::optional<u64> smallest_zero;
  boost::multiprecision::cpp_int min_count_after;     // over admissible n > largest_zero
  boost::multiprecision::cpp_int median_count_after;
  std::array<std::size_t, 3> zeros_by_class_mod3{};
  std::array<std::size_t, 3> admissible_by_class_mod3{};
};

struct ScanResult {
  std::vector<ScanRow> rows;
  ScanSummary summary;
};

/// Counts for every admissible n in [lo, hi]; with parity set only n = k mod 2.
inline ScanResult scan_theorem(std::span<const PrimeSubset> subsets, u64 lo, u64 hi, bool parity = true,
                               bool keep_rows = true) {
  if (subsets.empty()) fail(ErrorKind::InvalidArgument, "no subsets given");
  const int k = static_cast<int>(subsets.size());
  if (hi > static_cast<u64>(k) * subsets[0].bound()) fail(ErrorKind::InvalidArgument, "range exceeds k * bound");
  if (lo > hi) fail(ErrorKind::InvalidArgument, "empty range");
  CountTable table = kfold_counts(subsets);
  ScanResult r;
  ScanSummary& s = r.summary;
  s.k = k;
  for (const auto& p : subsets) s.labels.push_back(p.label());
  s.lo = lo;
  s.hi = hi;
  s.parity = parity;
  for (u64 n = lo; n <= hi; ++n) {
    if (parity && (n + static_cast<u64>(k)) % 2 != 0) continue;
    ++s.admissible;
    ++s.admissible_by_class_mod3[n % 3];
    const bool zero = table.is_zero(static_cast<std::size_t>(n));
    if (zero) {
      ++s.zero_count;
      ++s.zeros_by_class_mod3[n % 3];
      s.largest_zero = n;
      if (!s.smallest_zero) s.smallest_zero = n;
    }
    if (keep_rows) r.rows.push_back({n, table.at(static_cast<std::size_t>(n))});
  }
  std::vector<boost::multiprecision::cpp_int> after;
  for (u64 n = s.largest_zero ? *s.largest_zero + 1 : lo; n <= hi; ++n) {
    if (parity && (n + static_cast<u64>(k)) % 2 != 0) continue;
    after.push_back(table.at(static_cast<std::size_t>(n)));
  }
  if (!after.empty()) {
    auto mid = after.begin() + static_cast<std::ptrdiff_t>(after.size() / 2);
    std::nth_element(after.begin(), mid, after.end());
    s.median_count_after = *mid;
    s.min_count_after = *std::min_element(after.begin(), after.end());
  }
  return r;
}

struct SharpnessCheck {
  SharpnessFamily family;
  ScanSummary summary;
  /// Every n in [0, hi] in an obstruction class has count 0 (every n at all
  /// when some subset is empty).
  bool pattern_holds = false;
};

inline SharpnessCheck sharpness_check(const PrimeTable& table, SharpnessKind kind, int k, u64 hi, u64 shift = 1) {
  SharpnessCheck out{sharpness_family(table, kind, k, shift), {}, false};
  out.summary = scan_theorem(out.family.subsets, 0, hi, false, false).summary;
  const auto& s = out.summary;
  if (out.family.all_blocked) {
    out.pattern_holds = s.zero_count == s.admissible;
  } else {
    out.pattern_holds = !out.family.obstruction_classes.empty();
    for (u64 r : out.family.obstruction_classes)
      out.pattern_holds = out.pattern_holds && s.zeros_by_class_mod3[r] == s.admissible_by_class_mod3[r];
  }
  return out;
}

}  // namespace dvino
