#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "dvino/error.hpp"

namespace dvino {

namespace ntt {

struct Field {
  std::uint32_t mod;
  std::uint32_t root;      // primitive root
  int max_log;             // 2^max_log divides mod - 1
};

inline constexpr std::array<Field, 3> kFields = {{
    {998244353u, 3u, 23},
    {167772161u, 3u, 25},
    {469762049u, 3u, 26},
}};

inline constexpr int kMaxLog = 23;  // common transform limit

inline std::uint32_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint32_t m) {
  std::uint64_t r = 1;
  b %= m;
  while (e) {
    if (e & 1) r = r * b % m;
    b = b * b % m;
    e >>= 1;
  }
  return static_cast<std::uint32_t>(r);
}

/// In-place iterative radix-2 transform of length a.size() (a power of two).
inline void transform(std::vector<std::uint32_t>& a, const Field& f, bool invert) {
  const std::size_t n = a.size();
  const std::uint32_t m = f.mod;
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  std::vector<std::uint32_t> tw;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    std::uint32_t w = pow_mod(f.root, (m - 1) / len, m);
    if (invert) w = pow_mod(w, m - 2, m);
    const std::size_t half = len / 2;
    tw.resize(half);
    tw[0] = 1;
    for (std::size_t i = 1; i < half; ++i) tw[i] = static_cast<std::uint32_t>(std::uint64_t{tw[i - 1]} * w % m);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t j = 0; j < half; ++j) {
        std::uint32_t u = a[i + j];
        std::uint32_t v = static_cast<std::uint32_t>(std::uint64_t{a[i + j + half]} * tw[j] % m);
        std::uint32_t s = u + v;
        a[i + j] = s >= m ? s - m : s;
        a[i + j + half] = u >= v ? u - v : u + m - v;
      }
    }
  }
  if (invert) {
    const std::uint64_t inv_n = pow_mod(n, m - 2, m);
    for (auto& x : a) x = static_cast<std::uint32_t>(x * inv_n % m);
  }
}

inline std::vector<std::uint32_t> cyclic_mod(std::span<const std::int64_t> u, std::span<const std::int64_t> v,
                                             std::size_t size, const Field& f) {
  auto load = [&](std::span<const std::int64_t> src) {
    std::vector<std::uint32_t> out(size, 0);
    const auto m = static_cast<std::int64_t>(f.mod);
    for (std::size_t i = 0; i < src.size(); ++i) {
      std::int64_t r = src[i] % m;
      out[i] = static_cast<std::uint32_t>(r < 0 ? r + m : r);
    }
    return out;
  };
  auto a = load(u);
  auto b = load(v);
  transform(a, f, false);
  transform(b, f, false);
  for (std::size_t i = 0; i < size; ++i) a[i] = static_cast<std::uint32_t>(std::uint64_t{a[i]} * b[i] % f.mod);
  transform(a, f, true);
  return a;
}

}  // namespace ntt

/// Largest possible |(u * v)[i]|, as a 128-bit value.
inline unsigned __int128 convolution_bound(std::span<const std::int64_t> u, std::span<const std::int64_t> v) {
  auto max_abs = [](std::span<const std::int64_t> s) {
    unsigned __int128 m = 0;
    for (auto x : s) m = std::max<unsigned __int128>(m, x < 0 ? -static_cast<__int128>(x) : x);
    return m;
  };
  return max_abs(u) * max_abs(v) * std::min(u.size(), v.size());
}

/// Schoolbook acyclic convolution with overflow detection.
inline std::vector<std::int64_t> convolve_quadratic(std::span<const std::int64_t> u,
                                                    std::span<const std::int64_t> v) {
  if (u.empty() || v.empty()) return {};
  if (convolution_bound(u, v) > static_cast<unsigned __int128>(std::numeric_limits<std::int64_t>::max())) {
    fail(ErrorKind::Overflow, "convolution result may exceed 64 bits");
  }
  std::vector<std::int64_t> out(u.size() + v.size() - 1, 0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] == 0) continue;
    for (std::size_t j = 0; j < v.size(); ++j) out[i + j] += u[i] * v[j];
  }
  return out;
}

/// Acyclic convolution through three NTT primes and Garner recombination.
/// Exact whenever every output fits in a signed 64-bit word, which is checked
/// up front.
inline std::vector<std::int64_t> convolve_ntt(std::span<const std::int64_t> u, std::span<const std::int64_t> v) {
  if (u.empty() || v.empty()) return {};
  if (convolution_bound(u, v) > static_cast<unsigned __int128>(std::numeric_limits<std::int64_t>::max())) {
    fail(ErrorKind::Overflow, "convolution result may exceed 64 bits");
  }
  const std::size_t out_len = u.size() + v.size() - 1;
  std::size_t size = 1;
  int log = 0;
  while (size < out_len) {
    size <<= 1;
    ++log;
  }
  if (log > ntt::kMaxLog) fail(ErrorKind::TooLarge, "convolution length exceeds 2^23");

  std::array<std::vector<std::uint32_t>, 3> r;
  for (std::size_t t = 0; t < 3; ++t) r[t] = ntt::cyclic_mod(u, v, size, ntt::kFields[t]);

  const std::uint64_t m0 = ntt::kFields[0].mod, m1 = ntt::kFields[1].mod, m2 = ntt::kFields[2].mod;
  const std::uint64_t inv_m0_mod_m1 = ntt::pow_mod(m0 % m1, m1 - 2, static_cast<std::uint32_t>(m1));
  const std::uint64_t m0m1_mod_m2 = (m0 % m2) * (m1 % m2) % m2;
  const std::uint64_t inv_m0m1_mod_m2 = ntt::pow_mod(m0m1_mod_m2, m2 - 2, static_cast<std::uint32_t>(m2));
  const unsigned __int128 big_m = static_cast<unsigned __int128>(m0) * m1 * m2;

  std::vector<std::int64_t> out(out_len);
  for (std::size_t i = 0; i < out_len; ++i) {
    const std::uint64_t a0 = r[0][i], a1 = r[1][i], a2 = r[2][i];
    const std::uint64_t x1 = (a1 + m1 - a0 % m1) % m1 * inv_m0_mod_m1 % m1;
    const std::uint64_t partial_mod_m2 = (a0 % m2 + (m0 % m2) * x1) % m2;
    const std::uint64_t x2 = (a2 + m2 - partial_mod_m2) % m2 * inv_m0m1_mod_m2 % m2;
    unsigned __int128 value = a0 + static_cast<unsigned __int128>(m0) * x1 +
                              static_cast<unsigned __int128>(m0) * m1 * x2;
    // values above M/2 stand for negatives
    if (value > big_m / 2) {
      out[i] = -static_cast<std::int64_t>(big_m - value);
    } else {
      out[i] = static_cast<std::int64_t>(value);
    }
  }
  return out;
}

/// Exact acyclic convolution: quadratic for short inputs, NTT otherwise.
inline std::vector<std::int64_t> convolve_exact(std::span<const std::int64_t> u, std::span<const std::int64_t> v) {
  if (std::min(u.size(), v.size()) <= 48) return convolve_quadratic(u, v);
  return convolve_ntt(u, v);
}

/// Nonnegative big-integer convolution: both operands are cut into 16-bit
/// limbs so that each limb product runs through convolve_exact without
/// overflow, then the partial products are shifted back together.
inline std::vector<boost::multiprecision::cpp_int> convolve_big(
    const std::vector<boost::multiprecision::cpp_int>& u, const std::vector<boost::multiprecision::cpp_int>& v) {
  using boost::multiprecision::cpp_int;
  if (u.empty() || v.empty()) return {};
  auto limbs = [](const std::vector<cpp_int>& src) {
    std::vector<std::vector<std::int64_t>> out;
    for (std::size_t i = 0; i < src.size(); ++i) {
      if (src[i] < 0) fail(ErrorKind::InvalidArgument, "convolve_big needs nonnegative entries");
      cpp_int x = src[i];
      for (std::size_t t = 0; x != 0; ++t) {
        if (out.size() <= t) out.emplace_back(src.size(), 0);
        out[t][i] = static_cast<std::int64_t>(x & 0xFFFF);
        x >>= 16;
      }
    }
    return out;
  };
  auto lu = limbs(u);
  auto lv = limbs(v);
  std::vector<cpp_int> out(u.size() + v.size() - 1);
  for (std::size_t s = 0; s < lu.size(); ++s) {
    for (std::size_t t = 0; t < lv.size(); ++t) {
      auto part = convolve_exact(lu[s], lv[t]);
      const unsigned shift = static_cast<unsigned>(16 * (s + t));
      for (std::size_t i = 0; i < part.size(); ++i)
        if (part[i] != 0) out[i] += cpp_int(part[i]) << shift;
    }
  }
  return out;
}

}  // namespace dvino
