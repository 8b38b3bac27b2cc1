#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dvino/error.hpp"

namespace dvino {

using u64 = std::uint64_t;

/// Fixed-length bit-vector over indices [0, size).
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

  [[nodiscard]] std::size_t size() const noexcept { return size_; }
  [[nodiscard]] bool test(std::size_t i) const noexcept {
    return i < size_ && ((words_[i >> 6] >> (i & 63)) & 1U);
  }
  void set(std::size_t i, bool value = true) noexcept {
    if (value) {
      words_[i >> 6] |= (u64{1} << (i & 63));
    } else {
      words_[i >> 6] &= ~(u64{1} << (i & 63));
    }
  }

  [[nodiscard]] std::size_t count() const noexcept {
    std::size_t c = 0;
    for (u64 w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  /// Number of set bits at indices <= i.
  [[nodiscard]] std::size_t count_upto(std::size_t i) const noexcept {
    if (size_ == 0) return 0;
    i = std::min(i, size_ - 1);
    std::size_t c = 0;
    std::size_t full = (i + 1) >> 6;
    for (std::size_t w = 0; w < full; ++w) c += static_cast<std::size_t>(std::popcount(words_[w]));
    std::size_t rem = (i + 1) & 63;
    if (rem != 0) c += static_cast<std::size_t>(std::popcount(words_[full] & ((u64{1} << rem) - 1)));
    return c;
  }

  [[nodiscard]] std::vector<u64> ones() const {
    std::vector<u64> out;
    out.reserve(count());
    for (std::size_t w = 0; w < words_.size(); ++w) {
      u64 bits = words_[w];
      while (bits != 0) {
        out.push_back(w * 64 + static_cast<u64>(std::countr_zero(bits)));
        bits &= bits - 1;
      }
    }
    return out;
  }

  [[nodiscard]] std::span<const u64> words() const noexcept { return words_; }
  [[nodiscard]] std::span<u64> words() noexcept { return words_; }

  /// True when every set bit of *this is also set in other.
  [[nodiscard]] bool subset_of(const BitVector& other) const noexcept {
    if (other.size_ < size_) {
      for (std::size_t i = other.size_; i < size_; ++i)
        if (test(i)) return false;
    }
    std::size_t n = std::min(words_.size(), other.words_.size());
    for (std::size_t w = 0; w < n; ++w)
      if ((words_[w] & ~other.words_[w]) != 0) return false;
    return true;
  }

  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<u64> words_;
};

/// Raw on-disk form: an 8-byte little-endian bound N, followed by
/// ceil((N+1)/8) bytes where bit m of the vector is bit (m % 8) of byte m / 8.
inline void write_bit_file(std::ostream& os, const BitVector& bits) {
  u64 bound = bits.size() == 0 ? 0 : bits.size() - 1;
  unsigned char header[8];
  for (int i = 0; i < 8; ++i) header[i] = static_cast<unsigned char>((bound >> (8 * i)) & 0xFF);
  os.write(reinterpret_cast<const char*>(header), 8);
  std::size_t nbytes = (bits.size() + 7) / 8;
  auto words = bits.words();
  std::vector<char> bytes(nbytes);
  for (std::size_t b = 0; b < nbytes; ++b) {
    bytes[b] = static_cast<char>((words[b / 8] >> (8 * (b % 8))) & 0xFF);
  }
  os.write(bytes.data(), static_cast<std::streamsize>(nbytes));
  if (!os) fail(ErrorKind::Io, "failed writing bit-vector file");
}

inline BitVector read_bit_file(std::istream& is) {
  unsigned char header[8];
  if (!is.read(reinterpret_cast<char*>(header), 8)) fail(ErrorKind::Io, "truncated bit-vector header");
  u64 bound = 0;
  for (int i = 0; i < 8; ++i) bound |= u64{header[i]} << (8 * i);
  if (bound > (u64{1} << 40)) fail(ErrorKind::Io, "implausible bound in bit-vector header");
  BitVector bits(static_cast<std::size_t>(bound) + 1);
  std::size_t nbytes = (bits.size() + 7) / 8;
  std::vector<char> bytes(nbytes);
  if (!is.read(bytes.data(), static_cast<std::streamsize>(nbytes))) {
    fail(ErrorKind::Io, "truncated bit-vector payload");
  }
  auto words = bits.words();
  for (std::size_t b = 0; b < nbytes; ++b) {
    words[b / 8] |= u64{static_cast<unsigned char>(bytes[b])} << (8 * (b % 8));
  }
  // Bits past the bound are not part of the vector.
  std::size_t tail = bits.size() & 63;
  if (tail != 0) words.back() &= (u64{1} << tail) - 1;
  return bits;
}

// ---------------------------------------------------------------------------
// Squarefree moduli and their unit groups

struct SqfModulus {
  u64 q = 1;
  std::vector<u64> factors;  // strictly increasing primes, product q
  u64 totient = 1;

  [[nodiscard]] bool has_factor(u64 p) const {
    return std::binary_search(factors.begin(), factors.end(), p);
  }
  [[nodiscard]] bool is_even() const { return q % 2 == 0; }
  friend bool operator==(const SqfModulus&, const SqfModulus&) = default;
};

inline bool is_prime_trial(u64 n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (u64 d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

inline SqfModulus factor_squarefree(u64 q) {
  if (q == 0) fail(ErrorKind::InvalidArgument, "modulus must be positive");
  SqfModulus m;
  m.q = q;
  u64 rest = q;
  for (u64 p = 2; p * p <= rest; ++p) {
    if (rest % p != 0) continue;
    rest /= p;
    if (rest % p == 0) {
      fail(ErrorKind::NotSquarefree, std::to_string(p * p) + " divides " + std::to_string(q));
    }
    m.factors.push_back(p);
  }
  if (rest > 1) m.factors.push_back(rest);
  for (u64 p : m.factors) m.totient *= p - 1;
  return m;
}

inline bool is_squarefree(u64 q) {
  try {
    factor_squarefree(q);
    return true;
  } catch (const Error&) {
    return false;
  }
}

/// Units of Z_q in increasing order; for q = 1 the single residue 0.
inline std::vector<u64> units(const SqfModulus& m) {
  if (m.q == 1) return {0};
  std::vector<u64> out;
  out.reserve(m.totient);
  for (u64 x = 1; x < m.q; ++x)
    if (std::gcd(x, m.q) == 1) out.push_back(x);
  return out;
}

inline u64 mod_inverse(u64 a, u64 m) {
  // extended Euclid on signed 128-bit to stay clear of overflow
  __int128 old_r = static_cast<__int128>(a % m), r = static_cast<__int128>(m);
  __int128 old_s = 1, s = 0;
  while (r != 0) {
    __int128 quot = old_r / r;
    std::swap(old_r, r);
    r -= quot * old_r;
    std::swap(old_s, s);
    s -= quot * old_s;
  }
  if (old_r != 1) fail(ErrorKind::NotCoprime, "no inverse modulo " + std::to_string(m));
  __int128 inv = old_s % static_cast<__int128>(m);
  if (inv < 0) inv += m;
  return static_cast<u64>(inv);
}

/// Splits x (mod q) into (x mod q/p, x mod p) for a prime factor p of q.
inline std::pair<u64, u64> crt_split(u64 x, const SqfModulus& m, u64 p) {
  if (p < 2 || !m.has_factor(p)) {
    fail(ErrorKind::BadFactor, std::to_string(p) + " is not a prime factor of " + std::to_string(m.q));
  }
  x %= m.q;
  return {x % (m.q / p), x % p};
}

/// The unique residue modulo q1*p congruent to a mod q1 and b mod p.
inline u64 crt_merge(u64 a, u64 b, u64 q1, u64 p) {
  if (q1 == 0 || p == 0) fail(ErrorKind::InvalidArgument, "zero modulus");
  if (std::gcd(q1, p) != 1) {
    fail(ErrorKind::NotCoprime, std::to_string(q1) + " and " + std::to_string(p) + " share a factor");
  }
  a %= q1;
  b %= p;
  if (q1 == 1) return b;
  if (p == 1) return a;
  // x = a + q1 * t with t = (b - a) * q1^{-1} mod p
  u64 inv = mod_inverse(q1 % p, p);
  u64 diff = (b + p - a % p) % p;
  u64 t = static_cast<u64>(static_cast<unsigned __int128>(diff) * inv % p);
  return a + q1 * t;
}

// ---------------------------------------------------------------------------
// Prime table

class PrimeTable {
 public:
  PrimeTable() = default;
  explicit PrimeTable(BitVector membership) : bits_(std::move(membership)) {
    pi_ = bits_.count();
  }

  [[nodiscard]] u64 bound() const noexcept { return bits_.size() == 0 ? 0 : bits_.size() - 1; }
  [[nodiscard]] bool is_prime(u64 m) const noexcept { return bits_.test(static_cast<std::size_t>(m)); }
  [[nodiscard]] std::size_t prime_count() const noexcept { return pi_; }
  [[nodiscard]] std::size_t prime_count_upto(u64 x) const noexcept {
    return bits_.count_upto(static_cast<std::size_t>(x));
  }
  [[nodiscard]] std::vector<u64> primes() const { return bits_.ones(); }
  [[nodiscard]] const BitVector& bits() const noexcept { return bits_; }

 private:
  BitVector bits_;
  std::size_t pi_ = 0;
};

struct SieveOptions {
  std::size_t segment_size = std::size_t{1} << 18;
  u64 max_bound = 100'000'000;
};

/// Segmented sieve of Eratosthenes over [0, bound].
inline PrimeTable sieve(u64 bound, const SieveOptions& opt = {}) {
  if (bound < 2) fail(ErrorKind::InvalidArgument, "sieve bound must be at least 2");
  if (bound > opt.max_bound) {
    fail(ErrorKind::BoundTooLarge, "sieve bound " + std::to_string(bound) +
                                        " exceeds configured budget " + std::to_string(opt.max_bound));
  }
  u64 root = static_cast<u64>(std::sqrt(static_cast<double>(bound)));
  while (root * root > bound) --root;
  while ((root + 1) * (root + 1) <= bound) ++root;

  std::vector<char> small(root + 1, 1);
  std::vector<u64> base;
  for (u64 i = 2; i <= root; ++i) {
    if (!small[i]) continue;
    base.push_back(i);
    for (u64 j = i * i; j <= root; j += i) small[j] = 0;
  }

  BitVector bits(static_cast<std::size_t>(bound) + 1);
  const u64 seg = std::max<u64>(opt.segment_size, 64);
  std::vector<char> mark(seg);
  for (u64 lo = 0; lo <= bound; lo += seg) {
    u64 hi = std::min(bound + 1, lo + seg);
    std::fill(mark.begin(), mark.begin() + static_cast<std::ptrdiff_t>(hi - lo), 1);
    for (u64 p : base) {
      u64 start = std::max(p * p, (lo + p - 1) / p * p);
      for (u64 j = start; j < hi; j += p) mark[j - lo] = 0;
    }
    for (u64 m = std::max<u64>(lo, 2); m < hi; ++m)
      if (mark[m - lo]) bits.set(static_cast<std::size_t>(m));
  }
  return PrimeTable(std::move(bits));
}

inline void write_prime_table(const std::string& path, const PrimeTable& table) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorKind::Io, "cannot open " + path + " for writing");
  write_bit_file(os, table.bits());
}

inline PrimeTable read_prime_table(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorKind::Io, "cannot open " + path);
  return PrimeTable(read_bit_file(is));
}

}  // namespace dvino
