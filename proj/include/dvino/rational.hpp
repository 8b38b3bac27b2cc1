#pragma once

#include <charconv>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>

#include "dvino/error.hpp"

namespace dvino {

/// Exact rational over 64-bit integers, always in lowest terms with a
/// positive denominator. Every operation is computed in 128 bits and raises
/// ErrorKind::Overflow if the reduced result no longer fits.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t value) : num_(value) {}  // NOLINT(implicit)
  Rational(std::int64_t num, std::int64_t den) { assign(num, den); }

  [[nodiscard]] constexpr std::int64_t num() const noexcept { return num_; }
  [[nodiscard]] constexpr std::int64_t den() const noexcept { return den_; }

  [[nodiscard]] constexpr bool is_zero() const noexcept { return num_ == 0; }
  [[nodiscard]] constexpr bool is_positive() const noexcept { return num_ > 0; }
  [[nodiscard]] double to_double() const noexcept {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    if (a.den_ == b.den_) return make(I128(a.num_) + b.num_, a.den_);
    return make(I128(a.num_) * b.den_ + I128(b.num_) * a.den_,
                I128(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    if (a.den_ == b.den_) return make(I128(a.num_) - b.num_, a.den_);
    return make(I128(a.num_) * b.den_ - I128(b.num_) * a.den_,
                I128(a.den_) * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return make(I128(a.num_) * b.num_, I128(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) fail(ErrorKind::InvalidArgument, "rational division by zero");
    return make(I128(a.num_) * b.den_, I128(a.den_) * b.num_);
  }
  Rational operator-() const { return make(-I128(num_), den_); }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend constexpr bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    return I128(a.num_) * b.den_ <=> I128(b.num_) * a.den_;
  }

  /// Largest integer not exceeding the value.
  [[nodiscard]] std::int64_t floor() const noexcept {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
  }
  [[nodiscard]] std::int64_t ceil() const noexcept {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ > 0) ++q;
    return q;
  }

  [[nodiscard]] std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  /// Accepts "p", "p/q", or a finite decimal such as "-0.625" (read exactly).
  static Rational parse(std::string_view text) {
    auto bad = [&] {
      fail(ErrorKind::InvalidArgument,
           "cannot parse rational '" + std::string(text) + "'");
    };
    if (text.empty()) bad();
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
      return Rational(parse_int(text.substr(0, slash), bad),
                      parse_int(text.substr(slash + 1), bad));
    }
    auto dot = text.find('.');
    if (dot == std::string_view::npos) return Rational(parse_int(text, bad));
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    if (frac.size() > 17) bad();
    bool negative = !whole.empty() && whole.front() == '-';
    if (negative || (!whole.empty() && whole.front() == '+')) whole.remove_prefix(1);
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    std::int64_t int_part = whole.empty() ? 0 : parse_int(whole, bad);
    std::int64_t frac_part = frac.empty() ? 0 : parse_int(frac, bad);
    if (int_part < 0 || frac_part < 0) bad();
    Rational r = make(I128(int_part) * scale + frac_part, scale);
    return negative ? -r : r;
  }

  /// Largest multiple of 1/den that does not exceed x.
  static Rational floor_of(double x, std::int64_t den) {
    return Rational(static_cast<std::int64_t>(std::floor(x * static_cast<double>(den))), den);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.str();
  }

 private:
  using I128 = __int128;

  template <class OnError>
  static std::int64_t parse_int(std::string_view s, OnError&& on_error) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) on_error();
    return v;
  }

  static I128 gcd128(I128 a, I128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    constexpr I128 u64_max = std::numeric_limits<std::uint64_t>::max();
    if (a <= u64_max && b <= u64_max) {
      return std::gcd(static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b));
    }
    while (b != 0) {
      I128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  static Rational make(I128 num, I128 den) {
    if (den == 0) fail(ErrorKind::InvalidArgument, "zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    I128 g = gcd128(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    constexpr I128 lim = std::numeric_limits<std::int64_t>::max();
    if (num > lim || num < -lim || den > lim) {
      fail(ErrorKind::Overflow, "rational arithmetic exceeded 64-bit range");
    }
    Rational r;
    r.num_ = static_cast<std::int64_t>(num);
    r.den_ = static_cast<std::int64_t>(den);
    return r;
  }

  void assign(std::int64_t num, std::int64_t den) { *this = make(num, den); }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace dvino
