#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace radial_lab {

using Rational = boost::rational<std::int64_t>;

/// Parses "p/q", a decimal such as "0.375" or "1e-3", or an integer,
/// exactly. Throws ArgumentError on malformed input.
Rational parse_rational(std::string_view text);

/// The rational whose decimal expansion is the shortest round-trip repr of
/// `value` (0.1 -> 1/10, 0.5 -> 1/2).
Rational rational_from_double(double value);

std::string to_string(const Rational& r);
double to_double(const Rational& r);

/// Exact dyadic rational num / 2^exp, kept normalized (num odd or exp == 0).
///
/// All geometric predicates in the library are evaluated on these values;
/// exponents are capped at kMaxExponent and any result that cannot be held
/// exactly throws DomainError instead of rounding.
class Dyadic {
 public:
  static constexpr int kMaxExponent = 62;

  constexpr Dyadic() = default;
  constexpr explicit Dyadic(std::int64_t integer) : num_(integer) {}

  /// num / 2^exp, normalized.
  static Dyadic from_ratio(std::int64_t num, int exp);
  /// Exact conversion; throws DomainError when the double needs more than
  /// kMaxExponent fractional bits or is not finite.
  static Dyadic from_double(double value);
  /// Exact conversion from a rational whose denominator is a power of two.
  static Dyadic from_rational(const Rational& r);
  static Dyadic parse(std::string_view text);

  std::int64_t numerator() const noexcept { return num_; }
  int exponent() const noexcept { return exp_; }

  double to_double() const noexcept;
  long double to_long_double() const noexcept;
  Rational to_rational() const;

  /// Numerator when expressed over 2^scale; requires scale >= exponent().
  __int128 scaled(int scale) const;
  /// floor(value * 2^n).
  std::int64_t floor_scaled(int n) const;

  Dyadic operator-() const;
  friend Dyadic operator+(const Dyadic& a, const Dyadic& b);
  friend Dyadic operator-(const Dyadic& a, const Dyadic& b);
  friend Dyadic operator*(const Dyadic& a, const Dyadic& b);
  /// Division by +-2^k only; anything else leaves the dyadics.
  friend Dyadic operator/(const Dyadic& a, const Dyadic& b);

  friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b);
  friend bool operator==(const Dyadic& a, const Dyadic& b) = default;

  std::string to_string() const;

 private:
  static Dyadic normalized(__int128 num, int exp);

  std::int64_t num_ = 0;
  int exp_ = 0;
};

}  // namespace radial_lab
