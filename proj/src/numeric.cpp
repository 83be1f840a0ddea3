#include "radial_lab/numeric.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

#include "radial_lab/errors.hpp"

namespace radial_lab {
namespace {

constexpr __int128 kInt64Max = std::numeric_limits<std::int64_t>::max();
constexpr __int128 kInt64Min = std::numeric_limits<std::int64_t>::min();

bool fits_int64(__int128 v) { return v >= kInt64Min && v <= kInt64Max; }

std::int64_t checked_int64(__int128 v, std::string_view what) {
  if (!fits_int64(v)) {
    throw ArgumentError("integer overflow while parsing " + std::string(what));
  }
  return static_cast<std::int64_t>(v);
}

bool is_power_of_two(std::int64_t v) {
  return v > 0 && std::has_single_bit(static_cast<std::uint64_t>(v));
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string original(text);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw ArgumentError("empty rational literal");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    const Rational num = parse_rational(text.substr(0, slash));
    const Rational den = parse_rational(text.substr(slash + 1));
    if (den.numerator() == 0) throw ArgumentError("zero denominator in '" + original + "'");
    return num / den;
  }

  bool negative = false;
  if (text.front() == '+' || text.front() == '-') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }

  __int128 mantissa = 0;
  int frac_digits = 0;
  bool seen_point = false;
  bool seen_digit = false;
  std::size_t pos = 0;
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (c == '.') {
      if (seen_point) throw ArgumentError("malformed number '" + original + "'");
      seen_point = true;
    } else if (c >= '0' && c <= '9') {
      seen_digit = true;
      mantissa = mantissa * 10 + (c - '0');
      if (!fits_int64(mantissa)) throw ArgumentError("too many digits in '" + original + "'");
      if (seen_point) ++frac_digits;
    } else {
      break;
    }
  }
  if (!seen_digit) throw ArgumentError("malformed number '" + original + "'");

  int exponent = -frac_digits;
  if (pos < text.size()) {
    if (text[pos] != 'e' && text[pos] != 'E') {
      throw ArgumentError("malformed number '" + original + "'");
    }
    int e = 0;
    const auto rest = text.substr(pos + 1);
    const char* first = rest.data();
    if (!rest.empty() && rest.front() == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, rest.data() + rest.size(), e);
    if (ec != std::errc{} || ptr != rest.data() + rest.size()) {
      throw ArgumentError("malformed exponent in '" + original + "'");
    }
    exponent += e;
  }

  __int128 num = mantissa;
  __int128 den = 1;
  for (; exponent > 0; --exponent) {
    num *= 10;
    checked_int64(num, original);
  }
  for (; exponent < 0; ++exponent) {
    den *= 10;
    checked_int64(den, original);
  }
  Rational r(checked_int64(num, original), checked_int64(den, original));
  return negative ? -r : r;
}

Rational rational_from_double(double value) {
  if (!std::isfinite(value)) throw ArgumentError("non-finite value");
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw ArgumentError("cannot format double");
  return parse_rational(std::string_view(buf, static_cast<std::size_t>(ptr - buf)));
}

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

// ---------------------------------------------------------------------------

Dyadic Dyadic::normalized(__int128 num, int exp) {
  if (num == 0) return Dyadic{};
  while (exp > 0 && (num & 1) == 0) {
    num >>= 1;
    --exp;
  }
  while (exp < 0) {
    num <<= 1;
    ++exp;
    if (!fits_int64(num)) throw DomainError("dyadic value exceeds 64-bit range");
  }
  if (exp > kMaxExponent) throw DomainError("dyadic precision exceeds 2^-62");
  if (!fits_int64(num)) throw DomainError("dyadic value exceeds 64-bit range");
  Dyadic d;
  d.num_ = static_cast<std::int64_t>(num);
  d.exp_ = exp;
  return d;
}

Dyadic Dyadic::from_ratio(std::int64_t num, int exp) { return normalized(num, exp); }

Dyadic Dyadic::from_double(double value) {
  if (!std::isfinite(value)) throw DomainError("non-finite coordinate");
  if (value == 0.0) return Dyadic{};
  int e = 0;
  const double m = std::frexp(value, &e);
  const auto mantissa = static_cast<std::int64_t>(std::ldexp(m, 53));
  return normalized(mantissa, 53 - e);
}

Dyadic Dyadic::from_rational(const Rational& r) {
  if (!is_power_of_two(r.denominator())) {
    throw DomainError("denominator of " + radial_lab::to_string(r) + " is not a power of two");
  }
  return normalized(r.numerator(), std::countr_zero(static_cast<std::uint64_t>(r.denominator())));
}

Dyadic Dyadic::parse(std::string_view text) { return from_rational(parse_rational(text)); }

double Dyadic::to_double() const noexcept { return std::ldexp(static_cast<double>(num_), -exp_); }

long double Dyadic::to_long_double() const noexcept {
  return std::ldexp(static_cast<long double>(num_), -exp_);
}

Rational Dyadic::to_rational() const {
  return Rational(num_, static_cast<std::int64_t>(std::uint64_t{1} << exp_));
}

__int128 Dyadic::scaled(int scale) const {
  if (scale < exp_ || scale - exp_ > 62) throw DomainError("scale out of range for dyadic value");
  return static_cast<__int128>(num_) << (scale - exp_);
}

std::int64_t Dyadic::floor_scaled(int n) const {
  if (n >= exp_) {
    const __int128 v = static_cast<__int128>(num_) << std::min(n - exp_, 64);
    if (n - exp_ >= 64 || !fits_int64(v)) throw DomainError("scaled dyadic overflows");
    return static_cast<std::int64_t>(v);
  }
  return num_ >> (exp_ - n);
}

Dyadic Dyadic::operator-() const { return normalized(-static_cast<__int128>(num_), exp_); }

Dyadic operator+(const Dyadic& a, const Dyadic& b) {
  const int e = std::max(a.exp_, b.exp_);
  return Dyadic::normalized(a.scaled(e) + b.scaled(e), e);
}

Dyadic operator-(const Dyadic& a, const Dyadic& b) {
  const int e = std::max(a.exp_, b.exp_);
  return Dyadic::normalized(a.scaled(e) - b.scaled(e), e);
}

Dyadic operator*(const Dyadic& a, const Dyadic& b) {
  return Dyadic::normalized(static_cast<__int128>(a.num_) * b.num_, a.exp_ + b.exp_);
}

Dyadic operator/(const Dyadic& a, const Dyadic& b) {
  if (b.num_ == 0) throw DomainError("division by zero");
  const std::int64_t mag = b.num_ < 0 ? -b.num_ : b.num_;
  if (!is_power_of_two(mag)) throw DomainError("quotient is not a dyadic rational");
  const int shift = std::countr_zero(static_cast<std::uint64_t>(mag));
  const __int128 num = b.num_ < 0 ? -static_cast<__int128>(a.num_) : a.num_;
  return Dyadic::normalized(num, a.exp_ + shift - b.exp_);
}

std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
  const int e = std::max(a.exp_, b.exp_);
  const __int128 x = a.scaled(e);
  const __int128 y = b.scaled(e);
  if (x < y) return std::strong_ordering::less;
  if (x > y) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string Dyadic::to_string() const {
  if (exp_ == 0) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(std::uint64_t{1} << exp_);
}

}  // namespace radial_lab
