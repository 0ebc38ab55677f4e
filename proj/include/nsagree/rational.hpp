#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/gmp.hpp>

namespace nsagree {

// Expression templates are disabled so that `auto` and template argument
// deduction always see plain values.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational, boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int, boost::multiprecision::et_off>;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed textual input (rationals, JSON documents).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// The input is missing data it structurally needs (e.g. a table entry).
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// The operation does not support the shape of the given box.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A configured size limit would be exceeded.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its domain of definition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

// GMP reads a leading zero as an octal prefix.
inline Integer decimal_integer(std::string_view digits) {
  const auto first = digits.find_first_not_of('0');
  if (first == std::string_view::npos) return Integer(0);
  return Integer{std::string(digits.substr(first))};
}

inline Integer parse_integer(std::string_view s, std::string_view whole) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) throw ParseError("invalid rational literal '" + std::string(whole) + "'");
  const Integer v = decimal_integer(s);
  return negative ? Integer(-v) : v;
}

inline Integer pow10(long exponent) {
  Integer r = 1;
  for (long i = 0; i < exponent; ++i) r *= 10;
  return r;
}

}  // namespace detail

/// Parses "p/q", integers, and decimals ("0.125", "-1.5e-2") into an exact rational.
inline Rational parse_rational(std::string_view text) {
  const std::string_view s = detail::trim(text);
  if (s.empty()) throw ParseError("empty rational literal");

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Integer num = detail::parse_integer(detail::trim(s.substr(0, slash)), s);
    Integer den = detail::parse_integer(detail::trim(s.substr(slash + 1)), s);
    if (den == 0) throw ParseError("zero denominator in '" + std::string(s) + "'");
    return Rational(num, den);
  }

  std::string_view mantissa = s;
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = s.substr(0, e);
    std::string_view exp_text = s.substr(e + 1);
    if (!exp_text.empty() && exp_text.front() == '+') exp_text.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);
    if (ec != std::errc{} || ptr != exp_text.data() + exp_text.size() || exp_text.empty())
      throw ParseError("invalid exponent in '" + std::string(s) + "'");
    if (exponent > 4096 || exponent < -4096) throw ParseError("exponent out of range in '" + std::string(s) + "'");
  }

  bool negative = false;
  if (!mantissa.empty() && (mantissa.front() == '-' || mantissa.front() == '+')) {
    negative = mantissa.front() == '-';
    mantissa.remove_prefix(1);
  }
  std::string digits;
  long scale = 0;
  if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = mantissa.substr(0, dot);
    std::string_view frac_part = mantissa.substr(dot + 1);
    if ((int_part.empty() && frac_part.empty()) || (!int_part.empty() && !detail::all_digits(int_part)) ||
        (!frac_part.empty() && !detail::all_digits(frac_part)))
      throw ParseError("invalid rational literal '" + std::string(s) + "'");
    digits = std::string(int_part) + std::string(frac_part);
    scale = static_cast<long>(frac_part.size());
  } else {
    if (!detail::all_digits(mantissa)) throw ParseError("invalid rational literal '" + std::string(s) + "'");
    digits = std::string(mantissa);
  }

  Rational value{detail::decimal_integer(digits)};
  const long shift = exponent - scale;
  if (shift > 0) value *= Rational(detail::pow10(shift));
  if (shift < 0) value /= Rational(detail::pow10(-shift));
  return negative ? Rational(-value) : value;
}

/// Converts a binary double to the exact rational of its shortest round-trip
/// decimal representation, so that 0.1 becomes 1/10 rather than the nearest dyadic.
inline Rational rational_from_double(double v) {
  if (!std::isfinite(v)) throw ParseError("non-finite number");
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw ParseError("cannot format number");
  return parse_rational(std::string_view(buf, static_cast<std::size_t>(ptr - buf)));
}

/// "p/q" or "p" for integers.
inline std::string to_string(const Rational& r) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace nsagree
