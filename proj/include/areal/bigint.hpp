#pragma once

#include <cstdint>
#include <limits>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace areal {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline std::string to_decimal(const BigInt& v) { return v.str(); }

/// "num/den" in lowest terms, or just "num" when integral.
inline std::string to_fraction(const Rational& v) {
  const BigInt num = boost::multiprecision::numerator(v);
  const BigInt den = boost::multiprecision::denominator(v);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

/// Fixed-point rendering with `digits` decimals, rounded toward zero.
inline std::string to_fixed(const Rational& v, int digits) {
  BigInt num = boost::multiprecision::numerator(v);
  const BigInt den = boost::multiprecision::denominator(v);
  std::string sign;
  if (num < 0) {
    sign = "-";
    num = -num;
  }
  BigInt scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  const BigInt scaled = num * scale / den;
  std::string s = BigInt(scaled / scale).str();
  if (digits > 0) {
    std::string frac = BigInt(scaled % scale).str();
    s += "." + std::string(static_cast<std::size_t>(digits) - frac.size(), '0') + frac;
  }
  return sign + s;
}

inline BigInt ipow(const BigInt& base, unsigned exp) {
  return boost::multiprecision::pow(base, exp);
}

inline BigInt ipow(std::uint64_t base, unsigned exp) { return ipow(BigInt(base), exp); }

// Saturating arithmetic for enumeration cost estimates.
inline std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
    return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

inline std::uint64_t sat_pow(std::uint64_t base, unsigned exp) {
  std::uint64_t r = 1;
  for (unsigned i = 0; i < exp; ++i) r = sat_mul(r, base);
  return r;
}

inline std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return a > std::numeric_limits<std::uint64_t>::max() - b ? std::numeric_limits<std::uint64_t>::max()
                                                           : a + b;
}

}  // namespace areal
