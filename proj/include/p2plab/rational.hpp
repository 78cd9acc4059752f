#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace p2plab {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline std::string to_string(const Rational& r) {
  std::string s = numerator(r).str();
  if (denominator(r) != 1) s += "/" + denominator(r).str();
  return s;
}

// Accepts "n", "n/d" and decimal literals like "12.5" or "-0.25".
inline Rational parse_rational(const std::string& text) {
  auto slash = text.find('/');
  if (slash != std::string::npos) {
    BigInt num(text.substr(0, slash));
    BigInt den(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("rational with zero denominator: " + text);
    return Rational(num, den);
  }
  auto dot = text.find('.');
  if (dot == std::string::npos) return Rational(BigInt(text));
  std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  std::size_t frac_len = text.size() - dot - 1;
  if (frac_len == 0) return Rational(BigInt(digits));
  BigInt den = 1;
  for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
  bool neg = !digits.empty() && digits[0] == '-';
  if (neg) digits = digits.substr(1);
  Rational r(BigInt(digits), den);
  return neg ? -r : r;
}

// Smallest integer strictly greater than r.
inline BigInt floor_plus_one(const Rational& r) {
  BigInt q = numerator(r) / denominator(r);
  // cpp_int division truncates toward zero; fix up for negatives.
  if (q * denominator(r) > numerator(r)) --q;
  return q + 1;
}

}  // namespace p2plab
