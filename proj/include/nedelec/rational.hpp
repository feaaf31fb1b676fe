#pragma once

#include <gmpxx.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace nedelec {

/// Arbitrary-precision rational number. GMP keeps the fraction canonical
/// (reduced, positive denominator) after every arithmetic operation.
using Rational = mpq_class;

inline double to_double(const Rational& q) { return q.get_d(); }

/// Exact conversion: every finite double is a dyadic rational.
inline Rational from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("from_double: non-finite value");
  return Rational(x);
}

/// Parses "3", "-2/7", "0.125", "1e-3" exactly.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw std::invalid_argument("parse_rational: empty string");
  if (s.find('/') != std::string::npos) {
    Rational q(s, 10);
    q.canonicalize();
    return q;
  }
  std::string mantissa = s;
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string::npos) {
    mantissa = s.substr(0, e);
    exponent = std::stol(s.substr(e + 1));
  }
  bool negative = false;
  if (!mantissa.empty() && (mantissa[0] == '-' || mantissa[0] == '+')) {
    negative = mantissa[0] == '-';
    mantissa.erase(0, 1);
  }
  std::string digits;
  long fraction_digits = 0;
  bool seen_point = false;
  for (char c : mantissa) {
    if (c == '.') {
      if (seen_point) throw std::invalid_argument("parse_rational: malformed number '" + s + "'");
      seen_point = true;
    } else if (c >= '0' && c <= '9') {
      digits.push_back(c);
      if (seen_point) ++fraction_digits;
    } else {
      throw std::invalid_argument("parse_rational: malformed number '" + s + "'");
    }
  }
  if (digits.empty()) throw std::invalid_argument("parse_rational: malformed number '" + s + "'");
  mpz_class num(digits, 10);
  mpz_class ten = 10;
  long shift = exponent - fraction_digits;
  mpz_class scale;
  mpz_pow_ui(scale.get_mpz_t(), ten.get_mpz_t(), static_cast<unsigned long>(std::labs(shift)));
  Rational q = shift >= 0 ? Rational(num * scale) : Rational(num, scale);
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

}  // namespace nedelec
