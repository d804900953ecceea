#pragma once

#include <gmpxx.h>

#include <span>
#include <string>
#include <string_view>

#include "realmono/error.hpp"

namespace realmono {

/// Exact rational number, always kept in canonical (reduced, q > 0) form.
using Rational = mpq_class;
using Integer = mpz_class;

/// Parses `p/q` or a bare integer `p`. Throws InvalidInput on malformed text
/// or a zero denominator.
inline Rational parse_rational(std::string_view text) {
  auto valid = [](std::string_view s) {
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
    if (s.empty()) return false;
    for (char c : s)
      if (c < '0' || c > '9') return false;
    return true;
  };
  auto slash = text.find('/');
  std::string_view num = text.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view{"1"} : text.substr(slash + 1);
  if (!valid(num) || !valid(den) || den.front() == '-' || den.front() == '+')
    throw InvalidInput("malformed rational '" + std::string(text) + "'");
  Integer p{std::string(num.front() == '+' ? num.substr(1) : num)};
  Integer q{std::string(den)};
  if (q == 0) throw InvalidInput("zero denominator in '" + std::string(text) + "'");
  Rational r(p, q);
  r.canonicalize();
  return r;
}

/// Serializes as `p/q`, including `q = 1`.
inline std::string format_rational(const Rational& r) {
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline Integer lcm_of_denominators(std::span<const Rational> values, Integer acc = 1) {
  for (const auto& v : values) {
    Integer out;
    mpz_lcm(out.get_mpz_t(), acc.get_mpz_t(), v.get_den_mpz_t());
    acc = out;
  }
  return acc;
}

inline double to_double(const Rational& r) { return r.get_d(); }

}  // namespace realmono
