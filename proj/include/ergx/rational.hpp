#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>
#include <vector>

#include "ergx/error.hpp"

namespace ergx {

/// Arbitrary precision rational; always kept in lowest terms with a positive
/// denominator.
using Rational = boost::multiprecision::cpp_rational;
using RationalVec = std::vector<Rational>;
using RationalMatrix = std::vector<RationalVec>;  // row major

inline std::string to_string(const Rational& r) { return r.str(); }

/// Parses "7", "-3/4" or a plain decimal such as "10.5" / "-0.125" exactly.
inline Rational parse_rational(const std::string& text) {
  std::string s = text;
  while (!s.empty() && s.front() == ' ') s.erase(s.begin());
  while (!s.empty() && s.back() == ' ') s.pop_back();
  if (s.empty()) throw InfeasibleInput("empty rational");
  auto digits_ok = [](const std::string& d, bool allow_sign) {
    std::size_t i = 0;
    if (allow_sign && !d.empty() && (d[0] == '-' || d[0] == '+')) i = 1;
    if (i >= d.size()) return false;
    for (; i < d.size(); ++i)
      if (d[i] < '0' || d[i] > '9') return false;
    return true;
  };
  using boost::multiprecision::cpp_int;
  if (auto slash = s.find('/'); slash != std::string::npos) {
    auto num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!digits_ok(num, true) || !digits_ok(den, false)) throw InfeasibleInput("bad rational '" + text + "'");
    cpp_int d(den);
    if (d == 0) throw InfeasibleInput("zero denominator in '" + text + "'");
    return Rational(cpp_int(num), d);
  }
  if (auto dot = s.find('.'); dot != std::string::npos) {
    auto whole = s.substr(0, dot), frac = s.substr(dot + 1);
    bool neg = !whole.empty() && whole[0] == '-';
    if (!whole.empty() && (whole[0] == '-' || whole[0] == '+')) whole.erase(whole.begin());
    if (whole.empty()) whole = "0";
    if (frac.empty()) frac = "0";
    if (!digits_ok(whole, false) || !digits_ok(frac, false)) throw InfeasibleInput("bad decimal '" + text + "'");
    cpp_int scale = boost::multiprecision::pow(cpp_int(10), static_cast<unsigned>(frac.size()));
    Rational r(cpp_int(whole) * scale + cpp_int(frac), scale);
    return neg ? Rational(-r) : r;
  }
  if (!digits_ok(s, true)) throw InfeasibleInput("bad integer '" + text + "'");
  return Rational(cpp_int(s));
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline RationalVec to_rational(const std::vector<std::int64_t>& v) {
  RationalVec out;
  out.reserve(v.size());
  for (auto x : v) out.emplace_back(x);
  return out;
}

}  // namespace ergx
