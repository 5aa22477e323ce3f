#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace cellhom {

// Exact rational arithmetic on 64-bit numerator/denominator. All geometry
// that feeds bit-exact checks (rotation frames, region membership, jump
// signs) goes through this type; doubles appear only at evaluation time.
struct Rational {
  long long num = 0;
  long long den = 1;  // > 0, gcd(|num|, den) == 1

  Rational() = default;
  Rational(long long n) : num(n), den(1) {}
  Rational(long long n, long long d) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den == 0) throw std::invalid_argument("rational: zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

  std::string str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }
};

namespace detail {
inline long long checked_ll(__int128 v, const char* what) {
  if (v > static_cast<__int128>(INT64_MAX) || v < static_cast<__int128>(INT64_MIN))
    throw std::overflow_error(std::string("rational overflow in ") + what);
  return static_cast<long long>(v);
}

inline Rational make_reduced(__int128 n, __int128 d, const char* what) {
  if (d == 0) throw std::invalid_argument("rational: zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  __int128 a = n < 0 ? -n : n;
  __int128 b = d;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    n /= a;
    d /= a;
  }
  Rational r;
  r.num = checked_ll(n, what);
  r.den = checked_ll(d, what);
  return r;
}
}  // namespace detail

inline Rational operator+(const Rational& a, const Rational& b) {
  return detail::make_reduced(static_cast<__int128>(a.num) * b.den + static_cast<__int128>(b.num) * a.den,
                              static_cast<__int128>(a.den) * b.den, "+");
}
inline Rational operator-(const Rational& a, const Rational& b) {
  return detail::make_reduced(static_cast<__int128>(a.num) * b.den - static_cast<__int128>(b.num) * a.den,
                              static_cast<__int128>(a.den) * b.den, "-");
}
inline Rational operator*(const Rational& a, const Rational& b) {
  return detail::make_reduced(static_cast<__int128>(a.num) * b.num, static_cast<__int128>(a.den) * b.den, "*");
}
inline Rational operator/(const Rational& a, const Rational& b) {
  if (b.num == 0) throw std::invalid_argument("rational: division by zero");
  return detail::make_reduced(static_cast<__int128>(a.num) * b.den, static_cast<__int128>(a.den) * b.num, "/");
}
inline Rational operator-(const Rational& a) { return Rational(-a.num, a.den); }

inline int compare(const Rational& a, const Rational& b) {
  __int128 lhs = static_cast<__int128>(a.num) * b.den;
  __int128 rhs = static_cast<__int128>(b.num) * a.den;
  return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}
inline bool operator==(const Rational& a, const Rational& b) { return a.num == b.num && a.den == b.den; }
inline bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
inline bool operator<(const Rational& a, const Rational& b) { return compare(a, b) < 0; }
inline bool operator<=(const Rational& a, const Rational& b) { return compare(a, b) <= 0; }
inline bool operator>(const Rational& a, const Rational& b) { return compare(a, b) > 0; }
inline bool operator>=(const Rational& a, const Rational& b) { return compare(a, b) >= 0; }

inline long long floor_ll(const Rational& a) {
  long long q = a.num / a.den;
  if (a.num % a.den != 0 && a.num < 0) --q;
  return q;
}
inline long long ceil_ll(const Rational& a) {
  long long q = a.num / a.den;
  if (a.num % a.den != 0 && a.num > 0) ++q;
  return q;
}

using RVec = std::vector<Rational>;
using RMat = std::vector<std::vector<Rational>>;

inline long long lcm_ll(long long a, long long b) {
  __int128 l = static_cast<__int128>(a) / std::gcd(a, b) * b;
  return detail::checked_ll(l, "lcm");
}

}  // namespace cellhom
