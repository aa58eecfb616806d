#pragma once

#include <cmath>
#include <limits>
#include <type_traits>
#include <string>

#include <quadmath.h>

#include <boost/multiprecision/cpp_int.hpp>

namespace qiline {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// 113-bit binary128, used for grids that reach beyond 1e8.
using Wide = __float128;

inline constexpr int kWideBits = 113;
inline constexpr int kStandardBits = 53;
inline constexpr double kStandardGridCap = 1e8;

namespace num {

inline double exp(double x) { return std::exp(x); }
inline double log(double x) { return std::log(x); }
inline double log1p(double x) { return std::log1p(x); }
inline double expm1(double x) { return std::expm1(x); }
inline double pow(double x, double y) { return std::pow(x, y); }
inline double floor(double x) { return std::floor(x); }
inline double fabs(double x) { return std::fabs(x); }
inline double tan(double x) { return std::tan(x); }
inline double atan(double x) { return std::atan(x); }
inline bool isfinite(double x) { return std::isfinite(x); }

inline Wide exp(Wide x) { return expq(x); }
inline Wide log(Wide x) { return logq(x); }
inline Wide log1p(Wide x) { return log1pq(x); }
inline Wide expm1(Wide x) { return expm1q(x); }
inline Wide pow(Wide x, Wide y) { return powq(x, y); }
inline Wide floor(Wide x) { return floorq(x); }
inline Wide fabs(Wide x) { return fabsq(x); }
inline Wide tan(Wide x) { return tanq(x); }
inline Wide atan(Wide x) { return atanq(x); }
inline bool isfinite(Wide x) { return finiteq(x) != 0; }

template <class Real>
constexpr Real epsilon() {
  if constexpr (std::is_same_v<Real, Wide>) {
    return FLT128_EPSILON;
  } else {
    return std::numeric_limits<Real>::epsilon();
  }
}

template <class Real>
Real pi() {
  if constexpr (std::is_same_v<Real, Wide>) {
    return M_PIq;
  } else {
    return M_PI;
  }
}

}  // namespace num

/// Exact conversion; every finite double is a dyadic rational.
Rational to_rational(double x);
double to_double(const Rational& q);
Wide to_wide(const Rational& q);

/// Shortest decimal text that parses back to the same double.
std::string format_shortest(double x);
/// Fixed 17 significant digits, the report format.
std::string format17(double x);
std::string format_rational(const Rational& q);

}  // namespace qiline
