#include "qiline/rational_pl.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <iterator>

#include "qiline/errors.hpp"

namespace qiline {

Rational to_rational(double x) {
  if (!std::isfinite(x)) throw DomainError("cannot convert non-finite value to rational");
  int exponent = 0;
  double mantissa = std::frexp(x, &exponent);
  // mantissa * 2^53 is an integer
  auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
  Rational q(scaled);
  exponent -= 53;
  if (exponent >= 0) {
    q *= Rational(BigInt(1) << exponent);
  } else {
    q /= Rational(BigInt(1) << -exponent);
  }
  return q;
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

Wide to_wide(const Rational& q) {
  // Split into a double head and a double tail: 106 bits is not enough, so
  // iterate once more on the remainder.
  double head = to_double(q);
  Rational rest = q - to_rational(head);
  double mid = to_double(rest);
  rest -= to_rational(mid);
  double tail = to_double(rest);
  return static_cast<Wide>(head) + static_cast<Wide>(mid) + static_cast<Wide>(tail);
}

std::string format_shortest(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string format17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_rational(const Rational& q) {
  auto num = boost::multiprecision::numerator(q);
  auto den = boost::multiprecision::denominator(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

RationalPL::RationalPL(std::vector<Breakpoint> points, Rational left_slope,
                       Rational right_slope)
    : points_(std::move(points)),
      left_(std::move(left_slope)),
      right_(std::move(right_slope)) {
  if (points_.empty()) throw InvariantError("piecewise-linear map needs at least one breakpoint");
  if (left_ <= 0 || right_ <= 0) throw InvariantError("end slopes must be positive");
  for (std::size_t k = 1; k < points_.size(); ++k) {
    if (points_[k].x <= points_[k - 1].x)
      throw InvariantError("breakpoint x-coordinates must be strictly increasing");
    if (points_[k].y <= points_[k - 1].y)
      throw InvariantError("all slopes must be positive");
  }
  canonicalize();
  cache_numeric();
}

RationalPL RationalPL::identity() { return linear(1, 0); }

RationalPL RationalPL::linear(const Rational& slope, const Rational& intercept) {
  return RationalPL({{0, intercept}}, slope, slope);
}

void RationalPL::canonicalize() {
  const std::size_t n = points_.size();
  std::vector<Rational> slopes;
  slopes.reserve(n + 1);
  slopes.push_back(left_);
  for (std::size_t k = 1; k < n; ++k)
    slopes.push_back((points_[k].y - points_[k - 1].y) / (points_[k].x - points_[k - 1].x));
  slopes.push_back(right_);

  std::vector<Breakpoint> kept;
  for (std::size_t k = 0; k < n; ++k)
    if (slopes[k] != slopes[k + 1]) kept.push_back(points_[k]);

  if (kept.empty()) {
    // a single line: pin the representative point at x = 0
    Rational y0 = points_.front().y - left_ * points_.front().x;
    kept.push_back({0, y0});
  }
  points_ = std::move(kept);
}

void RationalPL::cache_numeric() {
  xd_.clear();
  yd_.clear();
  xw_.clear();
  yw_.clear();
  for (const auto& p : points_) {
    xd_.push_back(to_double(p.x));
    yd_.push_back(to_double(p.y));
    xw_.push_back(to_wide(p.x));
    yw_.push_back(to_wide(p.y));
  }
  leftd_ = to_double(left_);
  rightd_ = to_double(right_);
  leftw_ = to_wide(left_);
  rightw_ = to_wide(right_);
}

Rational RationalPL::operator()(const Rational& x) const {
  if (x <= points_.front().x) return points_.front().y + left_ * (x - points_.front().x);
  if (x >= points_.back().x) return points_.back().y + right_ * (x - points_.back().x);
  auto it = std::upper_bound(points_.begin(), points_.end(), x,
                             [](const Rational& v, const Breakpoint& b) { return v < b.x; });
  const auto& hi = *it;
  const auto& lo = *std::prev(it);
  return lo.y + (hi.y - lo.y) * (x - lo.x) / (hi.x - lo.x);
}

Rational RationalPL::inverse_at(const Rational& y) const {
  if (y <= points_.front().y) return points_.front().x + (y - points_.front().y) / left_;
  if (y >= points_.back().y) return points_.back().x + (y - points_.back().y) / right_;
  auto it = std::upper_bound(points_.begin(), points_.end(), y,
                             [](const Rational& v, const Breakpoint& b) { return v < b.y; });
  const auto& hi = *it;
  const auto& lo = *std::prev(it);
  return lo.x + (hi.x - lo.x) * (y - lo.y) / (hi.y - lo.y);
}

template <class Real>
Real RationalPL::eval(Real x) const {
  const auto& xs = [&]() -> const auto& {
    if constexpr (std::is_same_v<Real, Wide>) return xw_; else return xd_;
  }();
  const auto& ys = [&]() -> const auto& {
    if constexpr (std::is_same_v<Real, Wide>) return yw_; else return yd_;
  }();
  Real left, right;
  if constexpr (std::is_same_v<Real, Wide>) {
    left = leftw_;
    right = rightw_;
  } else {
    left = leftd_;
    right = rightd_;
  }
  if (x <= xs.front()) return ys.front() + left * (x - xs.front());
  if (x >= xs.back()) return ys.back() + right * (x - xs.back());
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t k = static_cast<std::size_t>(it - xs.begin());
  return ys[k - 1] + (ys[k] - ys[k - 1]) * ((x - xs[k - 1]) / (xs[k] - xs[k - 1]));
}

template double RationalPL::eval<double>(double) const;
template Wide RationalPL::eval<Wide>(Wide) const;

template <class Real>
Real RationalPL::displacement(Real x) const {
  const auto& xs = [&]() -> const auto& {
    if constexpr (std::is_same_v<Real, Wide>) return xw_; else return xd_;
  }();
  const auto& ys = [&]() -> const auto& {
    if constexpr (std::is_same_v<Real, Wide>) return yw_; else return yd_;
  }();
  Real left, right;
  if constexpr (std::is_same_v<Real, Wide>) {
    left = leftw_;
    right = rightw_;
  } else {
    left = leftd_;
    right = rightd_;
  }
  if (x <= xs.front()) return (ys.front() - xs.front()) + (left - 1) * (x - xs.front());
  if (x >= xs.back()) return (ys.back() - xs.back()) + (right - 1) * (x - xs.back());
  return eval<Real>(x) - x;
}

template double RationalPL::displacement<double>(double) const;
template Wide RationalPL::displacement<Wide>(Wide) const;

bool RationalPL::is_identity() const { return *this == identity(); }

RationalPL pl_compose(const RationalPL& f, const RationalPL& g) {
  std::vector<Rational> xs;
  for (const auto& b : g.breakpoints()) xs.push_back(b.x);
  for (const auto& b : f.breakpoints()) xs.push_back(g.inverse_at(b.x));
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  std::vector<RationalPL::Breakpoint> pts;
  pts.reserve(xs.size());
  for (auto& x : xs) {
    Rational y = f(g(x));
    pts.push_back({std::move(x), std::move(y)});
  }
  return RationalPL(std::move(pts), f.left_slope() * g.left_slope(),
                    f.right_slope() * g.right_slope());
}

RationalPL pl_invert(const RationalPL& f) {
  std::vector<RationalPL::Breakpoint> pts;
  for (const auto& b : f.breakpoints()) pts.push_back({b.y, b.x});
  return RationalPL(std::move(pts), 1 / f.left_slope(), 1 / f.right_slope());
}

RationalPL pl_normalize_origin(const RationalPL& f) {
  Rational shift = f(0);
  std::vector<RationalPL::Breakpoint> pts;
  for (const auto& b : f.breakpoints()) pts.push_back({b.x, b.y - shift});
  return RationalPL(std::move(pts), f.left_slope(), f.right_slope());
}

RationalPL pl_reflect(const RationalPL& f) {
  std::vector<RationalPL::Breakpoint> pts;
  const auto& src = f.breakpoints();
  for (auto it = src.rbegin(); it != src.rend(); ++it) pts.push_back({-it->x, -it->y});
  return RationalPL(std::move(pts), f.right_slope(), f.left_slope());
}

}  // namespace qiline
