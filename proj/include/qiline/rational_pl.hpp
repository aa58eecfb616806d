#pragma once

#include <vector>

#include "qiline/scalar.hpp"

namespace qiline {

/// Exact piecewise-linear homeomorphism of the line with rational breakpoints.
///
/// The map is linear with slope `left_slope()` before the first breakpoint,
/// interpolates between consecutive breakpoints, and is linear with slope
/// `right_slope()` after the last one. Instances are always canonical:
/// breakpoints where the slope does not change are dropped, and a map with no
/// slope change keeps the single breakpoint at x = 0. Two maps are equal as
/// functions iff they compare equal.
class RationalPL {
 public:
  struct Breakpoint {
    Rational x;
    Rational y;
    friend bool operator==(const Breakpoint&, const Breakpoint&) = default;
  };

  /// Throws InvariantError unless x is strictly increasing and every slope is
  /// positive.
  RationalPL(std::vector<Breakpoint> points, Rational left_slope,
             Rational right_slope);

  static RationalPL identity();
  static RationalPL linear(const Rational& slope, const Rational& intercept);

  const std::vector<Breakpoint>& breakpoints() const { return points_; }
  const Rational& left_slope() const { return left_; }
  const Rational& right_slope() const { return right_; }

  Rational operator()(const Rational& x) const;
  Rational inverse_at(const Rational& y) const;

  /// Numeric evaluation through cached double/binary128 copies.
  template <class Real>
  Real eval(Real x) const;
  /// eval(x) − x without forming the difference on the unbounded pieces.
  template <class Real>
  Real displacement(Real x) const;

  bool is_identity() const;

  friend bool operator==(const RationalPL& a, const RationalPL& b) {
    return a.left_ == b.left_ && a.right_ == b.right_ && a.points_ == b.points_;
  }

 private:
  void canonicalize();
  void cache_numeric();

  std::vector<Breakpoint> points_;
  Rational left_;
  Rational right_;

  std::vector<double> xd_, yd_;
  std::vector<Wide> xw_, yw_;
  double leftd_ = 1, rightd_ = 1;
  Wide leftw_ = 1, rightw_ = 1;
};

/// f ∘ g, exact.
RationalPL pl_compose(const RationalPL& f, const RationalPL& g);
RationalPL pl_invert(const RationalPL& f);
/// x ↦ f(x) − f(0).
RationalPL pl_normalize_origin(const RationalPL& f);
/// x ↦ −f(−x).
RationalPL pl_reflect(const RationalPL& f);

}  // namespace qiline
