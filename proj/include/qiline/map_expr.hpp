#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "qiline/rational_pl.hpp"

namespace qiline {

struct EvalConfig {
  /// Relative accuracy target: |result − f(x)| ≤ abs_tol · max(1, |f(x)|).
  double abs_tol = 1e-12;
  int max_bisect_iters = 400;
  double bracket_growth = 2.0;
  /// 53 selects double; anything in [54, 113] selects binary128. Grids that
  /// reach past 1e8 are always evaluated in binary128.
  int precision_bits = kStandardBits;
};

void validate(const EvalConfig& cfg);

/// The map is defined, finite and strictly monotone on [x0, +inf), or on all
/// of R when full_line is set (x0 is then 0 by convention).
struct GermDomain {
  double x0 = 0;
  bool full_line = true;
};

/// Open interval (lo, hi) with chart x ↦ lo + (hi − lo)(1/2 + atan(x)/π).
struct ChartInterval {
  double lo;
  double hi;
  friend bool operator==(const ChartInterval&, const ChartInterval&) = default;
};

struct MapNode;

/// Immutable expression tree for an orientation-preserving homeomorphism germ.
/// Cheap to copy; nodes are shared.
class MapExpr {
 public:
  MapExpr();  // identity

  static MapExpr identity();
  static MapExpr affine(double a, double b);
  /// x + s·x^{1/(i+1)} for x ≥ 0, identity for x ≤ 0.
  static MapExpr power_shift(double i, double s);
  /// x + s·ln(1 + x) for x ≥ 0, identity for x ≤ 0.
  static MapExpr log_shift(double s);
  /// ln(e^x + s·e^{x/(i+1)}).
  static MapExpr log_power(double i, double s);
  static MapExpr exp_glue();
  static MapExpr reflect();
  static MapExpr pl(RationalPL pl);
  static MapExpr periodic_lift(RationalPL pl01);
  /// left ∘ right.
  static MapExpr compose(MapExpr left, MapExpr right);
  static MapExpr inverse(MapExpr inner);
  /// inner on [at, ∞), x + inner(at) − at below.
  static MapExpr extend(MapExpr inner, double at);
  /// chart ∘ inner ∘ chart⁻¹ inside each interval, identity outside.
  static MapExpr diagonal(std::vector<ChartInterval> charts, MapExpr inner);

  const MapNode& node() const { return *node_; }
  const GermDomain& domain() const;
  /// +1 increasing, −1 decreasing.
  int orientation() const;

  template <class T>
  const T* as() const;

  std::string str() const;

  friend bool operator==(const MapExpr& a, const MapExpr& b);

 private:
  explicit MapExpr(std::shared_ptr<const MapNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const MapNode> node_;
};

inline MapExpr operator*(MapExpr left, MapExpr right) {
  return MapExpr::compose(std::move(left), std::move(right));
}

namespace expr {

struct Identity {
  friend bool operator==(const Identity&, const Identity&) = default;
};
struct Affine {
  double a, b;
  friend bool operator==(const Affine&, const Affine&) = default;
};
struct PowerShift {
  double i, s;
  friend bool operator==(const PowerShift&, const PowerShift&) = default;
};
struct LogShift {
  double s;
  friend bool operator==(const LogShift&, const LogShift&) = default;
};
struct LogPower {
  double i, s;
  friend bool operator==(const LogPower&, const LogPower&) = default;
};
struct ExpGlue {
  friend bool operator==(const ExpGlue&, const ExpGlue&) = default;
};
struct Reflect {
  friend bool operator==(const Reflect&, const Reflect&) = default;
};
struct PLRef {
  RationalPL pl;
  friend bool operator==(const PLRef&, const PLRef&) = default;
};
struct PeriodicLift {
  RationalPL pl01;
  friend bool operator==(const PeriodicLift&, const PeriodicLift&) = default;
};
struct Compose {
  MapExpr left, right;
  friend bool operator==(const Compose&, const Compose&) = default;
};
struct Inverse {
  MapExpr inner;
  friend bool operator==(const Inverse&, const Inverse&) = default;
};
struct Extend {
  MapExpr inner;
  double at;
  friend bool operator==(const Extend&, const Extend&) = default;
};
struct Diagonal {
  std::vector<ChartInterval> charts;
  MapExpr inner;
  friend bool operator==(const Diagonal&, const Diagonal&) = default;
};

using Variant = std::variant<Identity, Affine, PowerShift, LogShift, LogPower, ExpGlue, Reflect,
                             PLRef, PeriodicLift, Compose, Inverse, Extend, Diagonal>;

}  // namespace expr

struct MapNode {
  expr::Variant v;
  GermDomain domain;
  int orientation = 1;
};

inline const GermDomain& MapExpr::domain() const { return node_->domain; }
inline int MapExpr::orientation() const { return node_->orientation; }

template <class T>
const T* MapExpr::as() const {
  return std::get_if<T>(&node_->v);
}

inline bool operator==(const MapExpr& a, const MapExpr& b) {
  return a.node_ == b.node_ || a.node_->v == b.node_->v;
}

GermDomain germ_domain(const MapExpr& f);

/// Factors of a composition chain, outermost first.
std::vector<MapExpr> flatten_compose(const MapExpr& f);

}  // namespace qiline
