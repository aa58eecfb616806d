#pragma once

#include <span>
#include <string>
#include <vector>

#include "qiline/grid.hpp"
#include "qiline/map_expr.hpp"

namespace qiline {

/// Decision thresholds shared by every verdict that asks "does this go to ∞?".
struct Thresholds {
  double tail_bound = 1e-3;   // |drift ratio| below this on the tail ⇒ Sublinear
  int tail_len = 5;
  double linear_min = 1e-2;   // |λ| needed for LinearDrift
  double slope = 0.1;         // log-log slope for Divergent
  double ratio = 10;          // last / median(first decade) for Divergent
  double growth = 1.5;        // monotone top half must grow by this factor
  double noise_floor = 1e-9;  // gaps below this count as zero
  double witness = 1e3;       // displacement a witness must exceed
};

struct ProfilePoint {
  Wide x;
  Wide displacement;
};

/// (x, f(x) − x) in grid order.
std::vector<ProfilePoint> displacement_profile(const MapExpr& f, const SampleGrid& grid,
                                               const EvalConfig& cfg = {});

/// Header "x,displacement", 17 significant digits.
std::string profile_csv(const std::vector<ProfilePoint>& profile);

struct QIEstimate {
  double K = 1;
  double C = 0;
  SampleGrid grid;
};

QIEstimate estimate_qi_constants(const MapExpr& f, const SampleGrid& grid,
                                 const EvalConfig& cfg = {});

struct DriftClass {
  enum class Kind { Sublinear, LinearDrift, Unresolved };
  Kind kind = Kind::Unresolved;
  double lambda = 0;
  /// Last tail_len drift ratios (f(x) − x) / x.
  std::vector<double> tail;
};

std::string to_string(DriftClass::Kind k);

DriftClass drift_classify(const MapExpr& f, const SampleGrid& grid, const EvalConfig& cfg = {},
                          const Thresholds& th = {});

struct DistanceVerdict {
  enum class Kind { BoundedEvidence, Divergent, ExactEqual, ExactDifferent };
  Kind kind = Kind::BoundedEvidence;
  /// sup |f − g| over the grid (numeric path only).
  double M = 0;
  double fit_slope = 0;
  /// Sign of f − g at the last grid point.
  int sign = 0;
  /// True when the sign of f − g changes on the top half of the grid.
  bool sign_changes = false;
};

std::string to_string(DistanceVerdict::Kind k);

/// Verdict from sampled gaps d_k = f(x_k) − g(x_k).
DistanceVerdict classify_gap(std::span<const Wide> xs, std::span<const Wide> gaps,
                             const Thresholds& th = {});

/// Least-squares slope of ln|y| against ln x.
double loglog_slope(std::span<const Wide> xs, std::span<const Wide> ys, double floor = 1e-300);

/// Sampled verdict only, never the exact path.
DistanceVerdict numeric_distance(const MapExpr& f, const MapExpr& g, const SampleGrid& grid,
                                 const EvalConfig& cfg = {}, const Thresholds& th = {});

/// Exact for two rational PL maps (slopes at ±∞), sampled otherwise.
DistanceVerdict bounded_distance(const MapExpr& f, const MapExpr& g, const SampleGrid& grid,
                                 const EvalConfig& cfg = {}, const Thresholds& th = {});

struct WMembership {
  bool in_w = false;
  double sup_disp = 0;
  double sup_deriv = 0;
};

/// Sampled over ±grid; in_w when neither |f(x) − x| nor |f'(x)| grows on the
/// last decade of |x|.
WMembership w_membership(const MapExpr& f, const SampleGrid& grid, const EvalConfig& cfg = {});

/// Same ratio and count, x0 moved up by whole ratio steps until the grid lies
/// inside every given domain.
SampleGrid within_domains(SampleGrid grid, std::initializer_list<GermDomain> domains);

}  // namespace qiline
