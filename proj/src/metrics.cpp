#include "qiline/metrics.hpp"

#include <algorithm>
#include <sstream>

#include "qiline/errors.hpp"
#include "qiline/eval.hpp"
#include "qiline/kernels.hpp"

namespace qiline {

namespace {

double median(std::vector<Wide> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  Wide m = n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
  return static_cast<double>(m);
}

int sign_of(Wide x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

}  // namespace

std::vector<ProfilePoint> displacement_profile(const MapExpr& f, const SampleGrid& grid,
                                               const EvalConfig& cfg) {
  grid.validate();
  auto xs = grid.points();
  auto ds = kernels::displacements(f, xs, cfg);
  std::vector<ProfilePoint> out(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) out[k] = {xs[k], ds[k]};
  return out;
}

std::string profile_csv(const std::vector<ProfilePoint>& profile) {
  std::string s = "x,displacement\n";
  for (const auto& p : profile) s += format_wide(p.x) + "," + format_wide(p.displacement) + "\n";
  return s;
}

QIEstimate estimate_qi_constants(const MapExpr& f, const SampleGrid& grid,
                                 const EvalConfig& cfg) {
  grid.validate();
  if (grid.count < 3) throw PreconditionError("QI estimate needs at least 3 grid points");
  auto xs = grid.points();
  auto ys = kernels::values(f, xs, cfg);
  const std::size_t n = xs.size();

  Wide K = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    Wide q = fabsq(ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k]);
    if (q <= 0) throw InvariantError("map is not injective on the grid");
    K = std::max(K, std::max(q, 1 / q));
  }
  Wide C = 0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      Wide d = xs[b] - xs[a];
      Wide fd = fabsq(ys[b] - ys[a]);
      C = std::max(C, fd - K * d);
      C = std::max(C, d / K - fd);
    }
  }
  return {static_cast<double>(K), static_cast<double>(C), grid};
}

std::string to_string(DriftClass::Kind k) {
  switch (k) {
    case DriftClass::Kind::Sublinear: return "Sublinear";
    case DriftClass::Kind::LinearDrift: return "LinearDrift";
    case DriftClass::Kind::Unresolved: return "Unresolved";
  }
  return "?";
}

DriftClass drift_classify(const MapExpr& f, const SampleGrid& grid, const EvalConfig& cfg,
                          const Thresholds& th) {
  grid.validate();
  if (grid.count < 10) throw PreconditionError("drift classification needs at least 10 grid points");
  if (th.tail_len < 2 || th.tail_len > grid.count)
    throw PreconditionError("tail length must lie in [2, grid count]");
  auto xs = grid.points();
  auto ds = kernels::displacements(f, xs, cfg);

  DriftClass out;
  const std::size_t n = xs.size(), start = n - static_cast<std::size_t>(th.tail_len);
  std::vector<Wide> r;
  for (std::size_t k = start; k < n; ++k) {
    r.push_back(ds[k] / xs[k]);
    out.tail.push_back(static_cast<double>(r.back()));
  }

  bool small = true, nonincreasing = true;
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (!(fabsq(r[k]) < th.tail_bound)) small = false;
    if (k > 0 && fabsq(r[k]) > fabsq(r[k - 1]) * (1 + 1e-9Q) + 1e-15Q) nonincreasing = false;
  }
  if (small && nonincreasing) {
    out.kind = DriftClass::Kind::Sublinear;
    return out;
  }

  Wide mean = 0;
  for (Wide v : r) mean += v;
  mean /= r.size();
  bool tight = std::all_of(r.begin(), r.end(), [&](Wide v) { return fabsq(v - mean) <= th.tail_bound; });
  if (tight && fabsq(mean) >= th.linear_min) {
    out.kind = DriftClass::Kind::LinearDrift;
    out.lambda = static_cast<double>(mean);
  }
  return out;
}

std::string to_string(DistanceVerdict::Kind k) {
  switch (k) {
    case DistanceVerdict::Kind::BoundedEvidence: return "BoundedEvidence";
    case DistanceVerdict::Kind::Divergent: return "Divergent";
    case DistanceVerdict::Kind::ExactEqual: return "ExactEqual";
    case DistanceVerdict::Kind::ExactDifferent: return "ExactDifferent";
  }
  return "?";
}

double loglog_slope(std::span<const Wide> xs, std::span<const Wide> ys, double floor) {
  if (xs.size() != ys.size() || xs.size() < 2) throw PreconditionError("log-log fit needs ≥ 2 points");
  const Wide n = xs.size();
  Wide sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    Wide lx = logq(xs[k]);
    Wide ly = logq(std::max(fabsq(ys[k]), static_cast<Wide>(floor)));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  Wide den = n * sxx - sx * sx;
  if (den <= 0) throw PreconditionError("log-log fit needs distinct x values");
  return static_cast<double>((n * sxy - sx * sy) / den);
}

DistanceVerdict classify_gap(std::span<const Wide> xs, std::span<const Wide> gaps,
                             const Thresholds& th) {
  const std::size_t n = xs.size();
  if (n < 4 || gaps.size() != n) throw PreconditionError("gap classification needs ≥ 4 points");
  DistanceVerdict v;
  std::vector<Wide> a(n);
  Wide sup = 0;
  for (std::size_t k = 0; k < n; ++k) {
    a[k] = fabsq(gaps[k]);
    sup = std::max(sup, a[k]);
  }
  v.M = static_cast<double>(sup);
  v.sign = sign_of(gaps[n - 1]);

  std::vector<Wide> first;
  for (std::size_t k = 0; k < n && xs[k] <= 10 * xs[0]; ++k) first.push_back(a[k]);
  const Wide base = std::max(static_cast<Wide>(median(first)), static_cast<Wide>(th.noise_floor));

  const std::size_t half = n / 2;
  v.fit_slope = loglog_slope(xs.subspan(half), std::span<const Wide>(a).subspan(half), th.noise_floor);
  bool monotone = true;
  for (std::size_t k = half; k + 1 < n; ++k) {
    if (a[k + 1] < a[k] * (1 - 1e-12Q)) monotone = false;
    if (sign_of(gaps[k]) * sign_of(gaps[k + 1]) < 0) v.sign_changes = true;
  }
  const Wide last = a[n - 1];
  const bool far = last >= th.ratio * base;
  const bool growing = v.fit_slope >= th.slope || (monotone && last >= th.growth * a[half]);
  v.kind = far && growing ? DistanceVerdict::Kind::Divergent : DistanceVerdict::Kind::BoundedEvidence;
  return v;
}

DistanceVerdict numeric_distance(const MapExpr& f, const MapExpr& g, const SampleGrid& grid,
                                 const EvalConfig& cfg, const Thresholds& th) {
  grid.validate();
  auto xs = grid.points();
  auto gaps = kernels::differences(f, g, xs, cfg);
  return classify_gap(xs, gaps, th);
}

DistanceVerdict bounded_distance(const MapExpr& f, const MapExpr& g, const SampleGrid& grid,
                                 const EvalConfig& cfg, const Thresholds& th) {
  const auto* pf = f.as<expr::PLRef>();
  const auto* pg = g.as<expr::PLRef>();
  if (pf && pg) {
    DistanceVerdict v;
    const bool same = pf->pl.right_slope() == pg->pl.right_slope() &&
                      pf->pl.left_slope() == pg->pl.left_slope();
    v.kind = same ? DistanceVerdict::Kind::ExactEqual : DistanceVerdict::Kind::ExactDifferent;
    return v;
  }
  return numeric_distance(f, g, grid, cfg, th);
}

WMembership w_membership(const MapExpr& f, const SampleGrid& grid, const EvalConfig& cfg) {
  if (!f.domain().full_line) throw PreconditionError("W membership needs a full-line map");
  grid.validate();
  auto xs = symmetric_points(grid);
  auto ds = kernels::displacements(f, xs, cfg);
  std::vector<double> der(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    double x = static_cast<double>(xs[k]);
    der[k] = std::fabs(derivative_est(f, x, 1e-6 * std::max(1.0, std::fabs(x)), cfg));
  }
  const Wide cut = grid.max_point() / 10;
  Wide early_d = 0, late_d = 0;
  double early_g = 0, late_g = 0;
  WMembership out;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    Wide d = fabsq(ds[k]);
    if (fabsq(xs[k]) >= cut) {
      late_d = std::max(late_d, d);
      late_g = std::max(late_g, der[k]);
    } else {
      early_d = std::max(early_d, d);
      early_g = std::max(early_g, der[k]);
    }
  }
  out.sup_disp = static_cast<double>(std::max(early_d, late_d));
  out.sup_deriv = std::max(early_g, late_g);
  out.in_w = late_d <= early_d * (1 + 1e-6Q) + 1e-9Q && late_g <= early_g * (1 + 1e-6) + 1e-9;
  return out;
}

SampleGrid within_domains(SampleGrid grid, std::initializer_list<GermDomain> domains) {
  grid.validate();
  for (const auto& d : domains) {
    while (!d.full_line && grid.x0 < d.x0) grid.x0 *= grid.ratio;
  }
  return grid;
}

}  // namespace qiline
