#include "qiline/actions.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "qiline/errors.hpp"
#include "qiline/eval.hpp"

namespace qiline {

void validate(const ActionSpec& act) {
  if (act.names.size() != act.generators.size())
    throw InvariantError("every generator needs a name");
  for (std::size_t k = 0; k < act.generators.size(); ++k) {
    const auto& g = act.generators[k];
    if (!g.domain().full_line || g.orientation() < 0)
      throw InvariantError("generator " + act.names[k] + " is not an increasing map of the line");
  }
}

MapExpr word_map(const ActionSpec& act, const GroupWord& w) {
  MapExpr acc = MapExpr::identity();
  bool first = true;
  for (const auto& [idx, e] : w) {
    if (idx >= act.generators.size()) throw InvariantError("word uses an unknown generator");
    if (e == 0) throw InvariantError("word exponents must be nonzero");
    MapExpr g = e > 0 ? act.generators[idx] : MapExpr::inverse(act.generators[idx]);
    for (int k = 0; k < std::abs(e); ++k) {
      acc = first ? g : MapExpr::compose(acc, g);
      first = false;
    }
  }
  return acc;
}

double relation_residual(const ActionSpec& act, const std::pair<GroupWord, GroupWord>& rel,
                         const std::vector<double>& xs, const EvalConfig& cfg) {
  MapExpr l = word_map(act, rel.first), r = word_map(act, rel.second);
  double sup = 0;
  for (double x : xs) sup = std::max(sup, std::fabs(eval(l, x, cfg) - eval(r, x, cfg)));
  return sup;
}

namespace {

template <class Real>
TranslationNumber translation_impl(const MapExpr& f, double x0, long n, const EvalConfig& cfg) {
  Real x = x0, sum = 0, sum_n = 0;
  int direction = 0;
  for (long k = 1; k <= 2 * n; ++k) {
    Real d;
    if constexpr (std::is_same_v<Real, Wide>) {
      d = displacement_wide(f, x, cfg);
    } else {
      d = displacement(f, x, cfg);
    }
    const int sign = d > 0 ? 1 : (d < 0 ? -1 : 0);
    if (num::fabs(d) <= static_cast<Real>(cfg.abs_tol) * std::max(Real(1), num::fabs(x)))
      throw FixedPointError("orbit stalls near a fixed point", static_cast<double>(x));
    if (direction != 0 && sign != direction)
      throw FixedPointError("orbit turns back, so the map has a fixed point", static_cast<double>(x));
    direction = sign;
    x += d;
    sum += d;
    if (k == n) sum_n = sum;
  }
  TranslationNumber t;
  t.iterations = n;
  t.value = static_cast<double>(sum_n / n);
  t.error_estimate = static_cast<double>(num::fabs(sum / (2 * n) - sum_n / n));
  return t;
}

}  // namespace

TranslationNumber translation_number(const MapExpr& f, double x0, long n, const EvalConfig& cfg) {
  if (!f.domain().full_line) throw PreconditionError("translation number needs a full-line map");
  if (n <= 0) throw PreconditionError("iteration count must be positive");
  validate(cfg);
  if (cfg.precision_bits > kStandardBits) return translation_impl<Wide>(f, x0, n, cfg);
  return translation_impl<double>(f, x0, n, cfg);
}

std::vector<double> orbit(const MapExpr& f, double x0, long steps, const EvalConfig& cfg) {
  std::vector<double> out{x0};
  for (long k = 0; k < steps; ++k) out.push_back(eval(f, out.back(), cfg));
  return out;
}

std::string orbit_csv(const std::vector<double>& points) {
  std::string s = "step,x\n";
  for (std::size_t k = 0; k < points.size(); ++k)
    s += std::to_string(k) + "," + format17(points[k]) + "\n";
  return s;
}

HomomorphismCheck holder_homomorphism_check(const MapExpr& g, const MapExpr& h, double x0, long n,
                                            const EvalConfig& cfg) {
  MapExpr gh = MapExpr::compose(g, h), hg = MapExpr::compose(h, g);
  for (int j = -8; j <= 8; ++j) {
    double x = x0 + 0.37 * j;
    double a = eval(gh, x, cfg), b = eval(hg, x, cfg);
    if (std::fabs(a - b) > 10 * cfg.abs_tol * std::max(1.0, std::fabs(a)))
      throw PreconditionError("maps do not commute at x = " + format17(x));
  }
  HomomorphismCheck c;
  c.tau_g = translation_number(g, x0, n, cfg).value;
  c.tau_h = translation_number(h, x0, n, cfg).value;
  c.tau_gh = translation_number(gh, x0, n, cfg).value;
  c.residual = std::fabs(c.tau_gh - c.tau_g - c.tau_h);
  c.additive = c.residual <= kAdditivityTol;
  return c;
}

namespace {

void exponent_vectors(std::size_t m, int depth, std::vector<int>& cur,
                      std::vector<std::vector<int>>& out) {
  if (cur.size() == m) {
    out.push_back(cur);
    return;
  }
  int used = 0;
  for (int e : cur) used += std::abs(e);
  for (int e = -(depth - used); e <= depth - used; ++e) {
    cur.push_back(e);
    exponent_vectors(m, depth, cur, out);
    cur.pop_back();
  }
}

std::string vector_string(const std::vector<int>& e) {
  std::string s = "(";
  for (std::size_t k = 0; k < e.size(); ++k) s += (k ? "," : "") + std::to_string(e[k]);
  return s + ")";
}

}  // namespace

double semi_conjugacy_at(const SemiConjugacy& sc, double x) {
  const auto& g = sc.grid_points;
  if (g.empty()) throw PreconditionError("empty semi-conjugacy");
  if (x <= g.front().first) return g.front().second;
  if (x >= g.back().first) return g.back().second;
  auto it = std::upper_bound(g.begin(), g.end(), x,
                             [](double v, const std::pair<double, double>& p) { return v < p.first; });
  const auto& hi = *it;
  const auto& lo = *std::prev(it);
  return lo.second + (hi.second - lo.second) * (x - lo.first) / (hi.first - lo.first);
}

SemiConjugacy build_semi_conjugacy(const std::vector<MapExpr>& gens, double x0, int depth,
                                   const std::vector<double>& taus, const EvalConfig& cfg) {
  if (gens.empty() || taus.size() != gens.size())
    throw PreconditionError("need one translation number per generator");
  if (depth < 1) throw PreconditionError("orbit depth must be positive");
  std::vector<MapExpr> invs;
  for (const auto& g : gens) invs.push_back(MapExpr::inverse(g));

  std::vector<std::vector<int>> vecs;
  std::vector<int> cur;
  exponent_vectors(gens.size(), depth, cur, vecs);

  struct Point {
    double x, phi;
    std::vector<int> e;
  };
  std::vector<Point> pts;
  for (const auto& e : vecs) {
    double x = x0, phi = 0;
    for (std::size_t k = 0; k < e.size(); ++k) {
      for (int r = 0; r < std::abs(e[k]); ++r) x = eval(e[k] > 0 ? gens[k] : invs[k], x, cfg);
      phi += e[k] * taus[k];
    }
    pts.push_back({x, phi, e});
  }
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.x < b.x; });
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    if (pts[k + 1].x - pts[k].x <= cfg.abs_tol * std::max(1.0, std::fabs(pts[k].x)))
      throw PreconditionError("orbit collision between words " + vector_string(pts[k].e) +
                              " and " + vector_string(pts[k + 1].e));
  }

  SemiConjugacy sc;
  sc.taus = taus;
  for (const auto& p : pts) sc.grid_points.emplace_back(p.x, p.phi);
  for (const auto& p : pts) {
    int used = 0;
    for (int e : p.e) used += std::abs(e);
    if (used >= depth) continue;
    for (std::size_t k = 0; k < gens.size(); ++k) {
      double hx = eval(gens[k], p.x, cfg);
      sc.residual = std::max(sc.residual, std::fabs(semi_conjugacy_at(sc, hx) - p.phi - taus[k]));
    }
  }
  return sc;
}

SemiConjugacy build_semi_conjugacy(const std::vector<MapExpr>& gens, double x0, int depth, long n,
                                   double tau_x0, const EvalConfig& cfg) {
  std::vector<double> taus;
  for (const auto& g : gens) taus.push_back(translation_number(g, tau_x0, n, cfg).value);
  return build_semi_conjugacy(gens, x0, depth, taus, cfg);
}

LinearityResult linearity_test(const std::vector<std::pair<Rational, double>>& samples, double tol) {
  if (samples.size() < 10) throw PreconditionError("linearity test needs at least 10 samples");
  auto one = std::find_if(samples.begin(), samples.end(), [](const auto& s) { return s.first == 1; });
  if (one == samples.end()) throw PreconditionError("samples must include q = 1");
  LinearityResult r;
  r.slope = one->second;
  for (const auto& [q, phi] : samples)
    r.max_deviation = std::max(r.max_deviation, std::fabs(phi - to_double(q) * r.slope));
  r.linear = r.max_deviation <= tol;
  return r;
}

std::pair<double, double> injectivity_obstruction(double slope1, double slope2) {
  if (slope1 == 0 || slope2 == 0 || !std::isfinite(slope1) || !std::isfinite(slope2))
    throw PreconditionError("slopes must be nonzero and finite");
  double norm = std::hypot(slope1, slope2);
  return {slope2 / norm, -slope1 / norm};
}

double affine_functional_equation_residual(const MapExpr& ainv, const SampleGrid& grid,
                                           const EvalConfig& cfg) {
  grid.validate();
  double sup = 0;
  for (Wide xw : grid.points()) {
    double x = static_cast<double>(xw);
    sup = std::max(sup, std::fabs(eval(ainv, x + 2, cfg) - eval(ainv, x, cfg) - 1));
  }
  return sup;
}

std::optional<Rational> exact_functional_equation_residual(const MapExpr& ainv,
                                                           const SampleGrid& grid) {
  std::optional<RationalPL> pl;
  if (const auto* a = ainv.as<expr::Affine>()) pl = RationalPL::linear(to_rational(a->a), to_rational(a->b));
  if (const auto* p = ainv.as<expr::PLRef>()) pl = p->pl;
  if (ainv.as<expr::Identity>()) pl = RationalPL::identity();
  if (!pl) return std::nullopt;
  grid.validate();
  Rational sup = 0;
  for (Wide xw : grid.points()) {
    Rational x = to_rational(static_cast<double>(xw));
    Rational r = abs((*pl)(x + 2) - (*pl)(x) - 1);
    if (r > sup) sup = r;
  }
  return sup;
}

FixedPoint contraction_fixed_point(const MapExpr& g, double x0, const EvalConfig& cfg) {
  for (int j = -4; j <= 4; ++j) {
    double x = x0 + 0.5 * j;
    if (std::fabs(eval(g, x + 2, cfg) - eval(g, x, cfg) - 1) > 1e-9)
      throw PreconditionError("g(x + 2) = g(x) + 1 fails at x = " + format17(x));
  }
  FixedPoint fp{x0, 0};
  for (int k = 0; k <= 200; ++k) {
    double gx = eval(g, fp.x, cfg);
    if (std::fabs(gx - fp.x) <= 1e-9) {
      fp.iterations = k;
      return fp;
    }
    fp.x = gx;
  }
  throw ConvergenceError("iteration did not reach a fixed point in 200 steps");
}

ActionSpec diagonal_embed(const ActionSpec& act, const std::vector<ChartInterval>& charts) {
  validate(act);
  ActionSpec out;
  out.names = act.names;
  out.relations = act.relations;
  for (const auto& g : act.generators) out.generators.push_back(MapExpr::diagonal(charts, g));
  return out;
}

std::string to_string(CandidateFamily f) {
  return f == CandidateFamily::Translation ? "translation" : "fixed-point";
}

namespace {

const ChartInterval kUnit{0, 1};

MapExpr in_chart(const MapExpr& inner) { return MapExpr::diagonal({kUnit}, inner); }

}  // namespace

MapExpr candidate_A(CandidateFamily, const CandidateParams& p, double t) {
  return in_chart(MapExpr::affine(1, p.lambda * std::log(t)));
}

MapExpr candidate_B(CandidateFamily fam, const CandidateParams& p, int summand, double s) {
  const double c = summand == 1 ? p.c1 : p.c2;
  if (fam == CandidateFamily::Translation) return in_chart(MapExpr::affine(1, c * s));
  return in_chart(MapExpr::extend(MapExpr::affine(std::exp(c * s), 0), 0));
}

namespace {

std::vector<double> chart_samples() {
  std::vector<double> xs;
  for (int k = -6; k <= 6; ++k) xs.push_back(chart_forward<double>(kUnit, 0.5 * k));
  return xs;
}

// sup |chart⁻¹(l(x)) − chart⁻¹(r(x))| over the samples
double chart_gap(const MapExpr& l, const MapExpr& r, const EvalConfig& cfg) {
  double sup = 0;
  for (double x : chart_samples()) {
    double a = chart_backward<double>(kUnit, eval(l, x, cfg));
    double b = chart_backward<double>(kUnit, eval(r, x, cfg));
    sup = std::max(sup, std::fabs(a - b));
  }
  return sup;
}

// τ in chart coordinates of the unit B-summand, or nullopt without one
std::optional<double> summand_slope(CandidateFamily fam, const CandidateParams& p, int summand,
                                    const EvalConfig& cfg) {
  const auto* d = candidate_B(fam, p, summand, 1).as<expr::Diagonal>();
  try {
    double tau = translation_number(d->inner, 0.5, 1000, cfg).value;
    if (tau == 0) return std::nullopt;
    return tau;
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

std::vector<ObstructionReport> relation_violation_scan(CandidateFamily fam,
                                                       const std::vector<CandidateParams>& params,
                                                       const EvalConfig& cfg) {
  std::vector<ObstructionReport> out(params.size());
  std::vector<std::exception_ptr> errors(params.size());
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < static_cast<long>(params.size()); ++k) {
    try {
      const auto& p = params[k];
      ObstructionReport r;
      r.params = p;
      r.family = fam;
      auto A = [&](double t) { return candidate_A(fam, p, t); };
      auto B = [&](int i, double s) { return candidate_B(fam, p, i, s); };

      double conj = 0;
      for (int i = 1; i <= 2; ++i) {
        MapExpr lhs = A(2) * B(i, 1) * MapExpr::inverse(A(2));
        conj = std::max(conj, chart_gap(lhs, B(i, std::pow(2.0, i / (i + 1.0))), cfg));
      }
      double add = 0;
      for (int i = 1; i <= 2; ++i) add = std::max(add, chart_gap(B(i, 1) * B(i, 2), B(i, 3), cfg));
      double comm = chart_gap(B(1, 1) * B(2, 1), B(2, 1) * B(1, 1), cfg);
      double mult = chart_gap(A(2) * A(3), A(6), cfg);

      double inj = 1;
      auto c1 = summand_slope(fam, p, 1, cfg);
      auto c2 = summand_slope(fam, p, 2, cfg);
      if (c1 && c2) {
        auto [s, t] = injectivity_obstruction(*c1, *c2);
        // a nontrivial kernel word acting trivially breaks injectivity
        double moved = chart_gap(B(1, s) * B(2, t), MapExpr::identity(), cfg);
        inj = moved <= 1e-3 ? 1 : 0;
      }
      r.residuals = {{"conj", conj}, {"addB", add}, {"commB", comm}, {"multA", mult}, {"injectivity", inj}};
      for (const auto& [name, v] : r.residuals) r.max_violation = std::max(r.max_violation, v);
      if (fam == CandidateFamily::FixedPoint) r.fixed_point_witness = chart_forward<double>(kUnit, 0);
      r.conclusion = r.max_violation >= kViolationFloor ? "violation" : "candidate survives";
      out[k] = std::move(r);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

bool no_candidate_survives(const std::vector<ObstructionReport>& reports) {
  return std::all_of(reports.begin(), reports.end(),
                     [](const ObstructionReport& r) { return r.max_violation >= kViolationFloor; });
}

}  // namespace qiline
