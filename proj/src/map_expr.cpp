#include "qiline/map_expr.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "qiline/errors.hpp"
#include "qiline/eval.hpp"

namespace qiline {

namespace {

std::shared_ptr<const MapNode> make_node(expr::Variant v, GermDomain d, int orientation = 1) {
  auto n = std::make_shared<MapNode>();
  n->v = std::move(v);
  n->domain = d;
  n->orientation = orientation;
  return n;
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw InvariantError(std::string(what) + " must be finite");
}

void require_shift_index(double i) {
  require_finite(i, "i");
  if (i < 1) throw InvariantError("i must be ≥ 1");
}

// Smallest x ≥ lower (or any x when unbounded) with f(x) ≥ target, f increasing.
double pull_back(const MapExpr& f, double target) {
  EvalConfig cfg;
  const auto& d = f.domain();
  if (!d.full_line && eval_formula<double>(f, d.x0, cfg) >= target) return d.x0;
  std::function<double(double)> fn = [&](double y) { return eval_formula<double>(f, y, cfg); };
  double seed = d.full_line ? target : std::max(target, d.x0);
  return solve_increasing<double>(fn, target, seed, !d.full_line, d.x0, cfg);
}

}  // namespace

void validate(const EvalConfig& cfg) {
  if (!(cfg.abs_tol > 0)) throw InvariantError("absTol must be positive");
  if (cfg.max_bisect_iters <= 0) throw InvariantError("maxBisectIters must be positive");
  if (!(cfg.bracket_growth > 1)) throw InvariantError("bracketGrowth must exceed 1");
  if (cfg.precision_bits <= 0) throw InvariantError("precisionBits must be positive");
  if (cfg.precision_bits > kWideBits)
    throw InvariantError("precisionBits above " + std::to_string(kWideBits) + " is not supported");
}

MapExpr::MapExpr() : MapExpr(identity()) {}

MapExpr MapExpr::identity() { return MapExpr(make_node(expr::Identity{}, {0, true})); }

MapExpr MapExpr::affine(double a, double b) {
  require_finite(a, "a");
  require_finite(b, "b");
  if (a <= 0) throw InvariantError("affine slope a must be > 0");
  return MapExpr(make_node(expr::Affine{a, b}, {0, true}));
}

MapExpr MapExpr::power_shift(double i, double s) {
  require_shift_index(i);
  require_finite(s, "s");
  if (s >= 0) return MapExpr(make_node(expr::PowerShift{i, s}, {0, true}));
  // derivative 1 + s/(i+1)·x^{−i/(i+1)} vanishes at (−s/(i+1))^{(i+1)/i}
  double critical = std::pow(-s / (i + 1), (i + 1) / i);
  return MapExpr(make_node(expr::PowerShift{i, s}, {2 * critical, false}));
}

MapExpr MapExpr::log_shift(double s) {
  require_finite(s, "s");
  if (s >= 0) return MapExpr(make_node(expr::LogShift{s}, {0, true}));
  // derivative 1 + s/(1+x) vanishes at x = −s − 1
  return MapExpr(make_node(expr::LogShift{s}, {std::max(0.0, 2 * (-s - 1)), false}));
}

MapExpr MapExpr::log_power(double i, double s) {
  require_shift_index(i);
  require_finite(s, "s");
  if (s >= 0) return MapExpr(make_node(expr::LogPower{i, s}, {0, true}));
  // e^{x·i/(i+1)} must exceed −s; keep a factor 2 margin
  double x0 = (i + 1) / i * (std::log(-s) + std::log(2.0));
  return MapExpr(make_node(expr::LogPower{i, s}, {x0, false}));
}

MapExpr MapExpr::exp_glue() { return MapExpr(make_node(expr::ExpGlue{}, {0, true})); }

MapExpr MapExpr::reflect() { return MapExpr(make_node(expr::Reflect{}, {0, true}, -1)); }

MapExpr MapExpr::pl(RationalPL pl) {
  return MapExpr(make_node(expr::PLRef{std::move(pl)}, {0, true}));
}

MapExpr MapExpr::periodic_lift(RationalPL pl01) {
  if (pl01(1) != pl01(0) + 1)
    throw InvariantError("periodic lift must satisfy f(1) = f(0) + 1");
  return MapExpr(make_node(expr::PeriodicLift{std::move(pl01)}, {0, true}));
}

MapExpr MapExpr::compose(MapExpr left, MapExpr right) {
  const auto& dl = left.domain();
  const auto& dr = right.domain();
  int orientation = left.orientation() * right.orientation();
  GermDomain d;
  if (dl.full_line) {
    d = dr;
  } else if (right.orientation() < 0) {
    throw InvariantError("composition " + left.str() + " * " + right.str() +
                         " has no germ at +infinity");
  } else {
    d.full_line = false;
    d.x0 = pull_back(right, dl.x0);
    if (!dr.full_line) d.x0 = std::max(d.x0, dr.x0);
  }
  return MapExpr(make_node(expr::Compose{std::move(left), std::move(right)}, d, orientation));
}

MapExpr MapExpr::inverse(MapExpr inner) {
  GermDomain d{0, true};
  if (!inner.domain().full_line) {
    d.full_line = false;
    d.x0 = eval_formula<double>(inner, inner.domain().x0, EvalConfig{});
  }
  int orientation = inner.orientation();
  return MapExpr(make_node(expr::Inverse{std::move(inner)}, d, orientation));
}

MapExpr MapExpr::extend(MapExpr inner, double at) {
  require_finite(at, "glue point");
  if (inner.orientation() < 0) throw InvariantError("extend needs an increasing map");
  if (!inner.domain().full_line && at < inner.domain().x0)
    throw InvariantError("glue point lies below the germ domain");
  return MapExpr(make_node(expr::Extend{std::move(inner), at}, {0, true}));
}

MapExpr MapExpr::diagonal(std::vector<ChartInterval> charts, MapExpr inner) {
  if (charts.empty()) throw InvariantError("diagonal embedding needs at least one interval");
  if (!inner.domain().full_line || inner.orientation() < 0)
    throw InvariantError("diagonal embedding needs an increasing full-line map");
  std::sort(charts.begin(), charts.end(),
            [](const ChartInterval& a, const ChartInterval& b) { return a.lo < b.lo; });
  for (std::size_t k = 0; k < charts.size(); ++k) {
    require_finite(charts[k].lo, "interval end");
    require_finite(charts[k].hi, "interval end");
    if (!(charts[k].lo < charts[k].hi)) throw InvariantError("interval must have lo < hi");
    if (k > 0 && charts[k].lo < charts[k - 1].hi)
      throw InvariantError("diagonal intervals overlap");
  }
  return MapExpr(make_node(expr::Diagonal{std::move(charts), std::move(inner)}, {0, true}));
}

GermDomain germ_domain(const MapExpr& f) { return f.domain(); }

std::vector<MapExpr> flatten_compose(const MapExpr& f) {
  std::vector<MapExpr> out;
  std::function<void(const MapExpr&)> walk = [&](const MapExpr& g) {
    if (const auto* c = g.as<expr::Compose>()) {
      walk(c->left);
      walk(c->right);
    } else {
      out.push_back(g);
    }
  };
  walk(f);
  return out;
}

namespace {

std::string pl_body(const RationalPL& pl) {
  std::string s;
  for (const auto& b : pl.breakpoints())
    s += format_rational(b.x) + ":" + format_rational(b.y) + ";";
  return s;
}

std::string lift_body(const RationalPL& pl) {
  std::vector<Rational> xs{Rational(0)};
  for (const auto& b : pl.breakpoints())
    if (b.x > 0 && b.x < 1) xs.push_back(b.x);
  xs.push_back(Rational(1));
  std::string s;
  for (const auto& x : xs) s += format_rational(x) + ":" + format_rational(pl(x)) + ";";
  return s;
}

std::string term_str(const MapExpr& f) {
  using namespace expr;
  return std::visit(
      [&](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        const auto num = format_shortest;
        if constexpr (std::is_same_v<T, Identity>) {
          return "id";
        } else if constexpr (std::is_same_v<T, Affine>) {
          if (v.b == 0) return "A(" + num(v.a) + ")";
          return "affine(" + num(v.a) + "," + num(v.b) + ")";
        } else if constexpr (std::is_same_v<T, PowerShift>) {
          return "B(" + num(v.i) + "," + num(v.s) + ")";
        } else if constexpr (std::is_same_v<T, LogShift>) {
          return "logshift(" + num(v.s) + ")";
        } else if constexpr (std::is_same_v<T, LogPower>) {
          return "b(" + num(v.i) + "," + num(v.s) + ")";
        } else if constexpr (std::is_same_v<T, ExpGlue>) {
          return "h";
        } else if constexpr (std::is_same_v<T, Reflect>) {
          return "refl";
        } else if constexpr (std::is_same_v<T, PLRef>) {
          return "pl[" + pl_body(v.pl) + "slopes(" + format_rational(v.pl.left_slope()) + "," +
                 format_rational(v.pl.right_slope()) + ")]";
        } else if constexpr (std::is_same_v<T, PeriodicLift>) {
          return "lift[" + lift_body(v.pl01) + "]";
        } else if constexpr (std::is_same_v<T, Compose>) {
          return f.str();
        } else if constexpr (std::is_same_v<T, Inverse>) {
          return "inv(" + v.inner.str() + ")";
        } else if constexpr (std::is_same_v<T, Extend>) {
          return "ext(" + v.inner.str() + "," + num(v.at) + ")";
        } else {
          std::string s = "diag[";
          for (const auto& c : v.charts) s += num(c.lo) + "," + num(c.hi) + ";";
          return s + "](" + v.inner.str() + ")";
        }
      },
      f.node().v);
}

}  // namespace

std::string MapExpr::str() const {
  if (!as<expr::Compose>()) return term_str(*this);
  std::string s;
  for (const auto& factor : flatten_compose(*this)) {
    if (!s.empty()) s += " * ";
    s += term_str(factor);
  }
  return s;
}

}  // namespace qiline
