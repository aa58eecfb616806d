#include "qiline/eval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qiline/errors.hpp"

namespace qiline {

namespace {

template <class Real>
double as_double(Real x) {
  return static_cast<double>(x);
}

template <class Real>
[[noreturn]] void undefined_at(const char* what, Real x) {
  throw DomainError(std::string(what) + " undefined at x = " + format17(as_double(x)));
}

template <class Real>
Real finite_or_throw(Real v, const char* what, Real x) {
  if (!num::isfinite(v)) undefined_at(what, x);
  return v;
}

// Value together with displacement. Displacements are propagated through the
// tree rather than recovered as value − x, which would cancel at large x.
template <class Real>
struct Moved {
  Real value;
  Real disp;
};

template <class Real>
Moved<Real> eval_moved(const MapExpr& f, Real x, const EvalConfig& cfg);

template <class Real>
Real eval_node(const MapExpr& f, Real x, const EvalConfig& cfg) {
  return eval_moved<Real>(f, x, cfg).value;
}

template <class Real>
Moved<Real> shifted(Real x, Real d) {
  return {x + d, d};
}

template <class Real>
Moved<Real> direct(Real x, Real v) {
  return {v, v - x};
}

template <class Real>
Moved<Real> eval_inverse(const MapExpr& inner, Real target, const EvalConfig& cfg) {
  const int orient = inner.orientation();
  std::function<Real(Real)> fn = [&](Real y) {
    Real v = eval_node<Real>(inner, y, cfg);
    return orient > 0 ? v : -v;
  };
  const auto& d = inner.domain();
  Real t = orient > 0 ? target : -target;
  Real lower = static_cast<Real>(d.x0);
  Real seed = orient > 0 ? target : -target;
  if (!d.full_line && seed < lower) seed = lower;
  Real y = solve_increasing<Real>(fn, t, seed, !d.full_line, lower, cfg);
  if (orient < 0) return direct(target, y);
  // f⁻¹(t) − t = −(f(y) − y) at y = f⁻¹(t)
  return {y, -eval_moved<Real>(inner, y, cfg).disp};
}

template <class Real>
Moved<Real> eval_moved(const MapExpr& f, Real x, const EvalConfig& cfg) {
  using namespace expr;
  return std::visit(
      [&](const auto& v) -> Moved<Real> {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Identity>) {
          return {x, 0};
        } else if constexpr (std::is_same_v<T, Affine>) {
          Real a = static_cast<Real>(v.a), b = static_cast<Real>(v.b);
          return {a * x + b, (a - 1) * x + b};
        } else if constexpr (std::is_same_v<T, PowerShift>) {
          if (x <= 0) return {x, 0};
          Real e = Real(1) / (static_cast<Real>(v.i) + 1);
          return shifted(x, static_cast<Real>(v.s) * num::pow(x, e));
        } else if constexpr (std::is_same_v<T, LogShift>) {
          if (x <= 0) return {x, 0};
          return shifted(x, static_cast<Real>(v.s) * num::log1p(x));
        } else if constexpr (std::is_same_v<T, LogPower>) {
          // ln(e^x + s·e^{x/(i+1)}) without forming e^x
          Real ip1 = static_cast<Real>(v.i) + 1;
          Real s = static_cast<Real>(v.s);
          Real q = x * static_cast<Real>(v.i) / ip1;
          Real d;
          if (q >= 0) {
            Real arg = s * num::exp(-q);
            if (arg <= -1) undefined_at("b(i,s)", x);
            d = num::log1p(arg);
          } else {
            Real arg = num::exp(q) + s;
            if (arg <= 0) undefined_at("b(i,s)", x);
            d = num::log(arg) - q;
          }
          return shifted(x, finite_or_throw(d, "b(i,s)", x));
        } else if constexpr (std::is_same_v<T, ExpGlue>) {
          Real r;
          if (x >= 1) {
            r = num::exp(x);
          } else if (x <= -1) {
            r = -num::exp(-x);
          } else {
            r = num::exp(Real(1)) * x;
          }
          return direct(x, r);  // may overflow to inf; inverse bracketing relies on that
        } else if constexpr (std::is_same_v<T, Reflect>) {
          return {-x, -2 * x};
        } else if constexpr (std::is_same_v<T, PLRef>) {
          return shifted(x, v.pl.template displacement<Real>(x));
        } else if constexpr (std::is_same_v<T, PeriodicLift>) {
          Real k = num::floor(x);
          Real u = x - k;
          return shifted(x, v.pl01.template eval<Real>(u) - u);
        } else if constexpr (std::is_same_v<T, Compose>) {
          auto inner = eval_moved<Real>(v.right, x, cfg);
          auto outer = eval_moved<Real>(v.left, inner.value, cfg);
          return {outer.value, inner.disp + outer.disp};
        } else if constexpr (std::is_same_v<T, Inverse>) {
          return eval_inverse<Real>(v.inner, x, cfg);
        } else if constexpr (std::is_same_v<T, Extend>) {
          Real at = static_cast<Real>(v.at);
          if (x >= at) return eval_moved<Real>(v.inner, x, cfg);
          return shifted(x, eval_moved<Real>(v.inner, at, cfg).disp);
        } else {
          for (const auto& c : v.charts) {
            if (x > static_cast<Real>(c.lo) && x < static_cast<Real>(c.hi)) {
              Real u = chart_backward<Real>(c, x);
              return direct(x, chart_forward<Real>(c, eval_node<Real>(v.inner, u, cfg)));
            }
          }
          return {x, 0};
        }
      },
      f.node().v);
}

template <class Real>
void check_domain(const MapExpr& f, Real x) {
  const auto& d = f.domain();
  if (d.full_line) return;
  if (x < static_cast<Real>(d.x0)) {
    std::ostringstream os;
    os << "x = " << format17(as_double(x)) << " lies below the germ domain [" << format17(d.x0)
       << ", inf) of " << f.str();
    throw DomainError(os.str());
  }
}

}  // namespace

template <class Real>
Real solve_increasing(const std::function<Real(Real)>& fn, Real target, Real seed,
                      bool bounded_below, Real lower, const EvalConfig& cfg) {
  const Real growth = static_cast<Real>(cfg.bracket_growth);
  Real lo = seed, hi = seed;
  Real value = fn(seed);
  if (value == target) return seed;
  // bracketing never needs more steps than the exponent range allows
  constexpr int kMaxBracketSteps = 20000;
  if (value < target) {
    Real step = std::max(Real(1), num::fabs(seed));
    int steps = 0;
    for (;;) {
      hi = seed + step;
      if (!num::isfinite(hi)) throw ConvergenceError("bracket overflow while inverting");
      if (fn(hi) >= target) break;
      lo = hi;
      step *= growth;
      if (++steps > kMaxBracketSteps) throw ConvergenceError("bracket search did not terminate");
    }
  } else {
    if (bounded_below && fn(lower) > target)
      throw DomainError("value " + format17(as_double(target)) +
                        " lies outside the image of the germ domain");
    Real step = std::max(Real(1), num::fabs(seed));
    int steps = 0;
    for (;;) {
      lo = seed - step;
      if (bounded_below && lo <= lower) {
        lo = lower;
        break;
      }
      if (!num::isfinite(lo)) throw ConvergenceError("bracket overflow while inverting");
      if (fn(lo) <= target) break;
      hi = lo;
      step *= growth;
      if (++steps > kMaxBracketSteps) throw ConvergenceError("bracket search did not terminate");
    }
  }

  const Real rel = std::min(static_cast<Real>(cfg.abs_tol), 8 * num::epsilon<Real>());
  for (int it = 0; it < cfg.max_bisect_iters; ++it) {
    Real mid = lo + (hi - lo) / 2;
    if (!(mid > lo && mid < hi)) return mid;
    Real scale = std::max(Real(1), num::fabs(mid));
    if (hi - lo <= rel * scale) return mid;
    if (fn(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw ConvergenceError("bisection did not converge within " +
                         std::to_string(cfg.max_bisect_iters) + " iterations");
}

template double solve_increasing<double>(const std::function<double(double)>&, double, double,
                                         bool, double, const EvalConfig&);
template Wide solve_increasing<Wide>(const std::function<Wide(Wide)>&, Wide, Wide, bool, Wide,
                                     const EvalConfig&);

template <class Real>
Real eval_formula(const MapExpr& f, Real x, const EvalConfig& cfg) {
  return finite_or_throw(eval_node<Real>(f, x, cfg), "value overflows;", x);
}

template double eval_formula<double>(const MapExpr&, double, const EvalConfig&);
template Wide eval_formula<Wide>(const MapExpr&, Wide, const EvalConfig&);

template <class Real>
Real displacement_formula(const MapExpr& f, Real x, const EvalConfig& cfg) {
  auto m = eval_moved<Real>(f, x, cfg);
  finite_or_throw(m.value, "value overflows;", x);
  return finite_or_throw(m.disp, "displacement overflows;", x);
}

template double displacement_formula<double>(const MapExpr&, double, const EvalConfig&);
template Wide displacement_formula<Wide>(const MapExpr&, Wide, const EvalConfig&);

double displacement(const MapExpr& f, double x, const EvalConfig& cfg) {
  check_domain(f, x);
  return displacement_formula<double>(f, x, cfg);
}

Wide displacement_wide(const MapExpr& f, Wide x, const EvalConfig& cfg) {
  check_domain(f, x);
  return displacement_formula<Wide>(f, x, cfg);
}

double eval(const MapExpr& f, double x, const EvalConfig& cfg) {
  check_domain(f, x);
  return finite_or_throw(eval_node<double>(f, x, cfg), "value overflows;", x);
}

Wide eval_wide(const MapExpr& f, Wide x, const EvalConfig& cfg) {
  check_domain(f, x);
  return finite_or_throw(eval_node<Wide>(f, x, cfg), "value overflows;", x);
}

double derivative_est(const MapExpr& f, double x, double h, const EvalConfig& cfg) {
  if (!(h > 0)) throw InvariantError("step h must be positive");
  check_domain(f, x - h);
  if (use_wide(cfg, std::fabs(x) + h)) {
    Wide hw = h;
    Wide xw = x;
    Wide d = (eval_node<Wide>(f, xw + hw, cfg) - eval_node<Wide>(f, xw - hw, cfg)) / (2 * hw);
    return static_cast<double>(d);
  }
  return (eval_node<double>(f, x + h, cfg) - eval_node<double>(f, x - h, cfg)) / (2 * h);
}

MapExpr normalize_origin(const MapExpr& f, const EvalConfig& cfg) {
  if (!f.domain().full_line) throw PreconditionError("normalize_origin needs a full-line map");
  if (f.as<expr::Identity>()) return f;
  if (const auto* a = f.as<expr::Affine>()) return MapExpr::affine(a->a, 0);
  if (const auto* p = f.as<expr::PLRef>()) return MapExpr::pl(pl_normalize_origin(p->pl));
  double f0 = eval(f, 0.0, cfg);
  if (f0 == 0) return f;
  return MapExpr::compose(MapExpr::affine(1, -f0), f);
}

MapExpr reflect_conjugate(const MapExpr& f) {
  if (!f.domain().full_line) throw PreconditionError("reflect_conjugate needs a full-line map");
  if (f.as<expr::Identity>()) return f;
  if (const auto* a = f.as<expr::Affine>()) return MapExpr::affine(a->a, -a->b);
  if (const auto* p = f.as<expr::PLRef>()) return MapExpr::pl(pl_reflect(p->pl));
  if (f.as<expr::Reflect>()) return f;
  // t ∘ (t ∘ g ∘ t) ∘ t = g
  if (const auto* c = f.as<expr::Compose>()) {
    const auto* inner = c->right.as<expr::Compose>();
    if (c->left.as<expr::Reflect>() && inner && inner->right.as<expr::Reflect>()) return inner->left;
  }
  return MapExpr::compose(MapExpr::reflect(), MapExpr::compose(f, MapExpr::reflect()));
}

template <class Real>
Real chart_forward(const ChartInterval& c, Real u) {
  Real lo = static_cast<Real>(c.lo), hi = static_cast<Real>(c.hi);
  return lo + (hi - lo) * (Real(0.5) + num::atan(u) / num::pi<Real>());
}

template <class Real>
Real chart_backward(const ChartInterval& c, Real x) {
  Real lo = static_cast<Real>(c.lo), hi = static_cast<Real>(c.hi);
  return num::tan(num::pi<Real>() * ((x - lo) / (hi - lo) - Real(0.5)));
}

template double chart_forward<double>(const ChartInterval&, double);
template Wide chart_forward<Wide>(const ChartInterval&, Wide);
template double chart_backward<double>(const ChartInterval&, double);
template Wide chart_backward<Wide>(const ChartInterval&, Wide);

bool use_wide(const EvalConfig& cfg, double grid_max) {
  validate(cfg);
  return cfg.precision_bits > kStandardBits || grid_max > kStandardGridCap;
}

}  // namespace qiline
