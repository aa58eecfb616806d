#include "qiline/generators.hpp"

#include <cmath>
#include <map>

#include "qiline/errors.hpp"
#include "qiline/eval.hpp"
#include "qiline/kernels.hpp"

namespace qiline {

GeneratorSpec GeneratorSpec::A(double t) {
  if (!(t > 0)) throw InvariantError("t must be > 0");
  GeneratorSpec g;
  g.kind = Kind::A;
  g.t = t;
  return g;
}

GeneratorSpec GeneratorSpec::B(double i, double s) {
  if (!(i >= 1)) throw InvariantError("i must be ≥ 1");
  GeneratorSpec g;
  g.kind = Kind::B;
  g.i = i;
  g.s = s;
  return g;
}

GeneratorSpec GeneratorSpec::a_log(double t) {
  GeneratorSpec g = A(t);
  g.kind = Kind::a;
  return g;
}

GeneratorSpec GeneratorSpec::b_log(double i, double s) {
  GeneratorSpec g = B(i, s);
  g.kind = Kind::b;
  return g;
}

GeneratorSpec GeneratorSpec::h_conj(GeneratorSpec inner) {
  GeneratorSpec g;
  g.kind = Kind::HConj;
  g.inner = std::make_shared<const GeneratorSpec>(std::move(inner));
  return g;
}

std::string GeneratorSpec::str() const {
  switch (kind) {
    case Kind::A: return "A(" + format_shortest(t) + ")";
    case Kind::B: return "B(" + format_shortest(i) + "," + format_shortest(s) + ")";
    case Kind::a: return "a(" + format_shortest(t) + ")";
    case Kind::b: return "b(" + format_shortest(i) + "," + format_shortest(s) + ")";
    case Kind::HConj: return "hConj(" + inner->str() + ")";
  }
  return "?";
}

MapExpr h_conjugate(const MapExpr& f) {
  MapExpr h = MapExpr::exp_glue();
  return MapExpr::compose(h, MapExpr::compose(f, MapExpr::inverse(h)));
}

MapExpr realize(const GeneratorSpec& g) {
  switch (g.kind) {
    case GeneratorSpec::Kind::A: return MapExpr::affine(g.t, 0);
    case GeneratorSpec::Kind::B: return MapExpr::power_shift(g.i, g.s);
    case GeneratorSpec::Kind::a: return MapExpr::affine(1, std::log(g.t));
    case GeneratorSpec::Kind::b: return MapExpr::log_power(g.i, g.s);
    case GeneratorSpec::Kind::HConj: return h_conjugate(realize(*g.inner));
  }
  throw InvariantError("unknown generator kind");
}

MapExpr identity_glued(const MapExpr& f, double at) {
  const auto& d = f.domain();
  return MapExpr::extend(f, d.full_line ? at : std::max(at, d.x0));
}

namespace {

MapExpr power(const MapExpr& g, int n) {
  MapExpr acc = g;
  for (int k = 1; k < n; ++k) acc = MapExpr::compose(acc, g);
  return acc;
}

MapExpr letter_power(const WordLetter& l) {
  if (l.exponent == 0) throw InvariantError("word exponents must be nonzero");
  const int n = std::abs(l.exponent);
  MapExpr base = l.gen.kind == GeneratorSpec::Kind::A ? MapExpr::affine(std::pow(l.gen.t, n), 0)
                                                      : power(realize(l.gen), n);
  return l.exponent > 0 ? base : MapExpr::inverse(base);
}

struct RelationSides {
  MapExpr lhs, rhs;
  std::optional<double> bound;
};

RelationSides sides(RelationId id, const RelationParams& p) {
  switch (id) {
    case RelationId::Conj: {
      MapExpr At = MapExpr::affine(p.t, 0);
      MapExpr lhs = At * MapExpr::power_shift(p.i, p.s1) * MapExpr::inverse(At);
      double s = p.s1 * std::pow(p.t, p.i / (p.i + 1));
      return {lhs, MapExpr::power_shift(p.i, s), std::nullopt};
    }
    case RelationId::AddB:
      return {MapExpr::power_shift(p.i, p.s1) * MapExpr::power_shift(p.i, p.s2),
              MapExpr::power_shift(p.i, p.s1 + p.s2), std::fabs(p.s1 * p.s2)};
    case RelationId::CommB:
      return {MapExpr::power_shift(p.i, p.s1) * MapExpr::power_shift(p.j, p.s2),
              MapExpr::power_shift(p.j, p.s2) * MapExpr::power_shift(p.i, p.s1),
              2 * std::fabs(p.s1 * p.s2)};
    case RelationId::MultA:
      return {MapExpr::affine(p.t, 0) * MapExpr::affine(p.t2, 0), MapExpr::affine(p.t * p.t2, 0),
              std::nullopt};
  }
  throw InvariantError("unknown relation");
}

}  // namespace

MapExpr word_realize(const WordSpec& w) {
  if (w.empty()) throw InvariantError("word must be nonempty");
  MapExpr acc = letter_power(w.front());
  for (std::size_t k = 1; k < w.size(); ++k) acc = MapExpr::compose(acc, letter_power(w[k]));
  return acc;
}

std::string to_string(RelationId id) {
  switch (id) {
    case RelationId::Conj: return "conj";
    case RelationId::AddB: return "addB";
    case RelationId::CommB: return "commB";
    case RelationId::MultA: return "multA";
  }
  return "?";
}

RelationId relation_from_string(const std::string& name) {
  for (auto id : {RelationId::Conj, RelationId::AddB, RelationId::CommB, RelationId::MultA})
    if (to_string(id) == name) return id;
  throw InvariantError("unknown relation '" + name + "'");
}

RelationReport verify_relation(RelationId id, const RelationParams& p, const SampleGrid& grid,
                               const EvalConfig& cfg) {
  grid.validate();
  if (grid.x0 < 1) throw PreconditionError("relation bounds are stated for x ≥ 1");
  if (id == RelationId::CommB && p.i == p.j) throw PreconditionError("commB needs i ≠ j");
  auto s = sides(id, p);
  auto xs = grid.points();
  // exact identities are measured in binary128 so rounding stays far below the tolerance
  EvalConfig run = cfg;
  if (!s.bound) run.precision_bits = kWideBits;
  auto gaps = kernels::differences(s.lhs, s.rhs, xs, run, kernels::Policy::Formula);
  Wide sup = 0;
  for (Wide g : gaps) sup = std::max(sup, fabsq(g));
  RelationReport r;
  r.id = id;
  r.params = p;
  r.measured_sup = static_cast<double>(sup);
  r.stated_bound = s.bound;
  r.pass = r.measured_sup <= s.bound.value_or(0) + kRelationSlack;
  return r;
}

std::vector<RelationReport> verify_all_relations(const SampleGrid& grid, const EvalConfig& cfg) {
  const double ts[] = {0.5, 2, 4};
  const double is[] = {1, 2, 5};
  const double ss[] = {-1, 1, 3};
  std::vector<std::pair<RelationId, RelationParams>> jobs;
  for (double t : ts)
    for (double i : is)
      for (double s : ss) {
        RelationParams p;
        p.t = t, p.i = i, p.s1 = s;
        jobs.emplace_back(RelationId::Conj, p);
      }
  for (double i : is)
    for (double s1 : ss)
      for (double s2 : ss) {
        RelationParams p;
        p.i = i, p.s1 = s1, p.s2 = s2;
        jobs.emplace_back(RelationId::AddB, p);
      }
  for (double i : is)
    for (double j : is) {
      if (i == j) continue;
      for (double s1 : ss)
        for (double s2 : ss) {
          RelationParams p;
          p.i = i, p.j = j, p.s1 = s1, p.s2 = s2;
          jobs.emplace_back(RelationId::CommB, p);
        }
    }
  for (double t : ts)
    for (double t2 : ts) {
      RelationParams p;
      p.t = t, p.t2 = t2;
      jobs.emplace_back(RelationId::MultA, p);
    }
  std::vector<RelationReport> out;
  out.reserve(jobs.size());
  for (const auto& [id, p] : jobs) out.push_back(verify_relation(id, p, grid, cfg));
  return out;
}

IndependenceResult independence_test(const WordSpec& w, const SampleGrid& grid,
                                     const EvalConfig& cfg) {
  if (w.empty()) throw PreconditionError("word must be nonempty");
  std::map<double, double> collected;
  std::vector<std::pair<double, double>> expanded;  // (i, s) per letter copy
  for (const auto& l : w) {
    if (l.gen.kind != GeneratorSpec::Kind::B)
      throw PreconditionError("independence words use B letters only");
    if (l.exponent == 0) throw PreconditionError("word exponents must be nonzero");
    collected[l.gen.i] += l.exponent * l.gen.s;
    for (int k = 0; k < std::abs(l.exponent); ++k) expanded.emplace_back(l.gen.i, l.gen.s);
  }
  IndependenceResult r;
  for (std::size_t a = 0; a < expanded.size(); ++a)
    for (std::size_t b = a + 1; b < expanded.size(); ++b)
      r.bound += (expanded[a].first == expanded[b].first ? 1 : 2) *
                 std::fabs(expanded[a].second * expanded[b].second);
  for (const auto& [i, c] : collected) {
    if (std::fabs(c) > 1e-12) {
      r.expected_exponent = 1 / (i + 1);
      break;
    }
  }

  MapExpr word = word_realize(w);
  SampleGrid g = within_domains(grid, {word.domain()});
  r.xs = g.points();
  r.displacements = kernels::displacements(word, r.xs, cfg);
  Wide mx = 0;
  for (Wide d : r.displacements) mx = std::max(mx, fabsq(d));
  r.max_displacement = static_cast<double>(mx);
  if (r.max_displacement < 10 * r.bound + 1e-9) return r;

  const std::size_t half = r.xs.size() / 2;
  r.verdict = IndependenceResult::Verdict::NontrivialExponent;
  r.exponent = loglog_slope(std::span<const Wide>(r.xs).subspan(half),
                            std::span<const Wide>(r.displacements).subspan(half));
  return r;
}

namespace {

const RationalPL& lift_pl(const MapExpr& lift) {
  const auto* p = lift.as<expr::PeriodicLift>();
  if (!p) throw PreconditionError("expected a periodic lift");
  return p->pl01;
}

}  // namespace

EscapeResult diffz_escape_check(const MapExpr& lift, const EvalConfig& cfg) {
  const RationalPL& pl = lift_pl(lift);
  EscapeResult r;
  Rational best = -1;
  for (int k = 0; k < kLiftSearchPoints; ++k) {
    Rational x(k, kLiftSearchPoints);
    Rational d = abs(pl(x) - x);
    if (d > best) {
      best = d;
      r.x_star = to_double(x);
      r.f_star = to_double(pl(x));
    }
  }
  if (best == 0) {
    r.vacuous = true;
    return r;
  }
  r.expected_constant = std::fabs(std::exp(r.f_star) - std::exp(r.x_star));
  MapExpr conj = h_conjugate(lift);
  EvalConfig wide = cfg;
  wide.precision_bits = std::max(cfg.precision_bits, kWideBits);
  r.escaped = true;
  for (int n = 1; n <= 20; ++n) {
    Wide y = expq(static_cast<Wide>(r.x_star) + n);
    Wide disp = fabsq(eval_wide(conj, y, wide) - y);
    double c = static_cast<double>(disp / expq(static_cast<Wide>(n)));
    r.growth.push_back(c);
    if (std::fabs(c - r.expected_constant) > 0.01 * r.expected_constant) r.escaped = false;
  }
  return r;
}

bool diffz_H_triviality_check(const MapExpr& lift, const SampleGrid& grid, const EvalConfig& cfg) {
  const RationalPL& pl = lift_pl(lift);
  if (pl.is_identity()) return true;
  return drift_classify(h_conjugate(lift), grid, cfg).kind != DriftClass::Kind::Sublinear;
}

}  // namespace qiline
