#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "qiline/actions.hpp"
#include "qiline/errors.hpp"
#include "qiline/eval.hpp"
#include "qiline/parse.hpp"

using namespace qiline;

namespace {

const MapExpr kShift1 = MapExpr::affine(1, 1);
const MapExpr kShiftR2 = MapExpr::affine(1, std::sqrt(2.0));

MapExpr conj(const MapExpr& k, const MapExpr& f) { return k * f * MapExpr::inverse(k); }

}  // namespace

TEST_CASE("translation numbers") {
  auto t = translation_number(kShift1, 0, 10000);
  CHECK(std::fabs(t.value - 1) <= 1e-9);
  CHECK(t.iterations == 10000);
  CHECK(t.error_estimate <= 1e-9);
  CHECK(translation_number(parse_map("a(2)"), 0, 1000).value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  // conjugation invariance
  for (const char* k : {"B(1,1)", "logshift(2)"}) {
    auto c = translation_number(conj(parse_map(k), kShift1), 1e6, 100000);
    CHECK_MESSAGE(std::fabs(c.value - 1) <= 1e-3, k);
  }
  CHECK_THROWS_AS(translation_number(MapExpr::affine(0.5, 1), 0, 1000), FixedPointError);
  try {
    translation_number(MapExpr::affine(0.5, 1), 0, 1000);
  } catch (const FixedPointError& e) {
    CHECK(e.location() == doctest::Approx(2).epsilon(1e-6));
  }
  CHECK_THROWS_AS(translation_number(MapExpr::power_shift(1, -4), 10, 10), PreconditionError);
}

TEST_CASE("translation number of a circle-map lift barely depends on the base point") {
  // for a lift, f^n(x) − x and f^n(y) − y differ by less than 1 when |x − y| < 1
  const long n = 20000;
  MapExpr f = parse_map("affine(1,1/3) * lift[0:0;1/2:3/4;1:1;]");
  double ref = translation_number(f, 0, n).value;
  for (double x0 : {0.3, 0.77, 5.0, 1e6}) CHECK(std::fabs(translation_number(f, x0, n).value - ref) <= 1.0 / n);
}

TEST_CASE("orbit") {
  auto o = orbit(kShift1, 0, 3);
  CHECK(o == std::vector<double>{0, 1, 2, 3});
  CHECK(orbit_csv(o) == "step,x\n0,0\n1,1\n2,2\n3,3\n");
}

TEST_CASE("Hölder homomorphism") {
  auto h = holder_homomorphism_check(kShift1, kShiftR2, 0, 10000);
  CHECK(h.additive);
  CHECK(h.residual <= 1e-9);
  auto sq = holder_homomorphism_check(kShift1, kShift1, 0, 10000);
  CHECK(sq.tau_gh == doctest::Approx(2).epsilon(1e-12));
  auto k = parse_map("B(1,1)");
  auto c = holder_homomorphism_check(conj(k, kShift1), conj(k, kShiftR2), 1e6, 100000);
  CHECK(c.residual <= kAdditivityTol);
  CHECK(c.additive);
  CHECK_THROWS_AS(holder_homomorphism_check(kShift1, MapExpr::affine(2, 1), 0, 100), PreconditionError);
}

TEST_CASE("semi-conjugacy") {
  auto one = build_semi_conjugacy({kShift1}, 0, 8, {1.0});
  CHECK(one.residual <= 1e-9);
  for (auto& [x, phi] : one.grid_points) CHECK(phi == doctest::Approx(x));
  auto two = build_semi_conjugacy({kShift1, kShiftR2}, 0, 6, 10000, 0);
  CHECK(two.residual <= 1e-3);
  for (std::size_t k = 1; k < two.grid_points.size(); ++k)
    CHECK(two.grid_points[k].second >= two.grid_points[k - 1].second);
  auto kk = parse_map("B(1,1)");
  auto c = build_semi_conjugacy({conj(kk, kShift1)}, 0, 10, {1.0});
  // x + √x amplifies the inversion error near 0 to about √ε
  CHECK(c.residual <= 1e-6);
  auto kinv = MapExpr::inverse(kk);
  int checked = 0;
  for (auto& [x, phi] : c.grid_points) {
    CHECK(phi == doctest::Approx(eval(kinv, x)).epsilon(1e-9));
    ++checked;
  }
  CHECK(checked >= 10);
  CHECK(semi_conjugacy_at(one, 2.5) == doctest::Approx(2.5));
  // x + 1 and x + 2 collide on the orbit of 0
  CHECK_THROWS_AS(build_semi_conjugacy({kShift1, MapExpr::affine(1, 2)}, 0, 3, {1.0, 2.0}), PreconditionError);
}

TEST_CASE("linearity test") {
  std::vector<std::pair<Rational, double>> lin, kink, taus;
  for (int m = -5; m <= 6; ++m) {
    Rational q(m, 3);
    if (m == 3) q = 1;
    double x = to_double(q);
    lin.push_back({q, 3 * x});
    kink.push_back({q, x + 0.5 * ((x > 2) - (x < 2))});
  }
  auto l = linearity_test(lin, 1e-12);
  CHECK(l.linear);
  CHECK(l.slope == 3);
  CHECK_FALSE(linearity_test(kink, 1e-3).linear);
  // τ on rational multiples of x + 1
  for (int m = 1; m <= 12; ++m) {
    Rational q(m, 4);
    double tau = translation_number(MapExpr::affine(1, to_double(q)), 0, 1000).value;
    taus.push_back({q, tau});
  }
  auto t = linearity_test(taus, 1e-9);
  CHECK(t.linear);
  CHECK(t.slope == doctest::Approx(1));
  lin.resize(5);
  CHECK_THROWS_AS(linearity_test(lin, 1e-3), PreconditionError);
}

TEST_CASE("injectivity obstruction") {
  auto [s, t] = injectivity_obstruction(1, 1);
  CHECK(s == doctest::Approx(std::sqrt(0.5)));
  CHECK(t == doctest::Approx(-std::sqrt(0.5)));
  auto [a, b] = injectivity_obstruction(2, 3);
  CHECK(a == doctest::Approx(3 / std::sqrt(13.0)));
  CHECK(b == doctest::Approx(-2 / std::sqrt(13.0)));
  auto [u, v] = injectivity_obstruction(std::log(2.0), std::log(3.0));
  CHECK(std::fabs(std::log(2.0) * u + std::log(3.0) * v) <= 1e-12);
  CHECK(std::hypot(u, v) == doctest::Approx(1));
  CHECK_THROWS_AS(injectivity_obstruction(0, 1), PreconditionError);
}

TEST_CASE("affine functional equation") {
  SampleGrid grid;
  CHECK(affine_functional_equation_residual(MapExpr::affine(1, -3), grid) == doctest::Approx(1));
  CHECK(affine_functional_equation_residual(MapExpr::affine(0.5, 0), grid) == 0);
  CHECK(affine_functional_equation_residual(MapExpr::affine(0.5, 7), grid) == 0);
  for (double b : {-3.0, 0.0, 0.5, 11.0}) CHECK(*exact_functional_equation_residual(MapExpr::affine(1, b), grid) == 1);
  CHECK(*exact_functional_equation_residual(MapExpr::affine(0.5, 7), grid) == 0);
  CHECK_FALSE(exact_functional_equation_residual(MapExpr::log_shift(1), grid).has_value());
}

TEST_CASE("contraction fixed point") {
  // |g(x) − x| ≤ 1e−9 with contraction 1/2 puts x within 2e−9 of the fixed point
  CHECK(std::fabs(contraction_fixed_point(MapExpr::affine(0.5, 0), 5).x) <= 2e-9);
  auto f = contraction_fixed_point(MapExpr::affine(0.5, 1), 0);
  CHECK(std::fabs(f.x - 2) <= 2e-9);
  CHECK(f.iterations <= 200);
  // L(x/2) with L the lift of slopes 5/4, 3/4; the fixed point solves x = 1/8 + 5x/8
  auto g = parse_map("lift[0:1/8;1/2:3/4;1:9/8;]") * MapExpr::affine(0.5, 0);
  auto p = contraction_fixed_point(g, 10);
  CHECK(std::fabs(p.x - 1.0 / 3) <= 2e-9);
  CHECK(std::fabs(eval(g, p.x) - p.x) <= 1e-9);
  CHECK_THROWS_AS(contraction_fixed_point(MapExpr::affine(1, 1), 0), PreconditionError);
}

TEST_CASE("diagonal embeddings") {
  ActionSpec act{{"T"}, {kShift1}, {}};
  auto one = diagonal_embed(act, {{0, 1}});
  const MapExpr& e = one.generators[0];
  for (double x : {-3.0, -0.5, 0.0, 1.0, 1.5, 7.0}) CHECK(eval(e, x) == x);
  for (double x : {0.1, 0.5, 0.9}) CHECK(eval(e, x) > x);
  CHECK(eval(e, 0.5) < 1);

  ActionSpec two{{"T", "S"}, {kShift1, kShiftR2}, {}};
  auto emb = diagonal_embed(two, {{0, 1}, {2, 3}});
  for (double x : {0.3, 0.7, 2.2, 2.9, 5.0}) {
    double gh = eval(emb.generators[0] * emb.generators[1], x);
    double hg = eval(emb.generators[1] * emb.generators[0], x);
    CHECK(std::fabs(gh - hg) <= 1e-12);
  }
  // τ in chart coordinates
  const ChartInterval c{0, 1};
  MapExpr pulled = MapExpr::affine(1, 0);
  double u = 0, steps = 1000;
  for (int k = 0; k < steps; ++k) u = chart_backward<double>(c, eval(e, chart_forward<double>(c, u)));
  CHECK(u / steps == doctest::Approx(1).epsilon(1e-3));
  CHECK_THROWS(diagonal_embed(act, {{0, 2}, {1, 3}}));
  CHECK_THROWS_AS(validate(ActionSpec{{"f"}, {MapExpr::power_shift(1, -4)}, {}}), InvariantError);
}

TEST_CASE("diagonal embedding preserves relations") {
  ActionSpec act{{"T", "S"}, {kShift1, kShiftR2}, {{{{0, 1}, {1, 1}}, {{1, 1}, {0, 1}}}, {{{0, 2}}, {{0, 1}, {0, 1}}}}};
  std::vector<double> xs;
  for (int k = -20; k <= 20; ++k) xs.push_back(0.15 * k);
  EvalConfig cfg;
  auto emb = diagonal_embed(act, {{0, 1}, {2, 3}});
  for (const auto& rel : act.relations) {
    REQUIRE(relation_residual(act, rel, xs, cfg) <= cfg.abs_tol);
    CHECK(relation_residual(emb, rel, xs, cfg) <= 10 * cfg.abs_tol);
  }
}

TEST_CASE("relation violation scan") {
  CHECK(relation_violation_scan(CandidateFamily::Translation, {}).empty());
  std::vector<CandidateParams> ps = {{0.5, -1, 0}, {1, 0.5, 0.5}, {2, 1, 2}};
  auto tr = relation_violation_scan(CandidateFamily::Translation, ps);
  REQUIRE(tr.size() == 3);
  CHECK(no_candidate_survives(tr));
  for (auto& r : tr) CHECK(r.residuals.size() == 5);
  // nonzero slopes give a kernel word that acts trivially
  CHECK(tr[1].residuals.back().second == 1);
  auto fp = relation_violation_scan(CandidateFamily::FixedPoint, ps);
  for (auto& r : fp) {
    CHECK(r.residuals.front().first == "conj");
    CHECK(r.fixed_point_witness.has_value());
  }
  CHECK(fp[2].residuals.front().second >= 0.1);
  CHECK(to_string(CandidateFamily::FixedPoint) == "fixed-point");
}
