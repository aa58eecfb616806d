#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "qiline/errors.hpp"
#include "qiline/eval.hpp"
#include "qiline/parse.hpp"

using namespace qiline;

namespace {

RationalPL pl(std::vector<std::pair<Rational, Rational>> pts, Rational l, Rational r) {
  std::vector<RationalPL::Breakpoint> b;
  for (auto& [x, y] : pts) b.push_back({x, y});
  return RationalPL(b, l, r);
}

// Random PL homeomorphism with breakpoints in [-5, 5] and slopes in {1/3, 1/2, 1, 2, 3}.
RationalPL random_pl(std::mt19937& rng) {
  const Rational slopes[] = {Rational(1, 3), Rational(1, 2), 1, 2, 3};
  std::uniform_int_distribution<int> nbreaks(1, 4), pick(0, 4), xs(-20, 20);
  std::vector<int> cuts;
  while (static_cast<int>(cuts.size()) < nbreaks(rng)) {
    int c = xs(rng);
    if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<RationalPL::Breakpoint> b;
  Rational y = Rational(xs(rng), 4);
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    Rational x(cuts[k], 4);
    if (k > 0) y += slopes[pick(rng)] * (x - b.back().x);
    b.push_back({x, y});
  }
  return RationalPL(b, slopes[pick(rng)], slopes[pick(rng)]);
}

const char* kSample[] = {"id",          "A(2)",          "A(1/2)",          "B(1,1)",
                         "B(2,3)",      "B(1,-1)",       "logshift(1)",     "logshift(-1)",
                         "b(1,1)",      "h",             "a(2)",            "affine(3,1)",
                         "A(2)*B(1,1)", "inv(B(1,1))",   "B(1,1)*inv(A(2))", "lift[0:0;1/2:3/4;1:1;]"};

}  // namespace

TEST_CASE("parse_map builds the documented trees") {
  CHECK(parse_map("A(2)") == MapExpr::affine(2, 0));
  auto f = parse_map("A(2) * inv(B(1,1))");
  const auto* c = f.as<expr::Compose>();
  REQUIRE(c);
  CHECK(c->left == MapExpr::affine(2, 0));
  REQUIRE(c->right.as<expr::Inverse>());
  CHECK(c->right.as<expr::Inverse>()->inner == MapExpr::power_shift(1, 1));
  CHECK(parse_map("a(1)") == MapExpr::affine(1, 0));
  CHECK(parse_map("A(1/4)") == MapExpr::affine(0.25, 0));
}

TEST_CASE("parse_map reports invariant violations and syntax errors with positions") {
  try {
    parse_map("B(0.5, 1)");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.detail() == "i must be ≥ 1");
    CHECK(e.position() == 0);
  }
  try {
    parse_map("A(2) * A(0)");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 7);
  }
  try {
    parse_map("A(2");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 3);
  }
  CHECK_THROWS_AS(parse_map("frob(1)"), ParseError);
  CHECK_THROWS_AS(parse_map("A(2) *"), ParseError);
  CHECK_THROWS_AS(parse_map("A(1/0)"), ParseError);
  CHECK_THROWS_AS(parse_map("lift[0:0;1/2:1/4;1:3/2;]"), ParseError);  // not periodic
  CHECK_THROWS_AS(parse_map("pl[0:0;1:0;slopes(1,1)]"), ParseError);   // not increasing
}

TEST_CASE("canonical printing round-trips") {
  for (const char* s : kSample) {
    MapExpr f = parse_map(s);
    MapExpr g = parse_map(f.str());
    CHECK_MESSAGE(f == g, s);
    CHECK(g.str() == f.str());
  }
  CHECK(parse_map("A( 2 )*B(1, 1)").str() == "A(2) * B(1,1)");
  CHECK(parse_map("pl[0:3;slopes(1,1)]").str() == "pl[0:3;slopes(1,1)]");
}

TEST_CASE("germ domains") {
  auto id = germ_domain(MapExpr::identity());
  CHECK(id.full_line);
  CHECK(id.x0 == 0);
  CHECK(germ_domain(MapExpr::power_shift(1, 1)).x0 == 0);
  // root of 1 − 2x^{−1/2} is 4, safety factor 2
  auto d = germ_domain(MapExpr::power_shift(1, -4));
  CHECK_FALSE(d.full_line);
  CHECK(d.x0 == doctest::Approx(8).epsilon(1e-12));
  CHECK(germ_domain(MapExpr::affine(2, 1)).full_line);
  CHECK(germ_domain(MapExpr::exp_glue()).full_line);
  CHECK(germ_domain(MapExpr::reflect()).full_line);
  // composition pulls the left domain back through the right factor
  auto comp = germ_domain(MapExpr::power_shift(1, -4) * MapExpr::affine(2, 0));
  CHECK(comp.x0 == doctest::Approx(4).epsilon(1e-12));
}

TEST_CASE("eval matches closed forms") {
  CHECK(eval(MapExpr::affine(2, 0), 3) == 6);
  CHECK(eval(MapExpr::power_shift(1, 1), 4) == 6);
  CHECK(eval(MapExpr::inverse(MapExpr::affine(2, 0)), 6) == doctest::Approx(3).epsilon(1e-14));
  CHECK(eval(MapExpr::exp_glue(), 0.5) == doctest::Approx(1.3591409142295225).epsilon(1e-15));
  CHECK(eval(MapExpr::exp_glue(), 2) == doctest::Approx(std::exp(2.0)).epsilon(1e-15));
  CHECK(eval(MapExpr::exp_glue(), -2) == doctest::Approx(-std::exp(2.0)).epsilon(1e-15));
  CHECK(eval(MapExpr::log_shift(1), std::exp(1.0) - 1) == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
  // b(i,s)(x) = ln(e^x + s e^{x/(i+1)})
  CHECK(eval(MapExpr::log_power(1, 1), std::log(4.0)) == doctest::Approx(std::log(6.0)).epsilon(1e-15));
  CHECK(eval(MapExpr::log_power(1, 1), -3) ==
        doctest::Approx(std::log(std::exp(-3.0) + std::exp(-1.5))).epsilon(1e-14));
  CHECK(eval(MapExpr::reflect(), 2) == -2);
  CHECK(eval(parse_map("lift[0:0;1/2:3/4;1:1;]"), 3.5) == 3.75);
}

TEST_CASE("eval errors") {
  CHECK_THROWS_AS(eval(MapExpr::power_shift(1, -4), 1), DomainError);
  EvalConfig cfg;
  cfg.max_bisect_iters = 3;
  CHECK_THROWS_AS(eval(MapExpr::inverse(MapExpr::power_shift(1, 1)), 100, cfg), ConvergenceError);
  EvalConfig bad;
  bad.abs_tol = 0;
  CHECK_THROWS_AS(validate(bad), InvariantError);
  bad = {};
  bad.precision_bits = 200;
  CHECK_THROWS_AS(validate(bad), InvariantError);
  bad = {};
  bad.bracket_growth = 1;
  CHECK_THROWS_AS(validate(bad), InvariantError);
}

TEST_CASE("derivative_est") {
  CHECK(derivative_est(MapExpr::affine(3, 1), 10, 1e-4) == doctest::Approx(3).epsilon(1e-9));
  // 1 + 1/(2√4)
  CHECK(std::fabs(derivative_est(MapExpr::power_shift(1, 1), 4, 1e-4) - 1.25) <= 1e-6);
  CHECK(derivative_est(MapExpr::identity(), -7, 1e-3) == doctest::Approx(1));
  CHECK_THROWS_AS(derivative_est(MapExpr::power_shift(1, -4), 8, 1e-3), DomainError);
}

TEST_CASE("normalize_origin") {
  CHECK(normalize_origin(MapExpr::affine(2, 5)) == MapExpr::affine(2, 0));
  CHECK(normalize_origin(MapExpr::identity()) == MapExpr::identity());
  auto p = pl({{0, 3}, {1, 5}}, 1, 1);
  auto n = normalize_origin(MapExpr::pl(p));
  CHECK(n == MapExpr::pl(pl({{0, 0}, {1, 2}}, 1, 1)));
  auto g = normalize_origin(MapExpr::log_power(1, 1));
  CHECK(std::fabs(eval(g, 0)) <= 1e-15);
  CHECK_THROWS_AS(normalize_origin(MapExpr::power_shift(1, -4)), PreconditionError);
}

TEST_CASE("exact PL composition and inversion") {
  auto id = RationalPL::identity();
  auto g = pl({{0, 0}, {2, 1}}, 2, 3);
  CHECK(pl_compose(id, g) == g);
  CHECK(pl_compose(g, id) == g);
  auto a = pl({{0, 0}}, 1, 2), b = pl({{0, 0}}, 1, 3);
  auto ab = pl_compose(a, b);
  CHECK(ab == pl({{0, 0}}, 1, 6));
  CHECK(pl_compose(g, pl_invert(g)).is_identity());
  CHECK(pl_invert(id) == id);
  CHECK(pl_invert(RationalPL::linear(2, 0)) == RationalPL::linear(Rational(1, 2), 0));
  CHECK(pl_invert(pl_invert(g)) == g);
  CHECK(pl_invert(g).breakpoints().front().x == 0);
  CHECK(pl_invert(g).breakpoints().back().x == 1);
  CHECK(pl_invert(g).left_slope() == Rational(1, 2));
  // breakpoint count bound
  CHECK(ab.breakpoints().size() <= a.breakpoints().size() + b.breakpoints().size());
}

TEST_CASE("PL group axioms hold exactly on random maps") {
  std::mt19937 rng(7);
  for (int k = 0; k < 100; ++k) {
    auto f = random_pl(rng), g = random_pl(rng), h = random_pl(rng);
    CHECK(pl_compose(pl_compose(f, g), h) == pl_compose(f, pl_compose(g, h)));
    CHECK(pl_compose(f, pl_invert(f)).is_identity());
    CHECK(pl_compose(pl_invert(f), f).is_identity());
    CHECK(pl_compose(f, RationalPL::identity()) == f);
    CHECK(pl_compose(f, g).breakpoints().size() <= f.breakpoints().size() + g.breakpoints().size());
    // numeric evaluation agrees with the exact one
    for (int j = -12; j <= 12; ++j) {
      Rational x(j, 3);
      double exact = to_double(f(x));
      CHECK(eval(MapExpr::pl(f), to_double(x)) == doctest::Approx(exact).epsilon(1e-12));
    }
  }
}

TEST_CASE("reflect_conjugate") {
  CHECK(reflect_conjugate(MapExpr::identity()) == MapExpr::identity());
  CHECK(reflect_conjugate(MapExpr::affine(2, 0)) == MapExpr::affine(2, 0));
  CHECK(reflect_conjugate(MapExpr::affine(1, 5)) == MapExpr::affine(1, -5));
  auto f = MapExpr::log_power(1, 1);
  auto tt = reflect_conjugate(reflect_conjugate(f));
  for (double x : {-5.0, -1.0, 0.0, 2.0, 7.5}) CHECK(eval(tt, x) == doctest::Approx(eval(f, x)).epsilon(1e-15));
  auto t = reflect_conjugate(f);
  CHECK(eval(t, 3) == doctest::Approx(-eval(f, -3)).epsilon(1e-15));
  CHECK_THROWS_AS(reflect_conjugate(MapExpr::power_shift(1, -4)), PreconditionError);
}

TEST_CASE("monotonicity on random pairs") {
  std::mt19937 rng(11);
  for (const char* s : kSample) {
    MapExpr f = parse_map(s);
    const double lo = f.domain().full_line ? -50 : f.domain().x0;
    std::uniform_real_distribution<double> u(lo, 60);
    for (int k = 0; k < 1000; ++k) {
      double a = u(rng), b = u(rng);
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      CHECK_MESSAGE(eval(f, a) < eval(f, b), s);
    }
  }
}

TEST_CASE("inverse round trip and associativity") {
  EvalConfig cfg;
  for (const char* s : kSample) {
    MapExpr f = parse_map(s);
    MapExpr inv = MapExpr::inverse(f);
    const double start = f.domain().full_line ? -20 : f.domain().x0;
    for (double x = start; x < 40; x += 1.7) {
      double y = eval(f, x);
      double back = eval(f, eval(inv, y));
      CHECK_MESSAGE(std::fabs(back - y) <= 10 * cfg.abs_tol * std::max(1.0, std::fabs(y)), s);
    }
  }
  MapExpr f = parse_map("B(1,1)"), g = parse_map("A(3)"), h = parse_map("logshift(2)");
  for (double x = 0; x < 1e6; x = 3 * x + 1) {
    double l = eval((f * g) * h, x), r = eval(f * (g * h), x);
    CHECK(std::fabs(l - r) <= 10 * cfg.abs_tol * std::max(1.0, std::fabs(l)));
  }
}

TEST_CASE("binary128 evaluation and displacement") {
  for (const char* s : kSample) {
    MapExpr f = parse_map(s);
    for (double x : {1.5, 7.0, 33.0}) {
      CHECK_MESSAGE(static_cast<double>(eval_wide(f, x)) == doctest::Approx(eval(f, x)).epsilon(1e-12), s);
      CHECK_MESSAGE(displacement(f, x) == doctest::Approx(eval(f, x) - x).epsilon(1e-9), s);
    }
  }
  // ln(1 + x) survives at x = 1e470, where f(x) − x would cancel completely
  Wide x = powq(10, 470);
  Wide d = displacement_wide(MapExpr::log_shift(1), x);
  CHECK(static_cast<double>(d) == doctest::Approx(470 * std::log(10.0)).epsilon(1e-12));
  Wide di = displacement_wide(MapExpr::inverse(MapExpr::log_shift(-1)), x);
  CHECK(static_cast<double>(di) == doctest::Approx(470 * std::log(10.0)).epsilon(1e-9));
}
