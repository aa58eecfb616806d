#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "qiline/errors.hpp"
#include "qiline/eval.hpp"
#include "qiline/generators.hpp"
#include "qiline/ordering.hpp"
#include "qiline/parse.hpp"

using namespace qiline;
using OK = OrderVerdict::Kind;

namespace {

OK cmp(const MapExpr& f, const MapExpr& g) {
  return compare(f, g, within_domains({}, {f.domain(), g.domain()})).kind;
}

OK cmp(const char* f, const char* g) { return cmp(parse_map(f), parse_map(g)); }

const char* kSample[] = {"A(2)", "A(1/2)", "B(1,1)", "B(1,-1)", "B(2,1)", "logshift(1)"};

}  // namespace

TEST_CASE("compare examples") {
  CHECK(cmp("id", "logshift(1)") == OK::Less);
  CHECK(cmp("logshift(1)", "id") == OK::Greater);
  CHECK(cmp("B(1,1)", "B(1,2)") == OK::Less);
  CHECK(cmp("B(2,1)", "B(2,1)") == OK::Equivalent);
  CHECK(cmp("B(1,1) * B(1,2)", "B(1,3)") == OK::Equivalent);
  auto exact = compare(parse_map("pl[0:0;slopes(1,2)]"), parse_map("pl[0:0;slopes(3,3)]"), {});
  CHECK(exact.exact);
  CHECK(exact.kind == OK::Less);
  CHECK(to_string(OK::Unresolved) == "Unresolved");
}

TEST_CASE("compare leaves oscillating gaps unresolved") {
  // h-conjugate of a nontrivial lift minus the identity changes sign along the grid
  auto lift = parse_map("lift[0:0;1/4:1/8;1/2:1/2;3/4:7/8;1:1;]");
  auto v = compare(MapExpr::identity(), h_conjugate(lift), SampleGrid{1, 1.3, 80});
  CHECK(v.kind == OK::Unresolved);
}

TEST_CASE("trichotomy and transitivity on the generator sample") {
  const std::size_t n = std::size(kSample);
  std::vector<std::vector<OK>> v(n, std::vector<OK>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      v[a][b] = cmp(kSample[a], kSample[b]);
      if (a == b) CHECK(v[a][b] == OK::Equivalent);
      else CHECK_MESSAGE(v[a][b] != OK::Unresolved, kSample[a], " vs ", kSample[b]);
    }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      if (v[a][b] == OK::Less) CHECK(v[b][a] == OK::Greater);
      if (v[a][b] == OK::Equivalent) CHECK(v[b][a] == OK::Equivalent);
      for (std::size_t c = 0; c < n; ++c)
        if (v[a][b] == OK::Less && v[b][c] == OK::Less) CHECK(v[a][c] == OK::Less);
    }
}

TEST_CASE("left invariance") {
  for (const char* h : {"A(2)", "B(1,1)", "logshift(5)"})
    for (const char* f : kSample)
      for (const char* g : kSample) {
        if (cmp(f, g) != OK::Less) continue;
        MapExpr hf = parse_map(h) * parse_map(f), hg = parse_map(h) * parse_map(g);
        OK k = cmp(hf, hg);
        if (k != OK::Unresolved) CHECK_MESSAGE(k == OK::Less, h, f, g);
      }
}

TEST_CASE("find_witness") {
  SampleGrid grid;
  auto w = find_witness(MapExpr::affine(2, 0), grid);
  for (std::size_t k = 0; k < w.points.size(); ++k) {
    CHECK(w.displacements[k] == w.points[k]);
    CHECK(w.signs[k] == 1);
  }
  CHECK(static_cast<double>(w.displacements.back()) > 1e3);
  for (std::size_t k = 1; k < w.points.size(); ++k) {
    CHECK(w.points[k] > w.points[k - 1]);
    CHECK(fabsq(w.displacements[k]) > fabsq(w.displacements[k - 1]));
  }
  CHECK(find_witness(MapExpr::affine(0.5, 0), grid).signs.back() == -1);
  CHECK_THROWS_AS(find_witness(MapExpr::identity(), grid), NoWitnessError);
  try {
    find_witness(MapExpr::log_shift(1), grid);
    FAIL("ln(1+x) stays below 1e3 on the default grid");
  } catch (const NoWitnessError& e) {
    CHECK(e.max_displacement() == doctest::Approx(std::log1p(std::pow(2.0, 39))).epsilon(1e-9));
  }
}

TEST_CASE("witness along the h-conjugate of a lift") {
  auto lift = parse_map("lift[0:0;1/2:3/4;1:1;]");
  auto w = find_witness(h_conjugate(lift), SampleGrid{std::exp(0.5), std::exp(1.0), 20});
  CHECK(w.points.size() >= 4);
  CHECK(w.signs.back() == 1);
}

TEST_CASE("assign_signs examples") {
  SampleGrid grid;
  auto one = assign_signs({MapExpr::affine(2, 0)}, grid);
  CHECK(one.epsilons == std::vector<int>{1});
  CHECK(one.stages.size() == 1);
  CHECK(assign_signs({MapExpr::affine(0.5, 0)}, grid).epsilons == std::vector<int>{-1});

  SampleGrid far{1, 1e10, 48};
  std::vector<MapExpr> fs = {parse_map("A(2)"), parse_map("logshift(-1)"), parse_map("B(1,1)")};
  auto a = assign_signs(fs, far);
  CHECK(a.epsilons == std::vector<int>{1, -1, 1});
  CHECK(a.stages.size() == 1);
}

TEST_CASE("assign_signs stages shrink") {
  SampleGrid far{1, 1e10, 48};
  std::vector<MapExpr> fs = {parse_map("A(2)"), parse_map("A(1/2)"), parse_map("logshift(1)"),
                             parse_map("logshift(-1)"), parse_map("B(1,1)")};
  auto a = assign_signs(fs, far);
  CHECK(a.stages.size() <= fs.size());
  for (std::size_t t = 1; t < a.stages.size(); ++t)
    CHECK(a.stages[t].surviving.size() < a.stages[t - 1].surviving.size());
  CHECK(a.epsilons == std::vector<int>{1, -1, 1, -1, 1});
  // a positive sign means the map lies above the identity
  for (std::size_t i = 0; i < fs.size(); ++i)
    if (a.epsilons[i] == 1) CHECK(cmp(MapExpr::identity(), fs[i]) == OK::Less);
  auto check = semigroup_word_check(a, fs, 4);
  CHECK(check.all_positive);
  CHECK(check.words_checked == word_count(5, 4));
}

TEST_CASE("assign_signs rejects oscillating maps") {
  auto lift = parse_map("lift[0:0;1/4:1/8;1/2:1/2;3/4:7/8;1:1;]");
  CHECK_THROWS_AS(assign_signs({MapExpr::affine(2, 0), lift}, SampleGrid{1.1, 1.3, 60}), Error);
}

TEST_CASE("semigroup words") {
  CHECK(word_count(2, 3) == 14);
  CHECK(word_count(1, 3) == 3);
  auto ws = enumerate_words(2, 2);
  REQUIRE(ws.size() == 6);
  CHECK(ws[0] == std::vector<std::size_t>{0});
  CHECK(ws[2] == std::vector<std::size_t>{0, 0});
  CHECK(ws[5] == std::vector<std::size_t>{1, 1});
  CHECK_THROWS_AS(enumerate_words(10, 6), BudgetError);

  SampleGrid grid;
  std::vector<MapExpr> one = {MapExpr::affine(2, 0)};
  auto a = assign_signs(one, grid);
  auto c = semigroup_word_check(a, one, 3);
  CHECK(c.all_positive);
  CHECK(c.words_checked == 3);

  SampleGrid far{1, 1e10, 48};
  std::vector<MapExpr> two = {MapExpr::affine(2, 0), MapExpr::log_shift(-1)};
  auto b = assign_signs(two, far);
  CHECK(b.epsilons == std::vector<int>{1, -1});
  auto serial = semigroup_word_check(b, two, 3, {}, {}, Execution::Serial);
  auto par = semigroup_word_check(b, two, 3, {}, {}, Execution::Parallel);
  CHECK(serial.all_positive);
  CHECK(serial.words_checked == 14);
  CHECK(serial.worst_word == par.worst_word);
  CHECK(serial.worst_value == par.worst_value);
  CHECK(word_string({0, 1}, two, b.epsilons) == "A(2) * inv(logshift(-1))");
}

TEST_CASE("inverse displacement bound") {
  SampleGrid grid;
  auto a2 = MapExpr::affine(2, 0);
  CHECK(inverse_displacement_check(a2, find_witness(a2, grid), 2, 0));
  SampleGrid far{1, 1e10, 48};
  auto ls = MapExpr::log_shift(1);
  auto q = estimate_qi_constants(ls, grid);
  CHECK(inverse_displacement_check(ls, find_witness(ls, far), q.K, q.C));
  auto b = MapExpr::power_shift(1, 1);
  auto qb = estimate_qi_constants(b, grid);
  CHECK(inverse_displacement_check(b, find_witness(b, grid), qb.K, qb.C));
  // K too small breaks the bound for A(2)
  CHECK_FALSE(inverse_displacement_check(a2, find_witness(a2, grid), 1, 0));
  auto half = MapExpr::affine(0.5, 0);
  CHECK_THROWS_AS(inverse_displacement_check(half, find_witness(half, grid), 2, 0), PreconditionError);
}
