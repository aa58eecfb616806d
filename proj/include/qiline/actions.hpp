#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qiline/grid.hpp"
#include "qiline/map_expr.hpp"

namespace qiline {

/// Word in the generators of an action: (generator index, nonzero exponent),
/// first pair applied last.
using GroupWord = std::vector<std::pair<std::size_t, int>>;

struct ActionSpec {
  std::vector<std::string> names;
  std::vector<MapExpr> generators;
  std::vector<std::pair<GroupWord, GroupWord>> relations;
};

/// Throws InvariantError unless every generator is full-line and increasing.
void validate(const ActionSpec& act);

MapExpr word_map(const ActionSpec& act, const GroupWord& w);

/// sup over xs of |lhs(x) − rhs(x)|.
double relation_residual(const ActionSpec& act, const std::pair<GroupWord, GroupWord>& rel,
                         const std::vector<double>& xs, const EvalConfig& cfg = {});

struct TranslationNumber {
  double value = 0;
  long iterations = 0;
  double error_estimate = 0;
};

/// (fⁿ(x0) − x0)/n from an orbit of length 2n. Throws FixedPointError when
/// the orbit stalls or turns back.
TranslationNumber translation_number(const MapExpr& f, double x0, long n,
                                     const EvalConfig& cfg = {});

/// x0, f(x0), …, f^steps(x0).
std::vector<double> orbit(const MapExpr& f, double x0, long steps, const EvalConfig& cfg = {});

/// Header "step,x".
std::string orbit_csv(const std::vector<double>& points);

struct HomomorphismCheck {
  bool additive = false;
  double residual = 0;
  double tau_g = 0, tau_h = 0, tau_gh = 0;
};

inline constexpr double kAdditivityTol = 1e-3;

HomomorphismCheck holder_homomorphism_check(const MapExpr& g, const MapExpr& h, double x0, long n,
                                            const EvalConfig& cfg = {});

struct SemiConjugacy {
  /// Orbit points sorted by x with φ values.
  std::vector<std::pair<double, double>> grid_points;
  double residual = 0;
  std::vector<double> taus;
};

/// φ(w(x0)) = Σ e_k τ_k over exponent vectors with Σ|e_k| ≤ depth, extended
/// by linear interpolation. The residual is taken over orbit points whose
/// images under every generator stay in the orbit.
SemiConjugacy build_semi_conjugacy(const std::vector<MapExpr>& gens, double x0, int depth,
                                   const std::vector<double>& taus, const EvalConfig& cfg = {});
/// τ values from translation_number(g, tau_x0, n).
SemiConjugacy build_semi_conjugacy(const std::vector<MapExpr>& gens, double x0, int depth, long n,
                                   double tau_x0, const EvalConfig& cfg = {});

/// Monotone interpolation of φ.
double semi_conjugacy_at(const SemiConjugacy& sc, double x);

struct LinearityResult {
  bool linear = false;
  double slope = 0;
  double max_deviation = 0;
};

LinearityResult linearity_test(const std::vector<std::pair<Rational, double>>& samples, double tol);

/// Unit kernel vector (s, t) of (s, t) ↦ slope1·s + slope2·t.
std::pair<double, double> injectivity_obstruction(double slope1, double slope2);

/// sup over grid points of |Ainv(x + 2) − Ainv(x) − 1|.
double affine_functional_equation_residual(const MapExpr& ainv, const SampleGrid& grid,
                                           const EvalConfig& cfg = {});

/// Same residual in rational arithmetic, for Affine and rational PL maps.
std::optional<Rational> exact_functional_equation_residual(const MapExpr& ainv,
                                                           const SampleGrid& grid);

struct FixedPoint {
  double x = 0;
  int iterations = 0;
};

/// Iterates x ← g(x) up to 200 times until |g(x) − x| ≤ 1e−9.
FixedPoint contraction_fixed_point(const MapExpr& g, double x0, const EvalConfig& cfg = {});

ActionSpec diagonal_embed(const ActionSpec& act, const std::vector<ChartInterval>& charts);

enum class CandidateFamily { Translation, FixedPoint };
std::string to_string(CandidateFamily f);

/// λ scales the A-translations, c1 and c2 the two B-summands (i = 1, 2).
struct CandidateParams {
  double lambda = 1, c1 = 1, c2 = 1;
};

/// Candidate action of A_t and B_{i,s} on (0, 1), in chart coordinates.
MapExpr candidate_A(CandidateFamily fam, const CandidateParams& p, double t);
MapExpr candidate_B(CandidateFamily fam, const CandidateParams& p, int summand, double s);

struct ObstructionReport {
  CandidateParams params;
  CandidateFamily family = CandidateFamily::Translation;
  std::vector<std::pair<std::string, double>> residuals;
  std::optional<double> fixed_point_witness;
  double max_violation = 0;
  std::string conclusion;
};

inline constexpr double kViolationFloor = 1e-2;

std::vector<ObstructionReport> relation_violation_scan(CandidateFamily fam,
                                                       const std::vector<CandidateParams>& params,
                                                       const EvalConfig& cfg = {});

/// True when every report shows a violation of at least kViolationFloor.
bool no_candidate_survives(const std::vector<ObstructionReport>& reports);

}  // namespace qiline
