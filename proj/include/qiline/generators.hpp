#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qiline/metrics.hpp"

namespace qiline {

/// A_t, B_{i,s}, their logarithmic models a_t, b_{i,s}, and h-conjugates.
struct GeneratorSpec {
  enum class Kind { A, B, a, b, HConj };
  Kind kind = Kind::A;
  double t = 1;
  double i = 1;
  double s = 0;
  std::shared_ptr<const GeneratorSpec> inner;

  static GeneratorSpec A(double t);
  static GeneratorSpec B(double i, double s);
  static GeneratorSpec a_log(double t);
  static GeneratorSpec b_log(double i, double s);
  static GeneratorSpec h_conj(GeneratorSpec inner);

  std::string str() const;
};

MapExpr realize(const GeneratorSpec& g);

/// h ∘ f ∘ h⁻¹.
MapExpr h_conjugate(const MapExpr& f);

/// f on [at, ∞) continued below by a translation; for b(i, s) this is the
/// full-line representative with bounded displacement.
MapExpr identity_glued(const MapExpr& f, double at = 0);

struct WordLetter {
  GeneratorSpec gen;
  int exponent = 1;
};
using WordSpec = std::vector<WordLetter>;

/// Letters composed in order (first letter outermost); negative powers go
/// through Inverse, and powers of A_t collapse to A_{t^n}.
MapExpr word_realize(const WordSpec& w);

enum class RelationId { Conj, AddB, CommB, MultA };
std::string to_string(RelationId id);
RelationId relation_from_string(const std::string& name);

struct RelationParams {
  double t = 1, t2 = 1;  // conj uses t; multA uses t, t2
  double i = 1, j = 1;   // commB uses both
  double s1 = 1, s2 = 1; // conj uses s1
};

struct RelationReport {
  RelationId id = RelationId::Conj;
  RelationParams params;
  double measured_sup = 0;
  /// Empty for identities that hold exactly.
  std::optional<double> stated_bound;
  bool pass = false;
};

inline constexpr double kRelationSlack = 1e-6;

/// sup over the grid of |LHS − RHS| against the stated bound (x0 ≥ 1 required).
RelationReport verify_relation(RelationId id, const RelationParams& p, const SampleGrid& grid,
                               const EvalConfig& cfg = {});

/// Every relation over t ∈ {1/2, 2, 4}, i, j ∈ {1, 2, 5}, s ∈ {−1, 1, 3},
/// in parameter order.
std::vector<RelationReport> verify_all_relations(const SampleGrid& grid, const EvalConfig& cfg = {});

struct IndependenceResult {
  enum class Verdict { Trivial, NontrivialExponent };
  Verdict verdict = Verdict::Trivial;
  double exponent = 0;
  /// 1/(i*+1) for the smallest i with a nonzero collected coefficient, or 0.
  double expected_exponent = 0;
  /// Sum of the pairwise addB / commB bounds along the expanded word.
  double bound = 0;
  double max_displacement = 0;
  std::vector<Wide> xs;
  std::vector<Wide> displacements;
};

IndependenceResult independence_test(const WordSpec& w, const SampleGrid& grid,
                                     const EvalConfig& cfg = {});

struct EscapeResult {
  bool vacuous = false;
  bool escaped = false;
  double x_star = 0;
  double f_star = 0;
  /// |e^{f(x*)} − e^{x*}|.
  double expected_constant = 0;
  /// |h f h⁻¹(y_n) − y_n| / e^n for n = 1 … 20.
  std::vector<double> growth;
};

inline constexpr int kLiftSearchPoints = 1024;

EscapeResult diffz_escape_check(const MapExpr& lift, const EvalConfig& cfg = {});

/// True when the lift is the identity or h-conjugation moves it out of H.
bool diffz_H_triviality_check(const MapExpr& lift, const SampleGrid& grid,
                              const EvalConfig& cfg = {});

}  // namespace qiline
