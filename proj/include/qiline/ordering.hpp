#pragma once

#include <string>
#include <vector>

#include "qiline/errors.hpp"
#include "qiline/metrics.hpp"

namespace qiline {

struct OrderVerdict {
  enum class Kind { Less, Greater, Equivalent, Unresolved };
  Kind kind = Kind::Unresolved;
  /// Gap evidence for g − f (numeric path); exact flag set for two PL maps.
  DistanceVerdict evidence;
  bool exact = false;
};

std::string to_string(OrderVerdict::Kind k);

/// f < g when g(x) − f(x) → +∞, read off the same gap rule as
/// bounded_distance. Two rational PL maps compare by slope at +∞.
OrderVerdict compare(const MapExpr& f, const MapExpr& g, const SampleGrid& grid,
                     const EvalConfig& cfg = {}, const Thresholds& th = {});

struct WitnessSequence {
  std::vector<Wide> points;
  std::vector<Wide> displacements;
  std::vector<int> signs;
};

/// Greedy grid subsequence with strictly increasing |f(x) − x|, ending above
/// th.witness. Throws NoWitnessError otherwise.
WitnessSequence find_witness(const MapExpr& f, const SampleGrid& grid, const EvalConfig& cfg = {},
                             const Thresholds& th = {});

struct SignStage {
  /// Indices without a sign when the stage starts.
  std::vector<std::size_t> surviving;
  std::size_t chosen = 0;
  WitnessSequence witness;
  /// sup |f_i(x) − x| along the witness over maps that stay unsigned.
  double bound_used = 0;
};

struct SignAssignment {
  std::vector<int> epsilons;
  std::vector<SignStage> stages;
};

/// Raised when a map neither diverges with a fixed sign nor stays bounded
/// along a stage witness.
class ClassificationError : public Error {
 public:
  ClassificationError(const std::string& message, std::size_t index)
      : Error(message), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

SignAssignment assign_signs(const std::vector<MapExpr>& fs, const SampleGrid& grid,
                            const EvalConfig& cfg = {}, const Thresholds& th = {});

struct WordCheck {
  bool all_positive = true;
  std::size_t words_checked = 0;
  /// Letter indices into fs of the word with the smallest tail displacement.
  std::vector<std::size_t> worst_word;
  double worst_value = 0;
};

inline constexpr std::size_t kWordBudget = 100000;

/// Number of words of length 1 … max_len over k letters.
std::size_t word_count(std::size_t k, int max_len);

/// Words in length-lexicographic order.
std::vector<std::vector<std::size_t>> enumerate_words(std::size_t k, int max_len);

enum class Execution { Serial, Parallel };

/// Every word in {f_i^{ε_i}} of length ≤ max_len must exceed th.witness at the
/// tail of the witness of the deepest stage that contains all its letters.
WordCheck semigroup_word_check(const SignAssignment& a, const std::vector<MapExpr>& fs,
                               int max_len, const EvalConfig& cfg = {}, const Thresholds& th = {},
                               Execution exec = Execution::Parallel);

/// f⁻¹(x) − x ≤ −((1/K)(f(x) − x) − C) + 1e−6 at every witness point x with
/// f⁻¹(x) ≥ the first witness point. Below that the pair (f⁻¹(x), x) leaves the
/// range where K and C were sampled.
bool inverse_displacement_check(const MapExpr& f, const WitnessSequence& w, double K, double C,
                                const EvalConfig& cfg = {});

std::string word_string(const std::vector<std::size_t>& word, const std::vector<MapExpr>& fs,
                        const std::vector<int>& epsilons);

}  // namespace qiline
