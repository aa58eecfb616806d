#include "qiline/ordering.hpp"

#include <algorithm>
#include <exception>

#include "qiline/errors.hpp"
#include "qiline/eval.hpp"
#include "qiline/kernels.hpp"

namespace qiline {

std::string to_string(OrderVerdict::Kind k) {
  switch (k) {
    case OrderVerdict::Kind::Less: return "Less";
    case OrderVerdict::Kind::Greater: return "Greater";
    case OrderVerdict::Kind::Equivalent: return "Equivalent";
    case OrderVerdict::Kind::Unresolved: return "Unresolved";
  }
  return "?";
}

OrderVerdict compare(const MapExpr& f, const MapExpr& g, const SampleGrid& grid,
                     const EvalConfig& cfg, const Thresholds& th) {
  OrderVerdict v;
  const auto* pf = f.as<expr::PLRef>();
  const auto* pg = g.as<expr::PLRef>();
  if (pf && pg) {
    v.exact = true;
    const Rational& a = pf->pl.right_slope();
    const Rational& b = pg->pl.right_slope();
    v.evidence.kind = a == b ? DistanceVerdict::Kind::ExactEqual : DistanceVerdict::Kind::ExactDifferent;
    v.kind = a < b ? OrderVerdict::Kind::Less
                   : (b < a ? OrderVerdict::Kind::Greater : OrderVerdict::Kind::Equivalent);
    return v;
  }
  v.evidence = numeric_distance(g, f, grid, cfg, th);
  if (v.evidence.kind == DistanceVerdict::Kind::BoundedEvidence) {
    v.kind = OrderVerdict::Kind::Equivalent;
  } else if (v.evidence.sign_changes || v.evidence.sign == 0) {
    v.kind = OrderVerdict::Kind::Unresolved;
  } else {
    v.kind = v.evidence.sign > 0 ? OrderVerdict::Kind::Less : OrderVerdict::Kind::Greater;
  }
  return v;
}

WitnessSequence find_witness(const MapExpr& f, const SampleGrid& grid, const EvalConfig& cfg,
                             const Thresholds& th) {
  grid.validate();
  auto xs = grid.points();
  auto ds = kernels::displacements(f, xs, cfg);
  WitnessSequence w;
  Wide best = -1;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    Wide a = fabsq(ds[k]);
    if (a > best) {
      best = a;
      w.points.push_back(xs[k]);
      w.displacements.push_back(ds[k]);
      w.signs.push_back(ds[k] > 0 ? 1 : (ds[k] < 0 ? -1 : 0));
    }
  }
  if (!(best > th.witness))
    throw NoWitnessError("max |f(x) − x| over the grid is " + format_wide(best) +
                             ", not above " + format17(th.witness),
                         static_cast<double>(best));
  return w;
}

SignAssignment assign_signs(const std::vector<MapExpr>& fs, const SampleGrid& grid,
                            const EvalConfig& cfg, const Thresholds& th) {
  if (fs.empty()) throw PreconditionError("assign_signs needs at least one map");
  grid.validate();
  SignAssignment out;
  out.epsilons.assign(fs.size(), 0);
  const auto xs = grid.points();
  const auto rows = kernels::displacement_rows(fs, xs, cfg);

  std::vector<std::size_t> surviving(fs.size());
  for (std::size_t k = 0; k < fs.size(); ++k) surviving[k] = k;

  while (!surviving.empty()) {
    SignStage stage;
    stage.surviving = surviving;
    // the map moving points furthest resolves the most per stage
    Wide best = -1;
    for (std::size_t i : surviving) {
      Wide m = 0;
      for (Wide d : rows[i]) m = std::max(m, fabsq(d));
      if (m > best) {
        best = m;
        stage.chosen = i;
      }
    }
    stage.witness = find_witness(fs[stage.chosen], grid, cfg, th);
    const auto& wx = stage.witness.points;
    if (wx.size() < 4)
      throw ClassificationError("witness of " + fs[stage.chosen].str() + " has fewer than 4 points",
                                stage.chosen);

    std::vector<std::size_t> next;
    Wide bound = 0;
    for (std::size_t i : surviving) {
      auto ds = kernels::displacements(fs[i], wx, cfg);
      auto verdict = classify_gap(wx, ds, th);
      if (verdict.kind == DistanceVerdict::Kind::BoundedEvidence) {
        next.push_back(i);
        bound = std::max(bound, static_cast<Wide>(verdict.M));
      } else if (verdict.sign_changes || verdict.sign == 0) {
        throw ClassificationError(fs[i].str() + " oscillates in sign along the witness of " +
                                      fs[stage.chosen].str(),
                                  i);
      } else {
        out.epsilons[i] = verdict.sign;
      }
    }
    if (out.epsilons[stage.chosen] == 0)
      throw ClassificationError(fs[stage.chosen].str() + " is unresolved along its own witness",
                                stage.chosen);
    stage.bound_used = static_cast<double>(bound);
    out.stages.push_back(std::move(stage));
    surviving = std::move(next);
  }
  return out;
}

std::size_t word_count(std::size_t k, int max_len) {
  // saturates just above the budget
  const std::size_t cap = kWordBudget + 1;
  std::size_t total = 0, layer = 1;
  for (int len = 1; len <= max_len && total < cap; ++len) {
    layer = std::min(cap, layer * k);
    total = std::min(cap, total + layer);
  }
  return total;
}

std::vector<std::vector<std::size_t>> enumerate_words(std::size_t k, int max_len) {
  if (word_count(k, max_len) > kWordBudget)
    throw BudgetError("word count exceeds " + std::to_string(kWordBudget));
  std::vector<std::vector<std::size_t>> out;
  for (int len = 1; len <= max_len; ++len) {
    std::vector<std::size_t> w(static_cast<std::size_t>(len), 0);
    for (;;) {
      out.push_back(w);
      int pos = len - 1;
      while (pos >= 0 && ++w[pos] == k) w[pos--] = 0;
      if (pos < 0) break;
    }
  }
  return out;
}

std::string word_string(const std::vector<std::size_t>& word, const std::vector<MapExpr>& fs,
                        const std::vector<int>& epsilons) {
  std::string s;
  for (std::size_t i : word) {
    if (!s.empty()) s += " * ";
    s += epsilons[i] < 0 ? "inv(" + fs[i].str() + ")" : fs[i].str();
  }
  return s;
}

namespace {

// Stage index t whose surviving set holds every letter of the word.
std::size_t deepest_stage(const SignAssignment& a, const std::vector<std::size_t>& word) {
  std::size_t t = 0;
  for (std::size_t s = 0; s < a.stages.size(); ++s) {
    const auto& sv = a.stages[s].surviving;
    bool all = std::all_of(word.begin(), word.end(), [&](std::size_t i) {
      return std::find(sv.begin(), sv.end(), i) != sv.end();
    });
    if (all) t = s;
  }
  return t;
}

}  // namespace

WordCheck semigroup_word_check(const SignAssignment& a, const std::vector<MapExpr>& fs,
                               int max_len, const EvalConfig& cfg, const Thresholds& th,
                               Execution exec) {
  if (max_len < 1) throw PreconditionError("max_len must be positive");
  if (a.epsilons.size() != fs.size() || a.stages.empty())
    throw PreconditionError("sign assignment does not match the maps");
  for (int e : a.epsilons)
    if (e != 1 && e != -1) throw PreconditionError("sign assignment is incomplete");

  std::vector<MapExpr> letters;
  for (std::size_t i = 0; i < fs.size(); ++i)
    letters.push_back(a.epsilons[i] > 0 ? fs[i] : MapExpr::inverse(fs[i]));
  const auto words = enumerate_words(fs.size(), max_len);

  const long n = static_cast<long>(words.size());
  std::vector<Wide> tail(words.size());
  std::vector<std::exception_ptr> errors(words.size());
  auto work = [&](long k) {
    try {
      const auto& word = words[k];
      const auto& wx = a.stages[deepest_stage(a, word)].witness.points;
      MapExpr w = letters[word.front()];
      for (std::size_t p = 1; p < word.size(); ++p) w = MapExpr::compose(w, letters[word[p]]);
      Wide x = wx.back();
      tail[k] = kernels::serial::displacements(w, std::span<const Wide>(&x, 1), cfg)[0];
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long k = 0; k < n; ++k) work(k);
  } else {
    for (long k = 0; k < n; ++k) work(k);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  WordCheck out;
  out.words_checked = words.size();
  std::size_t worst = 0;
  for (std::size_t k = 0; k < words.size(); ++k) {
    if (tail[k] < tail[worst]) worst = k;
    if (!(tail[k] > th.witness)) out.all_positive = false;
  }
  out.worst_word = words[worst];
  out.worst_value = static_cast<double>(tail[worst]);
  return out;
}

bool inverse_displacement_check(const MapExpr& f, const WitnessSequence& w, double K, double C,
                                const EvalConfig& cfg) {
  if (w.points.empty()) throw PreconditionError("empty witness");
  for (Wide d : w.displacements)
    if (!(d > 0)) throw PreconditionError("witness displacements must be positive");
  auto inv = kernels::displacements(MapExpr::inverse(f), w.points, cfg);
  std::size_t checked = 0;
  for (std::size_t k = 0; k < w.points.size(); ++k) {
    if (w.points[k] + inv[k] < w.points.front()) continue;
    ++checked;
    Wide rhs = -(w.displacements[k] / K - C) + 1e-6Q;
    if (inv[k] > rhs) return false;
  }
  if (checked == 0) throw PreconditionError("no witness point has its preimage inside the sampled range");
  return true;
}

}  // namespace qiline
