#include "qiline/kernels.hpp"

#include <algorithm>
#include <exception>

#include "qiline/eval.hpp"

namespace qiline::kernels {

namespace {

Wide max_abs(std::span<const Wide> xs) {
  Wide m = 0;
  for (Wide x : xs) m = std::max(m, fabsq(x));
  return m;
}

template <class Real>
Real point_value(const MapExpr& f, Real x, const EvalConfig& cfg, Policy policy) {
  if (policy == Policy::Formula) return eval_formula<Real>(f, x, cfg);
  if constexpr (std::is_same_v<Real, Wide>) {
    return eval_wide(f, x, cfg);
  } else {
    return eval(f, x, cfg);
  }
}

template <bool Parallel, class Op>
std::vector<Wide> run(std::size_t n, const Op& op) {
  std::vector<Wide> out(n);
  std::vector<std::exception_ptr> errors(n);
  const long count = static_cast<long>(n);
  if constexpr (Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long k = 0; k < count; ++k) {
      try {
        out[k] = op(static_cast<std::size_t>(k));
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  } else {
    for (long k = 0; k < count; ++k) {
      try {
        out[k] = op(static_cast<std::size_t>(k));
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

template <class Real>
Real point_displacement(const MapExpr& f, Real x, const EvalConfig& cfg, Policy policy) {
  if (policy == Policy::Formula) return displacement_formula<Real>(f, x, cfg);
  if constexpr (std::is_same_v<Real, Wide>) {
    return displacement_wide(f, x, cfg);
  } else {
    return displacement(f, x, cfg);
  }
}

// op(x) in the precision the grid calls for, widened to binary128.
template <bool Parallel, class Op>
std::vector<Wide> pointwise(std::span<const Wide> xs, const EvalConfig& cfg, const Op& op) {
  const bool wide = use_wide(cfg, static_cast<double>(max_abs(xs)));
  return run<Parallel>(xs.size(), [&](std::size_t k) -> Wide {
    if (wide) return op(xs[k]);
    return static_cast<Wide>(op(static_cast<double>(xs[k])));
  });
}

template <bool Parallel>
std::vector<Wide> values_impl(const MapExpr& f, std::span<const Wide> xs, const EvalConfig& cfg,
                              Policy policy) {
  return pointwise<Parallel>(xs, cfg, [&](auto x) { return point_value(f, x, cfg, policy); });
}

template <bool Parallel>
std::vector<Wide> displacements_impl(const MapExpr& f, std::span<const Wide> xs,
                                     const EvalConfig& cfg, Policy policy) {
  return pointwise<Parallel>(xs, cfg,
                             [&](auto x) { return point_displacement(f, x, cfg, policy); });
}

// (f(x) − x) − (g(x) − x), exact in the displacements' precision
template <bool Parallel>
std::vector<Wide> differences_impl(const MapExpr& f, const MapExpr& g, std::span<const Wide> xs,
                                   const EvalConfig& cfg, Policy policy) {
  return pointwise<Parallel>(xs, cfg, [&](auto x) {
    return point_displacement(f, x, cfg, policy) - point_displacement(g, x, cfg, policy);
  });
}

template <bool Parallel>
std::vector<std::vector<Wide>> rows_impl(std::span<const MapExpr> fs, std::span<const Wide> xs,
                                         const EvalConfig& cfg, Policy policy) {
  const std::size_t cols = xs.size();
  const bool wide = use_wide(cfg, static_cast<double>(max_abs(xs)));
  auto flat = run<Parallel>(fs.size() * cols, [&](std::size_t idx) -> Wide {
    const MapExpr& f = fs[idx / cols];
    Wide x = xs[idx % cols];
    if (wide) return point_displacement(f, x, cfg, policy);
    return static_cast<Wide>(point_displacement(f, static_cast<double>(x), cfg, policy));
  });
  std::vector<std::vector<Wide>> out(fs.size());
  for (std::size_t m = 0; m < fs.size(); ++m)
    out[m].assign(flat.begin() + static_cast<long>(m * cols),
                  flat.begin() + static_cast<long>((m + 1) * cols));
  return out;
}

}  // namespace

namespace serial {
std::vector<Wide> values(const MapExpr& f, std::span<const Wide> xs, const EvalConfig& cfg,
                         Policy policy) {
  return values_impl<false>(f, xs, cfg, policy);
}
std::vector<Wide> displacements(const MapExpr& f, std::span<const Wide> xs,
                                const EvalConfig& cfg, Policy policy) {
  return displacements_impl<false>(f, xs, cfg, policy);
}
std::vector<Wide> differences(const MapExpr& f, const MapExpr& g, std::span<const Wide> xs,
                              const EvalConfig& cfg, Policy policy) {
  return differences_impl<false>(f, g, xs, cfg, policy);
}
std::vector<std::vector<Wide>> displacement_rows(std::span<const MapExpr> fs,
                                                 std::span<const Wide> xs, const EvalConfig& cfg,
                                                 Policy policy) {
  return rows_impl<false>(fs, xs, cfg, policy);
}
}  // namespace serial

namespace omp {
std::vector<Wide> values(const MapExpr& f, std::span<const Wide> xs, const EvalConfig& cfg,
                         Policy policy) {
  return values_impl<true>(f, xs, cfg, policy);
}
std::vector<Wide> displacements(const MapExpr& f, std::span<const Wide> xs,
                                const EvalConfig& cfg, Policy policy) {
  return displacements_impl<true>(f, xs, cfg, policy);
}
std::vector<Wide> differences(const MapExpr& f, const MapExpr& g, std::span<const Wide> xs,
                              const EvalConfig& cfg, Policy policy) {
  return differences_impl<true>(f, g, xs, cfg, policy);
}
std::vector<std::vector<Wide>> displacement_rows(std::span<const MapExpr> fs,
                                                 std::span<const Wide> xs, const EvalConfig& cfg,
                                                 Policy policy) {
  return rows_impl<true>(fs, xs, cfg, policy);
}
}  // namespace omp

}  // namespace qiline::kernels
