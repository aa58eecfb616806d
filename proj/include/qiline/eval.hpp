#pragma once

#include <functional>

#include "qiline/map_expr.hpp"

namespace qiline {

/// Evaluates f at x. Throws DomainError below the germ domain and
/// ConvergenceError when an inverse cannot be bracketed and bisected.
double eval(const MapExpr& f, double x, const EvalConfig& cfg = {});
Wide eval_wide(const MapExpr& f, Wide x, const EvalConfig& cfg = {});

/// Evaluation without the germ-domain guard: only inputs where the defining
/// formula is undefined raise DomainError.
template <class Real>
Real eval_formula(const MapExpr& f, Real x, const EvalConfig& cfg);

/// f(x) − x, carried through the expression tree so that it stays accurate
/// when |x| is far larger than the displacement.
double displacement(const MapExpr& f, double x, const EvalConfig& cfg = {});
Wide displacement_wide(const MapExpr& f, Wide x, const EvalConfig& cfg = {});
template <class Real>
Real displacement_formula(const MapExpr& f, Real x, const EvalConfig& cfg);

/// Smallest y (subject to y ≥ lower when bounded) with fn(y) = target for an
/// increasing fn; repeated-growth bracketing from `seed`, then bisection.
template <class Real>
Real solve_increasing(const std::function<Real(Real)>& fn, Real target, Real seed,
                      bool bounded_below, Real lower, const EvalConfig& cfg);

/// Central difference (f(x+h) − f(x−h)) / 2h.
double derivative_est(const MapExpr& f, double x, double h, const EvalConfig& cfg = {});

/// x ↦ f(x) − f(0) for full-line f.
MapExpr normalize_origin(const MapExpr& f, const EvalConfig& cfg = {});

/// t ∘ f ∘ t with t(x) = −x, for full-line f.
MapExpr reflect_conjugate(const MapExpr& f);

/// Reference chart map R → (0, 1) used by diagonal embeddings.
template <class Real>
Real chart_forward(const ChartInterval& c, Real u);
template <class Real>
Real chart_backward(const ChartInterval& c, Real x);

bool use_wide(const EvalConfig& cfg, double grid_max);

}  // namespace qiline
