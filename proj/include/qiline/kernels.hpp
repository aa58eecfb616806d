#pragma once

#include <span>
#include <vector>

#include "qiline/map_expr.hpp"

namespace qiline::kernels {

/// Checked evaluation raises DomainError below the germ domain; Formula only
/// fails where the defining formula is undefined.
enum class Policy { Checked, Formula };

// Every kernel evaluates in binary128 when use_wide(cfg, max |x|) holds and in
// double otherwise; results are widened to binary128 either way. The OpenMP and
// serial variants return bit-identical vectors. The first failing index (in
// index order) determines which exception propagates.

namespace serial {
std::vector<Wide> values(const MapExpr& f, std::span<const Wide> xs, const EvalConfig& cfg,
                         Policy policy = Policy::Checked);
/// f(x) − x.
std::vector<Wide> displacements(const MapExpr& f, std::span<const Wide> xs,
                                const EvalConfig& cfg, Policy policy = Policy::Checked);
/// f(x) − g(x).
std::vector<Wide> differences(const MapExpr& f, const MapExpr& g, std::span<const Wide> xs,
                              const EvalConfig& cfg, Policy policy = Policy::Checked);
/// Row m holds the displacements of fs[m].
std::vector<std::vector<Wide>> displacement_rows(std::span<const MapExpr> fs,
                                                 std::span<const Wide> xs, const EvalConfig& cfg,
                                                 Policy policy = Policy::Checked);
}  // namespace serial

namespace omp {
std::vector<Wide> values(const MapExpr& f, std::span<const Wide> xs, const EvalConfig& cfg,
                         Policy policy = Policy::Checked);
std::vector<Wide> displacements(const MapExpr& f, std::span<const Wide> xs,
                                const EvalConfig& cfg, Policy policy = Policy::Checked);
std::vector<Wide> differences(const MapExpr& f, const MapExpr& g, std::span<const Wide> xs,
                              const EvalConfig& cfg, Policy policy = Policy::Checked);
std::vector<std::vector<Wide>> displacement_rows(std::span<const MapExpr> fs,
                                                 std::span<const Wide> xs, const EvalConfig& cfg,
                                                 Policy policy = Policy::Checked);
}  // namespace omp

using omp::differences;
using omp::displacement_rows;
using omp::displacements;
using omp::values;

}  // namespace qiline::kernels
