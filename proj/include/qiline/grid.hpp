#pragma once

#include <string>
#include <vector>

#include "qiline/scalar.hpp"

namespace qiline {

/// Geometric sample x0·ratio^k, k = 0 … count−1. Points are binary128 so the
/// grid can run far past the double range (witness searches need x ≈ e^1000).
struct SampleGrid {
  double x0 = 1;
  double ratio = 2;
  int count = 40;

  void validate() const;
  std::vector<Wide> points() const;
  Wide max_point() const;
  double max_point_double() const;
};

/// −x_{n−1} … −x_0, x_0 … x_{n−1}.
std::vector<Wide> symmetric_points(const SampleGrid& grid);

std::string format_wide(Wide x);

}  // namespace qiline
