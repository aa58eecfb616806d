#include "qiline/grid.hpp"

#include <cmath>

#include "qiline/errors.hpp"

namespace qiline {

void SampleGrid::validate() const {
  if (!(x0 >= 1) || !std::isfinite(x0)) throw InvariantError("grid x0 must be ≥ 1");
  if (!(ratio > 1) || !std::isfinite(ratio)) throw InvariantError("grid ratio must be > 1");
  if (count <= 0) throw InvariantError("grid count must be positive");
  if (!finiteq(max_point())) throw InvariantError("grid overflows binary128 range");
}

std::vector<Wide> SampleGrid::points() const {
  std::vector<Wide> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    if (k == 0) {
      pts.push_back(x0);
    } else {
      pts.push_back(static_cast<Wide>(x0) * powq(static_cast<Wide>(ratio), k));
    }
  }
  return pts;
}

Wide SampleGrid::max_point() const {
  return static_cast<Wide>(x0) * powq(static_cast<Wide>(ratio), count - 1);
}

double SampleGrid::max_point_double() const { return static_cast<double>(max_point()); }

std::vector<Wide> symmetric_points(const SampleGrid& grid) {
  auto pos = grid.points();
  std::vector<Wide> out;
  out.reserve(2 * pos.size());
  for (auto it = pos.rbegin(); it != pos.rend(); ++it) out.push_back(-*it);
  out.insert(out.end(), pos.begin(), pos.end());
  return out;
}

std::string format_wide(Wide x) {
  char buf[80];
  quadmath_snprintf(buf, sizeof buf, "%.17Qg", x);
  return buf;
}

}  // namespace qiline
