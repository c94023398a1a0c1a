#include "evaluation/transition.hpp"

#include <algorithm>
#include <cmath>

namespace bspinn::eval {

TransitionResult transition_points(const sample::PointSet& points,
                                   const sample::BoxDomain& domain,
                                   double shock_x0, double shock_speed,
                                   std::size_t n) {
  domain.validate();
  if (points.dim != 3 || domain.dim() != 3) {
    throw InvalidArgument("transition_points: 3-coordinate points expected");
  }
  if (n == 0) n = points.size();
  TransitionResult result;
  result.grid_m = static_cast<std::size_t>(
      std::floor(std::cbrt(static_cast<double>(n))));
  if (result.grid_m < 1) result.grid_m = 1;
  const double m = static_cast<double>(result.grid_m);

  const auto cell_index = [&](double v, int d) {
    const double rel = (v - domain.lo[d]) / (domain.hi[d] - domain.lo[d]);
    const auto idx = static_cast<long long>(std::floor(rel * m));
    return std::clamp<long long>(idx, 0, static_cast<long long>(result.grid_m) - 1);
  };

  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto p = points.point(i);
    const long long ix = cell_index(p[0], 0);
    const long long it = cell_index(p[2], 2);
    const double hx = (domain.hi[0] - domain.lo[0]) / m;
    const double ht = (domain.hi[2] - domain.lo[2]) / m;
    const double x0 = domain.lo[0] + hx * static_cast<double>(ix);
    const double x1 = x0 + hx;
    const double t0 = domain.lo[2] + ht * static_cast<double>(it);
    const double t1 = t0 + ht;
    // Shock x-extent across the cell's time slab, grown to either
    // traversal direction.
    const double s0 = shock_x0 + shock_speed * t0;
    const double s1 = shock_x0 + shock_speed * t1;
    const double lo = std::min(s0, s1);
    const double hi = std::max(s0, s1);
    if (hi >= x0 && lo <= x1) result.indices.push_back(i);
  }
  result.ratio = points.size() == 0
                     ? 0.0
                     : static_cast<double>(result.indices.size()) /
                           static_cast<double>(points.size());
  return result;
}

}  // namespace bspinn::eval
