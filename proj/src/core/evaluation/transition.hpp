#pragma once

#include "sampling/pointset.hpp"

namespace bspinn::eval {

/// Points whose cell of the m x m x m grid (m = floor(cbrt(n))) over the
/// spatio-temporal domain is cut by the moving discontinuity
/// x = shock_x0 + shock_speed * t.
struct TransitionResult {
  std::vector<std::size_t> indices;
  std::size_t grid_m = 0;
  double ratio = 0.0;
};

TransitionResult transition_points(const sample::PointSet& points,
                                   const sample::BoxDomain& domain,
                                   double shock_x0, double shock_speed,
                                   std::size_t n = 0);

}  // namespace bspinn::eval
