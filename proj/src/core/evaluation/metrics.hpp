#pragma once

#include <functional>
#include <span>
#include <vector>

#include "sampling/quadrature.hpp"

namespace bspinn::eval {

/// sqrt(sum (p-r)^2) / sqrt(sum r^2) over grid nodes.
double relative_l2_grid(std::span<const double> predicted,
                        std::span<const double> reference);

using ScalarFn = std::function<double(std::span<const double>)>;

/// Ratio of integrals int |u-u*|^2 / int |u*|^2 under the rule, as printed
/// in the source convention (no outer square root), plus the square-rooted
/// variant.
struct QuadratureError {
  double ratio = 0.0;
  double sqrt_ratio = 0.0;
};
QuadratureError relative_l2_quadrature(const ScalarFn& predicted,
                                       const ScalarFn& exact,
                                       const sample::QuadratureRule& rule);

/// Per-seed relative errors with their ensemble statistics (population
/// standard deviation).
struct ErrorReport {
  std::vector<double> per_seed;
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t best_index = 0;

  static ErrorReport compute(std::span<const double> errors);
};

}  // namespace bspinn::eval
