#pragma once

#include <span>
#include <vector>

#include "sampling/domain.hpp"

namespace bspinn::sample {

/// Tensor-product quadrature; nodes are count x dim row-major and each
/// weight is the product of the per-dimension 1-D weights.
struct QuadratureRule {
  int dim = 0;
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  std::span<const double> node(std::size_t i) const {
    return {nodes.data() + i * static_cast<std::size_t>(dim),
            static_cast<std::size_t>(dim)};
  }
};

/// 1-D Gauss-Legendre nodes/weights on [-1, 1] (Newton on the Legendre
/// recurrence; exact for polynomials of degree <= 2n-1).
void gauss_legendre_1d(int n, std::vector<double>& nodes,
                       std::vector<double>& weights);

/// Tensorized Gauss-Legendre rule over the box (4^d nodes by default).
QuadratureRule gauss_legendre(const BoxDomain& domain, int points_per_dim = 4);

}  // namespace bspinn::sample
