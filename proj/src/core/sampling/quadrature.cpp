#include "sampling/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace bspinn::sample {

void gauss_legendre_1d(int n, std::vector<double>& nodes,
                       std::vector<double>& weights) {
  if (n < 1) throw InvalidArgument("gauss_legendre: need n >= 1 points");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Chebyshev-like initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;
}

QuadratureRule gauss_legendre(const BoxDomain& domain, int points_per_dim) {
  domain.validate();
  std::vector<double> n1, w1;
  gauss_legendre_1d(points_per_dim, n1, w1);

  const int d = domain.dim();
  std::size_t total = 1;
  for (int k = 0; k < d; ++k) total *= static_cast<std::size_t>(points_per_dim);

  QuadratureRule rule;
  rule.dim = d;
  rule.nodes.resize(total * static_cast<std::size_t>(d));
  rule.weights.assign(total, 1.0);
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rest = i;
    double* node = rule.nodes.data() + i * static_cast<std::size_t>(d);
    for (int k = d - 1; k >= 0; --k) {
      const std::size_t j = rest % static_cast<std::size_t>(points_per_dim);
      rest /= static_cast<std::size_t>(points_per_dim);
      const double mid = 0.5 * (domain.lo[k] + domain.hi[k]);
      const double halfw = 0.5 * (domain.hi[k] - domain.lo[k]);
      node[k] = mid + halfw * n1[j];
      rule.weights[i] *= halfw * w1[j];
    }
  }
  return rule;
}

}  // namespace bspinn::sample
