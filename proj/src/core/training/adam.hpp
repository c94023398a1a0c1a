#pragma once

#include <span>
#include <vector>

#include "common.hpp"

namespace bspinn::train {

/// First/second moment state for Adam (bias-corrected update).
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long long t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

/// theta <- theta - lr * m_hat / (sqrt(v_hat) + eps). Throws NumericError
/// on non-finite gradient entries.
void adam_step(AdamState& state, std::span<double> params,
               std::span<const double> grad, double lr);

}  // namespace bspinn::train
