#include "training/adam.hpp"

#include <cmath>

namespace bspinn::train {

void adam_step(AdamState& state, std::span<double> params,
               std::span<const double> grad, double lr) {
  const std::size_t n = params.size();
  if (state.m.size() != n || grad.size() != n) {
    throw InvalidArgument("adam_step: size mismatch");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(grad[i])) {
      throw NumericError("adam_step: non-finite gradient entry at index " +
                         std::to_string(i));
    }
  }
  state.t += 1;
  const double b1 = state.beta1;
  const double b2 = state.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
  double* m = state.m.data();
  double* v = state.v.data();
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grad[i];
    m[i] = b1 * m[i] + (1.0 - b1) * g;
    v[i] = b2 * v[i] + (1.0 - b2) * g * g;
    const double m_hat = m[i] / c1;
    const double v_hat = v[i] / c2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
  }
}

}  // namespace bspinn::train
