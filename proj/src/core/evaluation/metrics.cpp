#include "evaluation/metrics.hpp"

#include <cmath>

#include "common.hpp"

namespace bspinn::eval {

double relative_l2_grid(std::span<const double> predicted,
                        std::span<const double> reference) {
  if (predicted.size() != reference.size() || predicted.empty()) {
    throw InvalidArgument("relative_l2_grid: length mismatch");
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double d = predicted[i] - reference[i];
    num += d * d;
    den += reference[i] * reference[i];
  }
  if (den == 0.0) {
    throw InvalidArgument("relative_l2_grid: reference has zero norm");
  }
  return std::sqrt(num) / std::sqrt(den);
}

QuadratureError relative_l2_quadrature(const ScalarFn& predicted,
                                       const ScalarFn& exact,
                                       const sample::QuadratureRule& rule) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const auto x = rule.node(i);
    const double e = exact(x);
    const double d = predicted(x) - e;
    num += rule.weights[i] * d * d;
    den += rule.weights[i] * e * e;
  }
  if (den == 0.0) {
    throw InvalidArgument("relative_l2_quadrature: zero denominator");
  }
  QuadratureError err;
  err.ratio = num / den;
  err.sqrt_ratio = std::sqrt(num / den);
  return err;
}

ErrorReport ErrorReport::compute(std::span<const double> errors) {
  if (errors.empty()) throw InvalidArgument("error report: no entries");
  ErrorReport report;
  report.per_seed.assign(errors.begin(), errors.end());
  double sum = 0.0;
  for (double e : errors) sum += e;
  report.mean = sum / static_cast<double>(errors.size());
  double var = 0.0;
  for (double e : errors) var += (e - report.mean) * (e - report.mean);
  report.stddev = std::sqrt(var / static_cast<double>(errors.size()));
  report.best_index = 0;
  for (std::size_t i = 1; i < errors.size(); ++i) {
    if (errors[i] < errors[report.best_index]) report.best_index = i;
  }
  return report;
}

}  // namespace bspinn::eval
