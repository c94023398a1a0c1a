#include <cmath>

#include "problems/problem.hpp"

namespace bspinn::prob {

namespace {

/// Three-Gaussian bump field on [-0.9,0.9]x[-0.6,0.6], constant 0.5 outside.
double target_value(double x, double y) {
  if (x >= -0.9 && x <= 0.9 && y >= -0.6 && y <= 0.6) {
    return std::exp(-((x + 0.5) * (x + 0.5) / 0.02 + y * y / 0.02)) +
           std::exp(-(x * x / 0.08 + y * y / 0.08)) +
           std::exp(-((x - 0.5) * (x - 0.5) / 0.02 + y * y / 0.02));
  }
  return 0.5;
}

}  // namespace

ProblemDef make_fnfit() {
  ProblemDef p;
  p.name = "fnfit";
  p.domain = sample::BoxDomain::cube(2, -1.0, 1.0);
  p.output_dim = 1;

  // Plain least-squares fit: the "residual" is u(x,y) - f(x,y).
  p.interior.arity = 1;
  p.interior.target_count = 1;
  p.interior.targets = [](std::span<const double> x, std::span<double> out) {
    out[0] = target_value(x[0], x[1]);
  };
  p.interior.build = [](const FieldFn& field, std::span<const ad::Expr> x,
                        std::span<const ad::Expr> t) {
    auto out = field(x);
    return std::vector<ad::Expr>{out[0] - t[0]};
  };

  p.exact = [](std::span<const double> x, std::span<double> out) {
    out[0] = target_value(x[0], x[1]);
  };

  p.defaults.arch_fnn = "fnn:4*32";
  p.defaults.arch_bsnn = "bsnn:32-4";
  p.defaults.activation = net::Activation::kSigmoid;
  p.defaults.n_interior = 15000;
  p.defaults.lambda_b = 0.0;
  p.defaults.lambda_i = 0.0;
  p.defaults.epochs = 10000;
  p.defaults.lr0 = 1e-3;
  p.defaults.scheduler = SchedulerKind::kPlateau;
  p.defaults.eval_kind = EvalKind::kGrid;
  p.defaults.eval_grid = {201, 201};
  return p;
}

}  // namespace bspinn::prob
