#include <cmath>
#include <numbers>

#include "problems/problem.hpp"

namespace bspinn::prob {

namespace {

/// sum of coordinates as one affine node with unit coefficients.
ad::Expr coord_sum(std::span<const ad::Expr> x) {
  ad::Graph& g = *x[0].graph();
  std::vector<ad::Expr> ones(x.size(), g.constant(1.0));
  return g.affine(ad::Expr(), ones, x);
}

}  // namespace

ProblemDef make_poisson(const ProblemParams& params) {
  if (params.kappa) {
    throw InvalidArgument("poisson10d: kappa is not applicable");
  }
  const int d = params.dim.value_or(10);
  if (d < 1) throw InvalidArgument("poisson10d: dim must be >= 1");
  const double c = params.c.value_or(0.6 * std::numbers::pi);
  const auto box = params.box.value_or(std::make_pair(-1.0, 1.0));

  ProblemDef p;
  p.name = "poisson10d";
  p.domain = sample::BoxDomain::cube(d, box.first, box.second);
  p.output_dim = 1;

  // -Laplace(u) = f,  f = d c^2 sin(c sum x_i) - 2/d
  p.interior.arity = 1;
  p.interior.build = [d, c](const FieldFn& field, std::span<const ad::Expr> x,
                            std::span<const ad::Expr>) {
    const ad::Expr u = field(x)[0];
    ad::Expr lap = ad::input_jet(u, x[0]).second;
    for (int k = 1; k < d; ++k) lap = lap + ad::input_jet(u, x[k]).second;
    const ad::Expr f =
        (d * c * c) * sin(c * coord_sum(x)) - (2.0 / d);
    return std::vector<ad::Expr>{-lap - f};
  };

  // u = g on the boundary, g the exact solution.
  const auto exact_value = [d, c](std::span<const double> x) {
    double s = 0.0;
    for (int k = 0; k < d; ++k) s += x[k];
    const double mean = s / d;
    return mean * mean + std::sin(c * s);
  };
  p.boundary.arity = 1;
  p.boundary.target_count = 1;
  p.boundary.targets = [exact_value](std::span<const double> x,
                                     std::span<double> out) {
    out[0] = exact_value(x);
  };
  p.boundary.build = [](const FieldFn& field, std::span<const ad::Expr> x,
                        std::span<const ad::Expr> t) {
    return std::vector<ad::Expr>{field(x)[0] - t[0]};
  };

  p.exact = [exact_value](std::span<const double> x, std::span<double> out) {
    out[0] = exact_value(x);
  };
  p.exact_field = [d, c](std::span<const ad::Expr> x) {
    const ad::Expr s = coord_sum(x);
    return std::vector<ad::Expr>{square(s * (1.0 / d)) + sin(c * s)};
  };

  p.defaults.arch_fnn = "fnn:4*256";
  p.defaults.arch_bsnn = "bsnn:256-32";
  p.defaults.activation = net::Activation::kSin;
  p.defaults.residual_blocks = 2;
  p.defaults.n_interior = 4000;
  p.defaults.n_boundary_per_face = 200;
  p.defaults.lambda_b = 1.0;
  p.defaults.lambda_i = 0.0;
  p.defaults.epochs = 10000;
  p.defaults.lr0 = 0.001;
  p.defaults.scheduler = SchedulerKind::kExponential;
  p.defaults.eval_kind = EvalKind::kQuadrature;
  p.defaults.quad_points_per_dim = 4;
  return p;
}

}  // namespace bspinn::prob
