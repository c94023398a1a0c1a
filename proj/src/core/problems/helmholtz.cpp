#include <cmath>
#include <numbers>

#include "problems/problem.hpp"

namespace bspinn::prob {

ProblemDef make_helmholtz2d(const ProblemParams& params) {
  if (params.dim || params.c || params.box) {
    throw InvalidArgument("helmholtz2d: only kappa can be overridden");
  }
  const double kappa = params.kappa.value_or(8.0 * std::numbers::pi);
  const double k2 = kappa * kappa;

  ProblemDef p;
  p.name = "helmholtz2d";
  p.domain = sample::BoxDomain::cube(2, 0.0, 1.0);
  p.output_dim = 1;

  // -Laplace(u) - kappa^2 u = f,  f = kappa^2 sin(kappa x) sin(kappa y)
  p.interior.arity = 1;
  p.interior.build = [kappa, k2](const FieldFn& field,
                                 std::span<const ad::Expr> x,
                                 std::span<const ad::Expr>) {
    const ad::Expr u = field(x)[0];
    const ad::Jet2 jx = ad::input_jet(u, x[0]);
    const ad::Jet2 jy = ad::input_jet(u, x[1]);
    const ad::Expr f = k2 * (sin(kappa * x[0]) * sin(kappa * x[1]));
    return std::vector<ad::Expr>{-(jx.second + jy.second) - k2 * u - f};
  };

  // u = 0 on the boundary
  p.boundary.arity = 1;
  p.boundary.target_count = 1;
  p.boundary.targets = [](std::span<const double>, std::span<double> out) {
    out[0] = 0.0;
  };
  p.boundary.build = [](const FieldFn& field, std::span<const ad::Expr> x,
                        std::span<const ad::Expr> t) {
    return std::vector<ad::Expr>{field(x)[0] - t[0]};
  };

  p.exact = [kappa](std::span<const double> x, std::span<double> out) {
    out[0] = std::sin(kappa * x[0]) * std::sin(kappa * x[1]);
  };
  p.exact_field = [kappa](std::span<const ad::Expr> x) {
    return std::vector<ad::Expr>{sin(kappa * x[0]) * sin(kappa * x[1])};
  };

  p.defaults.arch_fnn = "fnn:5*256";
  p.defaults.arch_bsnn = "bsnn:256-16";
  p.defaults.activation = net::Activation::kSin;
  p.defaults.n_interior = 6561;
  p.defaults.n_boundary_per_face = 80;
  p.defaults.lambda_b = 100.0;
  p.defaults.lambda_i = 0.0;
  p.defaults.epochs = 80000;
  p.defaults.lr0 = 0.001;
  p.defaults.scheduler = SchedulerKind::kPlateau;
  p.defaults.eval_kind = EvalKind::kGrid;
  p.defaults.eval_grid = {500, 500};
  p.defaults.channel_group = 16;
  return p;
}

ProblemDef make_helmholtz3d(const ProblemParams& params) {
  if (params.dim || params.c) {
    throw InvalidArgument("helmholtz3d: only kappa and domain can be overridden");
  }
  // The box stands in for the extent of the original CAD model; the
  // wavenumber is stored as the literal ratio 8*pi/150.
  const auto box = params.box.value_or(std::make_pair(0.0, 150.0));
  const double kappa = params.kappa.value_or(8.0 * std::numbers::pi / 150.0);
  const double k2 = kappa * kappa;

  ProblemDef p;
  p.name = "helmholtz3d";
  p.domain = sample::BoxDomain::cube(3, box.first, box.second);
  p.output_dim = 1;

  // -Laplace(u) - kappa^2 u = f,  f = 2 kappa^2 sin sin sin
  p.interior.arity = 1;
  p.interior.build = [kappa, k2](const FieldFn& field,
                                 std::span<const ad::Expr> x,
                                 std::span<const ad::Expr>) {
    const ad::Expr u = field(x)[0];
    ad::Expr lap = ad::input_jet(u, x[0]).second;
    lap = lap + ad::input_jet(u, x[1]).second;
    lap = lap + ad::input_jet(u, x[2]).second;
    const ad::Expr f =
        (2.0 * k2) * (sin(kappa * x[0]) * sin(kappa * x[1]) * sin(kappa * x[2]));
    return std::vector<ad::Expr>{-lap - k2 * u - f};
  };

  // Dirichlet data from the exact solution.
  p.boundary.arity = 1;
  p.boundary.target_count = 1;
  p.boundary.targets = [kappa](std::span<const double> x, std::span<double> out) {
    out[0] = std::sin(kappa * x[0]) * std::sin(kappa * x[1]) *
             std::sin(kappa * x[2]);
  };
  p.boundary.build = [](const FieldFn& field, std::span<const ad::Expr> x,
                        std::span<const ad::Expr> t) {
    return std::vector<ad::Expr>{field(x)[0] - t[0]};
  };

  p.exact = [kappa](std::span<const double> x, std::span<double> out) {
    out[0] = std::sin(kappa * x[0]) * std::sin(kappa * x[1]) *
             std::sin(kappa * x[2]);
  };
  p.exact_field = [kappa](std::span<const ad::Expr> x) {
    return std::vector<ad::Expr>{sin(kappa * x[0]) * sin(kappa * x[1]) *
                                 sin(kappa * x[2])};
  };

  p.defaults.arch_fnn = "fnn:5*512";
  p.defaults.arch_bsnn = "bsnn:512-32";
  p.defaults.activation = net::Activation::kSin;
  p.defaults.n_interior = 40000;
  p.defaults.n_boundary_per_face = 667;  // ~4000 in total over 6 faces
  p.defaults.lambda_b = 100.0;
  p.defaults.lambda_i = 0.0;
  p.defaults.epochs = 5000;
  p.defaults.lr0 = 0.001;
  p.defaults.scheduler = SchedulerKind::kPlateau;
  p.defaults.eval_kind = EvalKind::kRandomPoints;
  p.defaults.eval_random_points = 10000;
  return p;
}

}  // namespace bspinn::prob
