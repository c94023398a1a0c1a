#include <cmath>
#include <numbers>

#include "problems/problem.hpp"

namespace bspinn::prob {

ProblemDef make_burgers() {
  ProblemDef p;
  p.name = "burgers1d";
  p.domain = sample::BoxDomain::space_time({-1.0}, {1.0}, 0.0, 1.0);
  p.output_dim = 1;

  // u_t + u u_x - (0.01/pi) u_xx = 0
  p.interior.arity = 1;
  p.interior.build = [](const FieldFn& field, std::span<const ad::Expr> x,
                        std::span<const ad::Expr>) {
    const ad::Expr u = field(x)[0];
    const ad::Jet2 jx = ad::input_jet(u, x[0]);
    const ad::Expr u_t = ad::first_deriv(u, x[1]);
    const double nu = 0.01 / std::numbers::pi;
    return std::vector<ad::Expr>{u_t + u * jx.first - nu * jx.second};
  };

  // u(-1, t) = u(1, t) = 0
  p.boundary.arity = 1;
  p.boundary.target_count = 1;
  p.boundary.targets = [](std::span<const double>, std::span<double> out) {
    out[0] = 0.0;
  };
  p.boundary.build = [](const FieldFn& field, std::span<const ad::Expr> x,
                        std::span<const ad::Expr> t) {
    return std::vector<ad::Expr>{field(x)[0] - t[0]};
  };

  // u(x, 0) = -sin(pi x)
  p.initial.arity = 1;
  p.initial.target_count = 1;
  p.initial.targets = [](std::span<const double> x, std::span<double> out) {
    out[0] = -std::sin(std::numbers::pi * x[0]);
  };
  p.initial.build = [](const FieldFn& field, std::span<const ad::Expr> x,
                       std::span<const ad::Expr> t) {
    return std::vector<ad::Expr>{field(x)[0] - t[0]};
  };

  p.defaults.arch_fnn = "fnn:5*256";
  p.defaults.arch_bsnn = "bsnn:256-16";
  p.defaults.activation = net::Activation::kTanh;
  p.defaults.n_interior = 30000;
  p.defaults.n_initial = 200;
  p.defaults.n_boundary_per_face = 100;
  p.defaults.interior_sampler = "lhs";
  p.defaults.lambda_b = 1.0;
  p.defaults.lambda_i = 1.0;
  p.defaults.epochs = 10000;
  p.defaults.lr0 = 0.005;
  p.defaults.scheduler = SchedulerKind::kPlateau;
  p.defaults.eval_kind = EvalKind::kGrid;
  p.defaults.eval_grid = {256, 100};
  return p;
}

}  // namespace bspinn::prob
