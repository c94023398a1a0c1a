#include "problems/problem.hpp"

namespace bspinn::prob {

namespace {

constexpr double kGamma = 1.4;  // diatomic-gas ratio of specific heats

/// Advected shock: rho jumps across x = 0.5 + 0.1 t; velocity and pressure
/// are uniform.
void exact_state(std::span<const double> x, std::span<double> out) {
  out[0] = x[0] <= 0.5 + 0.1 * x[2] ? 1.4 : 1.0;
  out[1] = 0.1;
  out[2] = 0.0;
  out[3] = 1.0;
}

}  // namespace

ProblemDef make_euler() {
  ProblemDef p;
  p.name = "euler2d";
  p.domain = sample::BoxDomain::space_time({0.0, 0.0}, {1.0, 1.0}, 0.0, 2.0);
  p.output_dim = 4;  // rho, u, v, p
  p.positivity_output = 0;
  p.error_component = 0;

  // Conservation residuals with the energy eliminated through the pressure
  // closure: rho E = p/(gamma-1) + rho (u^2+v^2)/2.
  p.interior.arity = 4;
  p.interior.build = [](const FieldFn& field, std::span<const ad::Expr> x,
                        std::span<const ad::Expr>) {
    auto out = field(x);
    const ad::Expr rho = out[0], u = out[1], v = out[2], pr = out[3];
    ad::Graph& g = *rho.graph();
    ad::InputTangent dx(g, x[0]);
    ad::InputTangent dy(g, x[1]);
    ad::InputTangent dt(g, x[2]);

    const ad::Expr mx = rho * u;
    const ad::Expr my = rho * v;
    const ad::Expr mxy = mx * v;  // rho u v
    const ad::Expr rho_e = pr * (1.0 / (kGamma - 1.0)) + 0.5 * rho * (u * u + v * v);
    const ad::Expr h = rho_e + pr;

    std::vector<ad::Expr> r;
    r.push_back(dt.derivative(rho) + dx.derivative(mx) + dy.derivative(my));
    r.push_back(dt.derivative(mx) + dx.derivative(mx * u + pr) +
                dy.derivative(mxy));
    r.push_back(dt.derivative(my) + dx.derivative(mxy) +
                dy.derivative(my * v + pr));
    r.push_back(dt.derivative(rho_e) + dx.derivative(u * h) +
                dy.derivative(v * h));
    return r;
  };

  const auto data_residual = [](const FieldFn& field,
                                std::span<const ad::Expr> x,
                                std::span<const ad::Expr> t) {
    auto out = field(x);
    std::vector<ad::Expr> r;
    r.reserve(out.size());
    for (std::size_t k = 0; k < out.size(); ++k) r.push_back(out[k] - t[k]);
    return r;
  };

  p.boundary.arity = 4;
  p.boundary.target_count = 4;
  p.boundary.targets = exact_state;
  p.boundary.build = data_residual;

  p.initial.arity = 4;
  p.initial.target_count = 4;
  p.initial.targets = exact_state;
  p.initial.build = data_residual;

  p.exact = exact_state;

  p.defaults.arch_fnn = "fnn:5*256";
  p.defaults.arch_bsnn = "bsnn:256-16";
  p.defaults.activation = net::Activation::kTanh;
  p.defaults.n_interior = 10000;
  p.defaults.n_initial = 400;
  p.defaults.n_boundary_per_face = 100;
  p.defaults.lambda_b = 1.0;
  p.defaults.lambda_i = 1.0;
  p.defaults.epochs = 5000;
  p.defaults.lr0 = 0.001;
  p.defaults.scheduler = SchedulerKind::kPlateau;
  p.defaults.eval_kind = EvalKind::kGrid;
  p.defaults.eval_grid = {100, 100, 100};
  return p;
}

}  // namespace bspinn::prob
