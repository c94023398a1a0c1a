#include <doctest.h>

#include <cmath>
#include <numbers>

#include "network/forward.hpp"
#include "problems/problem.hpp"
#include "sampling/samplers.hpp"
#include "support/oracles.hpp"

using namespace bspinn;

namespace {

/// Interior residuals of a field at a point, evaluated through the same
/// jet machinery training uses.
std::vector<double> residuals_at(const prob::ProblemDef& problem,
                                 const prob::FieldFn& field,
                                 std::span<const double> point) {
  ad::Graph g;
  const auto xs = g.inputs(problem.domain.dim());
  std::vector<double> targets(problem.interior.target_count, 0.0);
  const auto ts = g.inputs(problem.interior.target_count);
  if (problem.interior.target_count > 0) {
    problem.interior.targets(point, targets);
  }
  const auto rs = problem.interior.build(field, xs, ts);
  std::vector<double> inputs(point.begin(), point.end());
  inputs.insert(inputs.end(), targets.begin(), targets.end());
  std::vector<double> out;
  out.reserve(rs.size());
  for (const auto& r : rs) out.push_back(g.eval(r, inputs));
  return out;
}

prob::FieldFn constant_field(std::vector<double> values) {
  return [values](std::span<const ad::Expr> x) {
    ad::Graph& g = *x[0].graph();
    std::vector<ad::Expr> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(g.constant(v));
    return out;
  };
}

}  // namespace

TEST_CASE("fnfit target values") {
  const auto p = prob::make_fnfit();
  const auto f = [&](double x, double y) {
    const double pt[2] = {x, y};
    double out = 0.0;
    p.interior.targets({pt, 2}, {&out, 1});
    return out;
  };
  CHECK(f(0.95, 0.0) == 0.5);  // outside the bump window
  CHECK(f(0.0, 0.0) ==
        doctest::Approx(1.0 + 2.0 * std::exp(-12.5)).epsilon(1e-12));
  CHECK(f(0.5, 0.0) ==
        doctest::Approx(1.0 + std::exp(-3.125) + std::exp(-50.0)).epsilon(1e-12));
  CHECK(f(0.5, 0.0) == doctest::Approx(1.04394).epsilon(1e-4));

  // Residual is u - f: a field equal to f has zero residual.
  const double pt[2] = {0.3, -0.2};
  const auto field = constant_field({f(0.3, -0.2)});
  CHECK(residuals_at(p, field, {pt, 2})[0] == 0.0);
}

TEST_CASE("burgers residual") {
  const auto p = prob::make_burgers();
  SUBCASE("constant fields have zero residual") {
    for (double c : {0.0, 2.5}) {
      const double pt[2] = {0.3, 0.4};
      CHECK(residuals_at(p, constant_field({c}), {pt, 2})[0] == 0.0);
    }
  }
  SUBCASE("hand-built u = sin(x) t") {
    const prob::FieldFn field = [](std::span<const ad::Expr> x) {
      return std::vector<ad::Expr>{sin(x[0]) * x[1]};
    };
    util::Rng rng(5);
    for (int i = 0; i < 10; ++i) {
      const double x = rng.uniform(-1.0, 1.0);
      const double t = rng.uniform(0.0, 1.0);
      const double pt[2] = {x, t};
      const double got = residuals_at(p, field, {pt, 2})[0];
      const double nu = 0.01 / std::numbers::pi;
      const double want = std::sin(x) + t * t * std::sin(x) * std::cos(x) +
                          nu * t * std::sin(x);
      CHECK(std::abs(got - want) < 1e-10);
    }
  }
  SUBCASE("initial and boundary data") {
    double value = -1.0;
    const double left[2] = {-1.0, 0.5};
    p.boundary.targets({left, 2}, {&value, 1});
    CHECK(value == 0.0);
    const double mid[2] = {0.5, 0.0};
    p.initial.targets({mid, 2}, {&value, 1});
    CHECK(value == doctest::Approx(-std::sin(std::numbers::pi * 0.5)));
  }
}

TEST_CASE("euler residuals") {
  const auto p = prob::make_euler();
  REQUIRE(p.output_dim == 4);
  SUBCASE("uniform flow is an exact solution") {
    const auto field = constant_field({1.0, 0.1, 0.0, 1.0});
    const double pt[3] = {0.3, 0.6, 1.1};
    const auto rs = residuals_at(p, field, {pt, 3});
    REQUIRE(rs.size() == 4);
    for (double r : rs) CHECK(std::abs(r) < 1e-14);
  }
  SUBCASE("off-shock plateau states are exact") {
    util::Rng rng(9);
    int checked = 0;
    for (int i = 0; i < 200 && checked < 100; ++i) {
      const double pt[3] = {rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0),
                            rng.uniform(0.0, 2.0)};
      const double shock_x = 0.5 + 0.1 * pt[2];
      if (std::abs(pt[0] - shock_x) < 0.02) continue;  // stay off the shock
      std::vector<double> state(4);
      p.exact({pt, 3}, state);
      const auto rs = residuals_at(p, constant_field(state), {pt, 3});
      for (double r : rs) CHECK(std::abs(r) < 1e-6);
      ++checked;
    }
    CHECK(checked == 100);
  }
  SUBCASE("boundary and initial data follow the exact shock") {
    std::vector<double> state(4);
    const double pt[3] = {0.4, 0.5, 1.0};  // 0.4 <= 0.5 + 0.1
    p.boundary.targets({pt, 3}, state);
    CHECK(state[0] == 1.4);
    const double pt2[3] = {0.62, 0.5, 1.0};  // 0.62 > 0.6
    p.boundary.targets({pt2, 3}, state);
    CHECK(state[0] == 1.0);
    const double pt3[3] = {0.4, 0.5, 0.0};
    p.initial.targets({pt3, 3}, state);
    CHECK(state[0] == 1.4);
    CHECK(state[1] == 0.1);
    CHECK(state[2] == 0.0);
    CHECK(state[3] == 1.0);
  }
}

TEST_CASE("helmholtz2d residual") {
  const auto p = prob::make_helmholtz2d({});
  const double kappa = 8.0 * std::numbers::pi;
  SUBCASE("exact solution satisfies the equation") {
    util::Rng rng(13);
    for (int i = 0; i < 100; ++i) {
      const double pt[2] = {rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
      const double r = residuals_at(p, p.exact_field, {pt, 2})[0];
      CHECK(std::abs(r) < 1e-6);
    }
  }
  SUBCASE("zero field leaves minus the forcing") {
    const double pt[2] = {0.25, 0.75};
    const double r = residuals_at(p, constant_field({0.0}), {pt, 2})[0];
    const double f = kappa * kappa * std::sin(kappa * 0.25) * std::sin(kappa * 0.75);
    CHECK(r == doctest::Approx(-f).epsilon(1e-12));
  }
  SUBCASE("exact solution meets the boundary data") {
    std::vector<double> u(1);
    for (const auto& pt : {std::pair{0.0, 0.3}, std::pair{1.0, 0.7},
                           std::pair{0.4, 0.0}, std::pair{0.6, 1.0}}) {
      const double point[2] = {pt.first, pt.second};
      p.exact({point, 2}, u);
      CHECK(std::abs(u[0]) < 1e-12);
    }
  }
  SUBCASE("kappa override is validated") {
    prob::ProblemParams params;
    params.dim = 5;
    CHECK_THROWS_AS(prob::make_helmholtz2d(params), InvalidArgument);
  }
}

TEST_CASE("helmholtz3d residual") {
  const auto p = prob::make_helmholtz3d({});
  SUBCASE("exact solution satisfies the equation") {
    util::Rng rng(17);
    for (int i = 0; i < 100; ++i) {
      const double pt[3] = {rng.uniform(0.0, 150.0), rng.uniform(0.0, 150.0),
                            rng.uniform(0.0, 150.0)};
      CHECK(std::abs(residuals_at(p, p.exact_field, {pt, 3})[0]) < 1e-8);
    }
  }
  SUBCASE("zero field leaves minus the forcing") {
    const double kappa = 8.0 * std::numbers::pi / 150.0;
    const double pt[3] = {10.0, 20.0, 30.0};
    const double f = 2.0 * kappa * kappa * std::sin(kappa * 10.0) *
                     std::sin(kappa * 20.0) * std::sin(kappa * 30.0);
    CHECK(residuals_at(p, constant_field({0.0}), {pt, 3})[0] ==
          doctest::Approx(-f).epsilon(1e-12));
  }
  SUBCASE("domain override changes the box") {
    prob::ProblemParams params;
    params.box = {0.0, 1.0};
    const auto small = prob::make_helmholtz3d(params);
    CHECK(small.domain.hi[0] == 1.0);
  }
}

TEST_CASE("poisson residual") {
  const auto p = prob::make_poisson({});
  const int d = 10;
  const double c = 0.6 * std::numbers::pi;
  SUBCASE("exact solution satisfies the equation") {
    util::Rng rng(19);
    for (int i = 0; i < 100; ++i) {
      std::vector<double> pt(d);
      for (double& x : pt) x = rng.uniform(-1.0, 1.0);
      CHECK(std::abs(residuals_at(p, p.exact_field, pt)[0]) < 1e-8);
    }
  }
  SUBCASE("forcing and solution at the origin") {
    std::vector<double> zero(d, 0.0);
    // f(0) = -2/d; with u = 0 the residual is -f = 2/d = 0.2.
    CHECK(residuals_at(p, constant_field({0.0}), zero)[0] ==
          doctest::Approx(0.2).epsilon(1e-12));
    std::vector<double> u(1);
    p.exact(zero, u);
    CHECK(u[0] == 0.0);
    // Boundary data equals the exact solution.
    std::vector<double> corner(d, 1.0);
    double g = 0.0;
    p.boundary.targets(corner, {&g, 1});
    p.exact(corner, u);
    CHECK(g == u[0]);
  }
  SUBCASE("dimension override") {
    prob::ProblemParams params;
    params.dim = 4;
    const auto small = prob::make_poisson(params);
    CHECK(small.domain.dim() == 4);
    util::Rng rng(23);
    std::vector<double> pt(4);
    for (double& x : pt) x = rng.uniform(-1.0, 1.0);
    CHECK(std::abs(residuals_at(small, small.exact_field, pt)[0]) < 1e-8);
  }
}

TEST_CASE("residual builders are pure and deterministic") {
  const auto p = prob::make_helmholtz2d({});
  const net::NetworkSpec spec =
      net::NetworkSpec::parse_arch("bsnn:16-4", 2, 1, net::Activation::kSin);
  const auto params = net::init_params(spec, 3);
  ad::Graph g;
  const auto xs = g.inputs(2);
  const prob::FieldFn field = [&](std::span<const ad::Expr> x) {
    return net::build_forward(g, spec, x);
  };
  const auto rs = p.interior.build(field, xs, {});
  const double pt[2] = {0.21, 0.43};
  const double a = g.eval(rs[0], {pt, 2}, params.values());
  const double b = g.eval(rs[0], {pt, 2}, params.values());
  CHECK(a == b);
}

TEST_CASE("problem registry") {
  CHECK(prob::problem_names().size() == 6);
  CHECK_THROWS_AS(prob::make_problem("heat1d"), InvalidArgument);
  prob::ProblemParams params;
  params.kappa = 1.0;
  CHECK_THROWS_AS(prob::make_problem("burgers1d", params), InvalidArgument);
  for (const auto& name : prob::problem_names()) {
    const auto p = prob::make_problem(name);
    CHECK(p.name == name);
    CHECK(p.interior.arity >= 1);
    if (name == "euler2d") {
      CHECK(p.interior.arity == 4);
    } else {
      CHECK(p.interior.arity == 1);
    }
  }
}
