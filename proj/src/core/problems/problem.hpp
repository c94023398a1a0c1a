#pragma once

#include <functional>
#include <optional>
#include <string>

#include "autodiff/graph.hpp"
#include "autodiff/tangent.hpp"
#include "network/spec.hpp"
#include "sampling/domain.hpp"

namespace bspinn::prob {

/// Symbolic field: point expressions -> output expressions. Either a
/// network forward pass or a hand-coded closed form.
using FieldFn =
    std::function<std::vector<ad::Expr>(std::span<const ad::Expr>)>;

/// Plain-arithmetic vector function of a point (exact solutions, data).
using PointFn =
    std::function<void(std::span<const double>, std::span<double>)>;

/// One residual family (interior / boundary / initial). Data values enter
/// the graph as extra bound inputs filled by `targets`, so gradients do not
/// flow through them.
struct ResidualOp {
  int arity = 0;         // residual components; 0 = role unused
  int target_count = 0;  // extra per-point inputs
  PointFn targets;
  std::function<std::vector<ad::Expr>(const FieldFn& field,
                                      std::span<const ad::Expr> x,
                                      std::span<const ad::Expr> targets)>
      build;
};

enum class SchedulerKind { kPlateau, kExponential };

enum class EvalKind { kGrid, kRandomPoints, kQuadrature };

struct ProblemDefaults {
  std::string arch_fnn;
  std::string arch_bsnn;
  net::Activation activation = net::Activation::kTanh;
  int residual_blocks = 0;
  int n_interior = 0;
  int n_initial = 0;
  int n_boundary_per_face = 0;
  std::string interior_sampler = "uniform";  // or "lhs"
  double lambda_b = 1.0;
  double lambda_i = 1.0;
  long long epochs = 0;
  double lr0 = 1e-3;
  SchedulerKind scheduler = SchedulerKind::kPlateau;
  EvalKind eval_kind = EvalKind::kGrid;
  std::vector<int> eval_grid;
  int eval_random_points = 10000;  // per region, kRandomPoints only
  int quad_points_per_dim = 4;     // kQuadrature only
  int channel_group = 16;          // FNN channel grouping
};

struct ProblemDef {
  std::string name;
  sample::BoxDomain domain;
  int output_dim = 1;
  ResidualOp interior;
  ResidualOp boundary;
  ResidualOp initial;
  PointFn exact;        // null if no closed form
  FieldFn exact_field;  // graph-expressible closed form; null otherwise
  /// Output component that must stay positive (density); -1 = none.
  int positivity_output = -1;
  /// Error-report component for multi-output problems.
  int error_component = 0;
  ProblemDefaults defaults;
};

/// Constant overrides for the parameterizable benchmarks.
struct ProblemParams {
  std::optional<double> kappa;                      // helmholtz2d/3d
  std::optional<int> dim;                           // poisson
  std::optional<double> c;                          // poisson
  std::optional<std::pair<double, double>> box;     // helmholtz3d, poisson
};

ProblemDef make_fnfit();
ProblemDef make_burgers();
ProblemDef make_euler();
ProblemDef make_helmholtz2d(const ProblemParams& params);
ProblemDef make_helmholtz3d(const ProblemParams& params);
ProblemDef make_poisson(const ProblemParams& params);

/// Problems by CLI name: fnfit, burgers1d, euler2d, helmholtz2d,
/// helmholtz3d, poisson10d. Throws InvalidArgument for unknown names or
/// inapplicable params.
ProblemDef make_problem(std::string_view name,
                        const ProblemParams& params = {});
std::vector<std::string> problem_names();

}  // namespace bspinn::prob
