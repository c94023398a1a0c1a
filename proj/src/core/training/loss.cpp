#include "training/loss.hpp"

#include <cmath>

#include "util/rng.hpp"

namespace bspinn::train {

namespace {

constexpr std::size_t kGradChunks = 32;

/// Network forward pass as a FieldFn over one graph with shared slots.
prob::FieldFn net_field(ad::Graph& g, const net::NetworkSpec& spec) {
  return [&g, spec](std::span<const ad::Expr> x) {
    return net::build_forward(g, spec, x);
  };
}

void fill_targets(const prob::ResidualOp& op, std::span<const double> x,
                  std::span<double> out) {
  if (op.target_count > 0) op.targets(x, out);
}

}  // namespace

PointBundle sample_points(const prob::ProblemDef& problem, int n_interior,
                          int n_boundary_per_face, int n_initial,
                          const std::string& interior_sampler,
                          std::uint64_t seed) {
  PointBundle out;
  if (problem.interior.arity > 0) {
    if (n_interior <= 0) {
      throw InvalidArgument(problem.name + ": interior points required");
    }
    const std::uint64_t s = util::derive_seed(seed, util::kStreamInterior);
    if (interior_sampler == "lhs") {
      out.interior = sample::lhs_sample(problem.domain, n_interior, s);
    } else if (interior_sampler == "uniform") {
      out.interior = sample::uniform_sample(problem.domain, n_interior, s);
    } else {
      throw InvalidArgument("unknown interior sampler: " + interior_sampler);
    }
  }
  if (problem.boundary.arity > 0) {
    if (n_boundary_per_face <= 0) {
      throw InvalidArgument(problem.name + ": boundary points required");
    }
    out.boundary = sample::boundary_sample(
        problem.domain, n_boundary_per_face,
        util::derive_seed(seed, util::kStreamBoundary));
  }
  if (problem.initial.arity > 0) {
    if (n_initial <= 0) {
      throw InvalidArgument(problem.name + ": initial points required");
    }
    out.initial = sample::initial_sample(
        problem.domain, n_initial, util::derive_seed(seed, util::kStreamInitial));
  }
  return out;
}

AssembledLoss assemble_loss(const prob::ProblemDef& problem,
                            const net::NetworkSpec& spec,
                            const PointBundle& points, double lambda_b,
                            double lambda_i) {
  spec.validate();
  AssembledLoss loss;
  loss.graph = std::make_shared<ad::Graph>();
  ad::Graph& g = *loss.graph;
  const auto field = net_field(g, spec);

  const auto role_mean = [&](const prob::ResidualOp& op,
                             const sample::PointSet& pts) -> ad::Expr {
    if (op.arity == 0) return g.constant(0.0);
    if (pts.size() == 0) {
      throw InvalidArgument(problem.name + ": empty point set for role");
    }
    std::vector<ad::Expr> squares;
    squares.reserve(pts.size() * op.arity);
    std::vector<double> targets(op.target_count, 0.0);
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const auto xs = g.inputs(pts.dim);
      const auto p = pts.point(j);
      loss.inputs.insert(loss.inputs.end(), p.begin(), p.end());
      const auto ts = g.inputs(op.target_count);
      fill_targets(op, p, targets);
      loss.inputs.insert(loss.inputs.end(), targets.begin(), targets.end());
      auto rs = op.build(field, xs, ts);
      if (static_cast<int>(rs.size()) != op.arity) {
        throw Error("internal: residual arity mismatch");
      }
      for (const ad::Expr& r : rs) squares.push_back(g.square(r));
    }
    std::vector<ad::Expr> ones(squares.size(), g.constant(1.0));
    const ad::Expr sum = g.affine(ad::Expr(), ones, squares);
    return sum * (1.0 / static_cast<double>(squares.size()));
  };

  loss.interior = role_mean(problem.interior, points.interior);
  loss.boundary = role_mean(problem.boundary, points.boundary);
  loss.initial = role_mean(problem.initial, points.initial);
  loss.total =
      loss.interior + lambda_b * loss.boundary + lambda_i * loss.initial;
  return loss;
}

std::size_t LossProgram::Role::chunks() const {
  return std::min<std::size_t>(kGradChunks, n_points);
}

LossProgram::LossProgram(const prob::ProblemDef& problem,
                         const net::NetworkSpec& spec,
                         const PointBundle& points, double lambda_b,
                         double lambda_i)
    : lambda_b_(lambda_b), lambda_i_(lambda_i) {
  spec.validate();
  n_params_ = net::param_count(spec);

  const auto add_role = [&](sample::PointRole kind, const prob::ResidualOp& op,
                            const sample::PointSet& pts) {
    if (op.arity == 0) return;
    if (pts.size() == 0) {
      throw InvalidArgument(problem.name + ": empty point set for role");
    }
    auto role = std::make_unique<Role>();
    role->kind = kind;
    role->dim = pts.dim;
    role->target_count = op.target_count;
    role->n_points = pts.size();

    ad::Graph& g = role->graph;
    const auto xs = g.inputs(pts.dim);
    const auto ts = g.inputs(op.target_count);
    const auto field = net_field(g, spec);
    // The residual builder sees the network lazily so the watched output
    // node can be recorded for positivity diagnostics.
    std::vector<ad::Expr> outputs;
    const prob::FieldFn wrapped = [&](std::span<const ad::Expr> in) {
      auto out = field(in);
      if (outputs.empty()) outputs = out;
      return out;
    };
    auto rs = op.build(wrapped, xs, ts);
    if (static_cast<int>(rs.size()) != op.arity) {
      throw Error("internal: residual arity mismatch");
    }
    for (const ad::Expr& r : rs) role->roots.push_back(r.id());
    if (kind == sample::PointRole::kInterior && problem.positivity_output >= 0 &&
        problem.positivity_output < static_cast<int>(outputs.size())) {
      role->flag_node = outputs[problem.positivity_output].id();
    }

    const std::size_t stride =
        static_cast<std::size_t>(role->dim + role->target_count);
    role->rows.resize(role->n_points * stride);
    std::vector<double> targets(op.target_count, 0.0);
    for (std::size_t j = 0; j < role->n_points; ++j) {
      double* row = role->rows.data() + j * stride;
      const auto p = pts.point(j);
      std::copy(p.begin(), p.end(), row);
      if (op.target_count > 0) {
        fill_targets(op, p, targets);
        std::copy(targets.begin(), targets.end(), row + role->dim);
      }
    }

    const std::size_t k = role->chunks();
    role->chunk_ws.reserve(k);
    for (std::size_t c = 0; c < k; ++c) {
      role->chunk_ws.push_back(std::make_unique<ad::Workspace>(role->graph));
    }
    roles_.push_back(std::move(role));
  };

  add_role(sample::PointRole::kInterior, problem.interior, points.interior);
  add_role(sample::PointRole::kBoundary, problem.boundary, points.boundary);
  add_role(sample::PointRole::kInitial, problem.initial, points.initial);
}

LossParts LossProgram::value_and_gradient(std::span<const double> params,
                                          std::span<double> grad,
                                          util::ThreadPool& pool) {
  if (grad.size() != n_params_) {
    throw InvalidArgument("loss gradient buffer size mismatch");
  }
  std::fill(grad.begin(), grad.end(), 0.0);
  return run(params, &grad, pool);
}

LossParts LossProgram::value(std::span<const double> params,
                             util::ThreadPool& pool) {
  return run(params, nullptr, pool);
}

LossParts LossProgram::run(std::span<const double> params,
                           std::span<double>* grad, util::ThreadPool& pool) {
  if (params.size() != n_params_) {
    throw InvalidArgument("loss parameter vector size mismatch");
  }
  LossParts parts;
  for (auto& role_ptr : roles_) {
    Role& role = *role_ptr;
    const std::size_t k = role.chunks();
    const std::size_t arity = role.roots.size();
    const std::size_t stride =
        static_cast<std::size_t>(role.dim + role.target_count);

    if (grad != nullptr && role.chunk_grad.size() != k) {
      role.chunk_grad.assign(k, std::vector<double>(n_params_, 0.0));
    }

    std::vector<double> chunk_loss(k, 0.0);
    std::vector<std::size_t> chunk_flags(k, 0);

    pool.run(k, [&](std::size_t c) {
      ad::Workspace& ws = *role.chunk_ws[c];
      const std::size_t begin = role.n_points * c / k;
      const std::size_t end = role.n_points * (c + 1) / k;
      double local = 0.0;
      std::size_t flags = 0;
      std::vector<std::pair<ad::NodeId, double>> seeds(arity);
      std::vector<double>* cg = nullptr;
      if (grad != nullptr) {
        cg = &role.chunk_grad[c];
        std::fill(cg->begin(), cg->end(), 0.0);
      }
      for (std::size_t j = begin; j < end; ++j) {
        const std::span<const double> row{role.rows.data() + j * stride, stride};
        ws.forward(row, params);
        for (std::size_t r = 0; r < arity; ++r) {
          const double res = ws.value(role.roots[r]);
          local += res * res;
          seeds[r] = {role.roots[r], 2.0 * res};
        }
        if (role.flag_node != ad::kNoNode && ws.value(role.flag_node) <= 0.0) {
          ++flags;
        }
        if (grad != nullptr) ws.reverse(seeds, *cg, params);
      }
      chunk_loss[c] = local;
      chunk_flags[c] = flags;
    });

    double sum = 0.0;
    std::size_t flags = 0;
    for (std::size_t c = 0; c < k; ++c) {
      sum += chunk_loss[c];
      flags += chunk_flags[c];
    }
    const double denom = static_cast<double>(role.n_points * arity);
    const double mean = sum / denom;

    double weight = 1.0;
    switch (role.kind) {
      case sample::PointRole::kInterior:
        parts.interior = mean;
        parts.positivity_flags += flags;
        break;
      case sample::PointRole::kBoundary:
        parts.boundary = mean;
        weight = lambda_b_;
        break;
      case sample::PointRole::kInitial:
        parts.initial = mean;
        weight = lambda_i_;
        break;
      default:
        throw Error("internal: unexpected role");
    }

    if (grad != nullptr) {
      const double scale = weight / denom;
      double* g = grad->data();
      for (std::size_t c = 0; c < k; ++c) {
        const double* cg = role.chunk_grad[c].data();
        for (std::size_t i = 0; i < n_params_; ++i) g[i] += scale * cg[i];
      }
    }
  }
  parts.total =
      parts.interior + lambda_b_ * parts.boundary + lambda_i_ * parts.initial;
  return parts;
}

}  // namespace bspinn::train
