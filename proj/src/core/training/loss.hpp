#pragma once

#include <memory>

#include "network/forward.hpp"
#include "problems/problem.hpp"
#include "sampling/samplers.hpp"
#include "util/threadpool.hpp"

namespace bspinn::train {

struct LossParts {
  double total = 0.0;
  double interior = 0.0;
  double boundary = 0.0;
  double initial = 0.0;
  /// Points where the positivity-watched output was <= 0 (density checks).
  std::size_t positivity_flags = 0;
};

struct PointBundle {
  sample::PointSet interior;
  sample::PointSet boundary;
  sample::PointSet initial;
};

/// Samples every role the problem uses, with one independent stream per
/// role derived from the seed.
PointBundle sample_points(const prob::ProblemDef& problem, int n_interior,
                          int n_boundary_per_face, int n_initial,
                          const std::string& interior_sampler,
                          std::uint64_t seed);

/// The loss as one expression graph: mean-of-squares per role, weighted
/// sum. Practical for verification-scale point counts; training uses
/// LossProgram.
struct AssembledLoss {
  std::shared_ptr<ad::Graph> graph;
  ad::Expr total;
  ad::Expr interior;
  ad::Expr boundary;
  ad::Expr initial;
  std::vector<double> inputs;

  double value(std::span<const double> params) {
    return graph->eval(total, inputs, params);
  }
  std::vector<double> gradient(std::span<const double> params) {
    return graph->grad_params(total, inputs, params);
  }
};

AssembledLoss assemble_loss(const prob::ProblemDef& problem,
                            const net::NetworkSpec& spec,
                            const PointBundle& points, double lambda_b,
                            double lambda_i);

/// Full-batch loss/gradient by re-evaluating one residual tape per role
/// across its points. Points are split into fixed chunks reduced in index
/// order, so results do not depend on the pool size.
class LossProgram {
 public:
  LossProgram(const prob::ProblemDef& problem, const net::NetworkSpec& spec,
              const PointBundle& points, double lambda_b, double lambda_i);

  LossParts value_and_gradient(std::span<const double> params,
                               std::span<double> grad, util::ThreadPool& pool);
  LossParts value(std::span<const double> params, util::ThreadPool& pool);

  std::size_t param_count() const { return n_params_; }

 private:
  struct Role {
    sample::PointRole kind = sample::PointRole::kInterior;
    ad::Graph graph;
    std::vector<ad::NodeId> roots;
    ad::NodeId flag_node = ad::kNoNode;
    int dim = 0;
    int target_count = 0;
    std::size_t n_points = 0;
    std::vector<double> rows;
    std::vector<std::unique_ptr<ad::Workspace>> chunk_ws;
    std::vector<std::vector<double>> chunk_grad;
    std::size_t chunks() const;
  };

  LossParts run(std::span<const double> params, std::span<double>* grad,
                util::ThreadPool& pool);

  std::vector<std::unique_ptr<Role>> roles_;
  std::size_t n_params_ = 0;
  double lambda_b_ = 1.0;
  double lambda_i_ = 1.0;
};

}  // namespace bspinn::train
