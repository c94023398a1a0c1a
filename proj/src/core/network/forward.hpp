#pragma once

#include <memory>

#include "autodiff/graph.hpp"
#include "network/spec.hpp"

namespace bspinn::net {

/// Applies the configured hidden activation.
ad::Expr apply_activation(ad::Graph& g, ad::Expr e, Activation act);

/// Emits the network's forward pass over existing input expressions and
/// returns the output expressions (linear final layer). Creates the graph's
/// parameter nodes in ParamLayout order; the graph must not already have
/// parameters.
std::vector<ad::Expr> build_forward(ad::Graph& g, const NetworkSpec& spec,
                                    std::span<const ad::Expr> x);

/// Per-channel additive decomposition of a scalar-output network: the final
/// affine map split over last-hidden-layer neuron groups. For BsNN the
/// groups are the last layer's neuron blocks; for FNN a group size must be
/// given and divide the width. Plain networks only.
struct ChannelTerms {
  std::vector<ad::Expr> contributions;
  ad::Expr bias;
};
ChannelTerms build_channel_terms(ad::Graph& g, const NetworkSpec& spec,
                                 std::span<const ad::Expr> x,
                                 int fnn_group_size = 0);

/// Immutable compiled forward pass, shareable across threads.
struct NetworkProgram {
  ad::Graph graph;
  std::vector<ad::NodeId> outputs;
  std::vector<ad::NodeId> channel_contributions;  // empty unless requested
  ad::NodeId channel_bias = ad::kNoNode;
  int input_dim = 0;
  int output_dim = 0;

  /// channel_group < 0 builds the plain forward pass; >= 0 additionally
  /// exposes channel contributions (value ignored for BsNN).
  static std::shared_ptr<const NetworkProgram> build(const NetworkSpec& spec,
                                                     int channel_group = -1);
};

/// Repeated plain forward evaluation at fixed parameters. One instance per
/// thread; copies share the compiled program.
class NetworkEvaluator {
 public:
  NetworkEvaluator(const NetworkSpec& spec, std::span<const double> params);
  NetworkEvaluator(std::shared_ptr<const NetworkProgram> program,
                   std::span<const double> params);
  NetworkEvaluator(const NetworkEvaluator& other);

  int input_dim() const { return program_->input_dim; }
  int output_dim() const { return program_->output_dim; }

  /// Network outputs at x; the view is valid until the next call.
  std::span<const double> predict(std::span<const double> x);

  /// Channel contributions at x (program must be built with channels).
  std::span<const double> predict_channels(std::span<const double> x,
                                           double* bias_out = nullptr);

 private:
  std::shared_ptr<const NetworkProgram> program_;
  ad::Workspace workspace_;
  std::vector<double> params_;
  std::vector<double> out_;
};

/// One-shot channel decomposition values (sum + bias equals the output).
struct ChannelValues {
  std::vector<double> contributions;
  double bias = 0.0;
};
ChannelValues channel_outputs(const NetworkSpec& spec, const ParamStore& params,
                              std::span<const double> x, int fnn_group_size = 0);

}  // namespace bspinn::net
