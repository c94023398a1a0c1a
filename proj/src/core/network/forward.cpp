#include "network/forward.hpp"

namespace bspinn::net {

namespace {

using ad::Expr;
using ad::Graph;

struct Cursor {
  std::uint32_t pos = 0;  // parameter slot cursor
};

std::vector<Expr> activate_all(Graph& g, std::span<const Expr> pre,
                               Activation act) {
  std::vector<Expr> out;
  out.reserve(pre.size());
  for (Expr e : pre) out.push_back(apply_activation(g, e, act));
  return out;
}

/// One dense affine map (pre-activation): rows nodes over the given args.
std::vector<Expr> emit_affine_rows(Graph& g, Cursor& cur,
                                   std::span<const Expr> args, int rows) {
  const std::uint32_t cols = static_cast<std::uint32_t>(args.size());
  const std::uint32_t wbase = cur.pos;
  const std::uint32_t bbase = wbase + static_cast<std::uint32_t>(rows) * cols;
  std::vector<Expr> pre;
  pre.reserve(rows);
  for (std::uint32_t r = 0; r < static_cast<std::uint32_t>(rows); ++r) {
    pre.push_back(g.affine_params(wbase + r * cols, bbase + r, args));
  }
  cur.pos = bbase + static_cast<std::uint32_t>(rows);
  return pre;
}

/// Last hidden layer activations of the plain structure (FNN or BsNN).
/// Pre-activations of a whole layer are emitted before its activations so
/// that activation node ids stay consecutive.
std::vector<Expr> emit_hidden_stack(Graph& g, Cursor& cur,
                                    const NetworkSpec& spec,
                                    std::span<const Expr> x) {
  const int n_hidden = spec.hidden_layer_count();
  std::vector<Expr> acts;
  if (spec.kind == NetworkSpec::Kind::kFnn) {
    std::vector<Expr> args(x.begin(), x.end());
    for (int l = 0; l < n_hidden; ++l) {
      const auto pre = emit_affine_rows(g, cur, args, spec.width);
      args = activate_all(g, pre, spec.activation);
    }
    acts = std::move(args);
  } else {
    auto pre = emit_affine_rows(g, cur, x, spec.block_first);
    acts = activate_all(g, pre, spec.activation);
    for (int l = 1; l < n_hidden; ++l) {
      const int blocks = spec.blocks_in_layer(l);
      const int rows = spec.block_size(l);
      const int parent_size = spec.block_size(l - 1);
      std::vector<Expr> layer_pre;
      layer_pre.reserve(spec.block_first);
      for (int j = 0; j < blocks; ++j) {
        const auto parent =
            std::span<const Expr>(acts).subspan(
                static_cast<std::size_t>(j / 2) * parent_size, parent_size);
        auto block_pre = emit_affine_rows(g, cur, parent, rows);
        layer_pre.insert(layer_pre.end(), block_pre.begin(), block_pre.end());
      }
      acts = activate_all(g, layer_pre, spec.activation);
    }
  }
  return acts;
}

/// Plain structure from x to out_dim outputs (linear final affine).
std::vector<Expr> emit_plain(Graph& g, Cursor& cur, const NetworkSpec& spec,
                             std::span<const Expr> x, int out_dim) {
  const auto acts = emit_hidden_stack(g, cur, spec, x);
  return emit_affine_rows(g, cur, acts, out_dim);
}

std::vector<Expr> emit_forward(Graph& g, Cursor& cur, const NetworkSpec& spec,
                               std::span<const Expr> x) {
  if (spec.residual_blocks == 0) {
    return emit_plain(g, cur, spec, x, spec.output_dim);
  }
  const int w = spec.hidden_width();
  const auto lift_pre = emit_affine_rows(g, cur, x, w);
  std::vector<Expr> y = activate_all(g, lift_pre, spec.activation);
  for (int b = 0; b < spec.residual_blocks; ++b) {
    const auto z = emit_plain(g, cur, spec, y, w);
    std::vector<Expr> next;
    next.reserve(w);
    for (int r = 0; r < w; ++r) next.push_back(g.add(y[r], z[r]));
    y = std::move(next);
  }
  return emit_affine_rows(g, cur, y, spec.output_dim);
}

std::uint32_t make_params(Graph& g, const NetworkSpec& spec) {
  spec.validate();
  const std::size_t total = param_count(spec);
  if (g.param_count() == 0) return g.reserve_param_slots(total);
  // Re-instantiating the same network at another point shares the slots.
  if (g.param_count() == total) return 0;
  throw InvalidArgument("build_forward: graph holds a different network");
}

void check_input_dim(const NetworkSpec& spec, std::span<const Expr> x) {
  if (static_cast<int>(x.size()) != spec.input_dim) {
    throw InvalidArgument("forward: expected " + std::to_string(spec.input_dim) +
                          " inputs, got " + std::to_string(x.size()));
  }
}

}  // namespace

ad::Expr apply_activation(Graph& g, Expr e, Activation act) {
  switch (act) {
    case Activation::kTanh: return g.tanh(e);
    case Activation::kSin: return g.sin(e);
    case Activation::kSigmoid: return g.sigmoid(e);
  }
  throw InvalidArgument("unknown activation");
}

std::vector<Expr> build_forward(Graph& g, const NetworkSpec& spec,
                                std::span<const Expr> x) {
  check_input_dim(spec, x);
  make_params(g, spec);
  Cursor cur{0};
  auto out = emit_forward(g, cur, spec, x);
  if (cur.pos != g.param_count()) {
    throw Error("internal: parameter layout / builder mismatch");
  }
  return out;
}

ChannelTerms build_channel_terms(Graph& g, const NetworkSpec& spec,
                                 std::span<const Expr> x, int fnn_group_size) {
  check_input_dim(spec, x);
  if (spec.residual_blocks != 0) {
    throw InvalidArgument("channels: plain networks only");
  }
  if (spec.output_dim != 1) {
    throw InvalidArgument("channels: scalar-output networks only");
  }
  const int width = spec.hidden_width();
  int group;
  if (spec.kind == NetworkSpec::Kind::kBsnn) {
    group = spec.block_size(spec.hidden_layer_count() - 1);
  } else {
    group = fnn_group_size;
    if (group <= 0 || width % group != 0) {
      throw InvalidArgument("channels: FNN group size must divide the width");
    }
  }

  make_params(g, spec);
  Cursor cur{0};
  const auto acts = emit_hidden_stack(g, cur, spec, x);

  // Split the final affine map into per-group partial sums.
  const std::uint32_t wbase = cur.pos;
  const std::uint32_t bias_pos = wbase + static_cast<std::uint32_t>(width);
  ChannelTerms terms;
  terms.bias = g.param_ref(bias_pos);
  const int n_channels = width / group;
  terms.contributions.reserve(n_channels);
  for (int j = 0; j < n_channels; ++j) {
    const auto args = std::span<const Expr>(acts).subspan(
        static_cast<std::size_t>(j) * group, group);
    terms.contributions.push_back(g.affine_params(
        wbase + static_cast<std::uint32_t>(j) * group, ad::kNoNode, args));
  }
  return terms;
}

std::shared_ptr<const NetworkProgram> NetworkProgram::build(
    const NetworkSpec& spec, int channel_group) {
  auto prog = std::make_shared<NetworkProgram>();
  prog->input_dim = spec.input_dim;
  prog->output_dim = spec.output_dim;
  const auto x = prog->graph.inputs(spec.input_dim);
  if (channel_group >= 0) {
    // Channel decomposition shares the hidden stack; the network output is
    // reconstructed as sum of contributions + bias.
    auto terms = build_channel_terms(prog->graph, spec, x, channel_group);
    for (Expr e : terms.contributions) {
      prog->channel_contributions.push_back(e.id());
    }
    prog->channel_bias = terms.bias.id();
    std::vector<Expr> ones(terms.contributions.size(),
                           prog->graph.constant(1.0));
    prog->outputs.push_back(
        prog->graph.affine(terms.bias, ones, terms.contributions).id());
  } else {
    for (Expr e : build_forward(prog->graph, spec, x)) {
      prog->outputs.push_back(e.id());
    }
  }
  return prog;
}

NetworkEvaluator::NetworkEvaluator(const NetworkSpec& spec,
                                   std::span<const double> params)
    : NetworkEvaluator(NetworkProgram::build(spec, -1), params) {}

NetworkEvaluator::NetworkEvaluator(std::shared_ptr<const NetworkProgram> program,
                                   std::span<const double> params)
    : program_(std::move(program)),
      workspace_(program_->graph),
      params_(params.begin(), params.end()),
      out_(program_->outputs.size(), 0.0) {
  if (params_.size() != program_->graph.param_count()) {
    throw InvalidArgument("evaluator: parameter vector length mismatch");
  }
}

NetworkEvaluator::NetworkEvaluator(const NetworkEvaluator& other)
    : program_(other.program_),
      workspace_(program_->graph),
      params_(other.params_),
      out_(other.out_.size(), 0.0) {}

std::span<const double> NetworkEvaluator::predict(std::span<const double> x) {
  workspace_.forward(x, params_);
  for (std::size_t i = 0; i < program_->outputs.size(); ++i) {
    out_[i] = workspace_.value(program_->outputs[i]);
  }
  return out_;
}

std::span<const double> NetworkEvaluator::predict_channels(
    std::span<const double> x, double* bias_out) {
  if (program_->channel_contributions.empty()) {
    throw InvalidArgument("evaluator: program built without channels");
  }
  workspace_.forward(x, params_);
  out_.resize(program_->channel_contributions.size());
  for (std::size_t i = 0; i < out_.size(); ++i) {
    out_[i] = workspace_.value(program_->channel_contributions[i]);
  }
  if (bias_out) *bias_out = workspace_.value(program_->channel_bias);
  return out_;
}

ChannelValues channel_outputs(const NetworkSpec& spec, const ParamStore& params,
                              std::span<const double> x, int fnn_group_size) {
  if (spec.kind == NetworkSpec::Kind::kFnn && fnn_group_size <= 0) {
    throw InvalidArgument("channels: FNN requires a group size");
  }
  NetworkEvaluator eval(NetworkProgram::build(spec, fnn_group_size),
                        params.values());
  ChannelValues values;
  const auto contrib = eval.predict_channels(x, &values.bias);
  values.contributions.assign(contrib.begin(), contrib.end());
  return values;
}

}  // namespace bspinn::net
