#include "network/spec.hpp"

#include <cmath>

#include "util/rng.hpp"
#include "util/text.hpp"

namespace bspinn::net {

namespace {

bool is_power_of_two(int x) { return x > 0 && (x & (x - 1)) == 0; }

int log2_exact(int x) {
  int n = 0;
  while ((1 << n) < x) ++n;
  return n;
}

/// Invokes fn(layer, block, rows, cols) for every affine map of the plain
/// (non-residual) structure with the given in/out dims, in parameter order.
template <typename Fn>
void for_each_plain_map(const NetworkSpec& spec, int in_dim, int out_dim,
                        int& layer_counter, Fn&& fn) {
  const int n_hidden = spec.hidden_layer_count();
  if (spec.kind == NetworkSpec::Kind::kFnn) {
    int prev = in_dim;
    for (int l = 0; l < n_hidden; ++l) {
      fn(layer_counter++, 0, spec.width, prev);
      prev = spec.width;
    }
    fn(layer_counter++, 0, out_dim, prev);
  } else {
    fn(layer_counter++, 0, spec.block_first, in_dim);
    for (int l = 1; l < n_hidden; ++l) {
      const int blocks = spec.blocks_in_layer(l);
      const int rows = spec.block_size(l);
      const int cols = spec.block_size(l - 1);
      const int layer = layer_counter++;
      for (int j = 0; j < blocks; ++j) fn(layer, j, rows, cols);
    }
    fn(layer_counter++, 0, out_dim, spec.block_first);
  }
}

/// All affine maps of the network (lift/blocks/final for residual nets).
template <typename Fn>
void for_each_map(const NetworkSpec& spec, Fn&& fn) {
  int layer_counter = 0;
  if (spec.residual_blocks == 0) {
    for_each_plain_map(spec, spec.input_dim, spec.output_dim, layer_counter, fn);
    return;
  }
  const int w = spec.hidden_width();
  fn(layer_counter++, 0, w, spec.input_dim);  // lift
  for (int b = 0; b < spec.residual_blocks; ++b) {
    for_each_plain_map(spec, w, w, layer_counter, fn);
  }
  fn(layer_counter++, 0, spec.output_dim, w);  // final
}

}  // namespace

Activation parse_activation(std::string_view name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "sin" || name == "sine") return Activation::kSin;
  if (name == "sigmoid") return Activation::kSigmoid;
  throw ParseError("unknown activation: '" + std::string(name) + "'");
}

std::string_view activation_name(Activation a) {
  switch (a) {
    case Activation::kTanh: return "tanh";
    case Activation::kSin: return "sin";
    case Activation::kSigmoid: return "sigmoid";
  }
  return "?";
}

void NetworkSpec::validate() const {
  if (input_dim < 1 || output_dim < 1) {
    throw InvalidArgument("network: input and output dims must be >= 1");
  }
  if (residual_blocks < 0) {
    throw InvalidArgument("network: residual_blocks must be >= 0");
  }
  if (kind == Kind::kFnn) {
    if (hidden_layers < 1 || width < 1) {
      throw InvalidArgument("network: FNN needs hidden_layers >= 1 and width >= 1");
    }
  } else {
    if (!is_power_of_two(block_first) || !is_power_of_two(block_last)) {
      throw InvalidArgument("network: BsNN block sizes must be powers of two");
    }
    if (block_first < block_last) {
      throw InvalidArgument("network: BsNN first block size must be >= last (B >= b)");
    }
  }
}

int NetworkSpec::hidden_layer_count() const {
  if (kind == Kind::kFnn) return hidden_layers;
  return log2_exact(block_first / block_last) + 1;
}

int NetworkSpec::hidden_width() const {
  return kind == Kind::kFnn ? width : block_first;
}

int NetworkSpec::blocks_in_layer(int layer) const {
  return kind == Kind::kFnn ? 1 : (1 << layer);
}

int NetworkSpec::block_size(int layer) const {
  return kind == Kind::kFnn ? width : block_first / (1 << layer);
}

std::string NetworkSpec::arch_string() const {
  if (kind == Kind::kFnn) {
    return "fnn:" + std::to_string(hidden_layers) + "*" + std::to_string(width);
  }
  return "bsnn:" + std::to_string(block_first) + "-" + std::to_string(block_last);
}

NetworkSpec NetworkSpec::parse_arch(std::string_view arch, int input_dim,
                                    int output_dim, Activation act,
                                    int residual_blocks) {
  NetworkSpec spec;
  spec.input_dim = input_dim;
  spec.output_dim = output_dim;
  spec.activation = act;
  spec.residual_blocks = residual_blocks;

  const auto fail = [&] {
    throw ParseError("bad architecture string: '" + std::string(arch) +
                     "' (expected fnn:<layers>*<width> or bsnn:<B>-<b>)");
  };

  std::string_view body;
  if (arch.starts_with("fnn:")) {
    spec.kind = Kind::kFnn;
    body = arch.substr(4);
    const auto star = body.find('*');
    if (star == std::string_view::npos) fail();
    try {
      spec.hidden_layers = static_cast<int>(util::parse_int(body.substr(0, star)));
      spec.width = static_cast<int>(util::parse_int(body.substr(star + 1)));
    } catch (const ParseError&) {
      fail();
    }
  } else if (arch.starts_with("bsnn:")) {
    spec.kind = Kind::kBsnn;
    body = arch.substr(5);
    const auto dash = body.find('-');
    if (dash == std::string_view::npos) fail();
    try {
      spec.block_first = static_cast<int>(util::parse_int(body.substr(0, dash)));
      spec.block_last = static_cast<int>(util::parse_int(body.substr(dash + 1)));
    } catch (const ParseError&) {
      fail();
    }
  } else {
    fail();
  }
  spec.validate();
  return spec;
}

ParamLayout ParamLayout::build(const NetworkSpec& spec) {
  spec.validate();
  ParamLayout layout;
  std::size_t offset = 0;
  for_each_map(spec, [&](int layer, int block, int rows, int cols) {
    ParamSlice s;
    s.layer = layer;
    s.block = block;
    s.rows = rows;
    s.cols = cols;
    s.weight_begin = offset;
    offset += static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    s.bias_begin = offset;
    offset += static_cast<std::size_t>(rows);
    layout.slices.push_back(s);
  });
  layout.total = offset;
  return layout;
}

std::size_t param_count(const NetworkSpec& spec) {
  return ParamLayout::build(spec).total;
}

ParamStore::ParamStore(const NetworkSpec& spec)
    : spec_(spec),
      layout_(std::make_shared<const ParamLayout>(ParamLayout::build(spec))),
      data_(layout_->total, 0.0) {}

ParamStore init_params(const NetworkSpec& spec, std::uint64_t seed) {
  ParamStore store(spec);
  util::Rng rng(util::derive_seed(seed, util::kStreamInit));
  auto data = store.values();
  for (const ParamSlice& s : store.layout().slices) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(s.cols));
    const std::size_t n_weights =
        static_cast<std::size_t>(s.rows) * static_cast<std::size_t>(s.cols);
    for (std::size_t i = 0; i < n_weights; ++i) {
      data[s.weight_begin + i] = rng.uniform(-bound, bound);
    }
    for (int r = 0; r < s.rows; ++r) {
      data[s.bias_begin + static_cast<std::size_t>(r)] = rng.uniform(-bound, bound);
    }
  }
  return store;
}

}  // namespace bspinn::net
