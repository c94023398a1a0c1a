#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "common.hpp"

namespace bspinn::net {

enum class Activation { kTanh, kSin, kSigmoid };

Activation parse_activation(std::string_view name);
std::string_view activation_name(Activation a);

/// Architecture description. "n*w" fully connected nets have n hidden
/// layers of width w. "B-b" binary-structured nets have log2(B/b)+1 hidden
/// layers of B neurons each; layer i (0-based) holds 2^i neuron blocks of
/// size B/2^i, block j fed by block j/2 of the previous layer. With
/// residual_blocks > 0 the structure above describes each residual block
/// and the full network is lift -> blocks with identity skips -> linear
/// output.
struct NetworkSpec {
  enum class Kind { kFnn, kBsnn };

  Kind kind = Kind::kFnn;
  int input_dim = 0;
  int output_dim = 0;
  int hidden_layers = 0;  // FNN
  int width = 0;          // FNN
  int block_first = 0;    // BsNN B
  int block_last = 0;     // BsNN b
  int residual_blocks = 0;
  Activation activation = Activation::kTanh;

  void validate() const;

  int hidden_layer_count() const;
  int hidden_width() const;
  /// BsNN block structure per 0-based hidden layer; FNN reports one block.
  int blocks_in_layer(int layer) const;
  int block_size(int layer) const;

  /// "fnn:4*32" / "bsnn:256-16".
  std::string arch_string() const;
  static NetworkSpec parse_arch(std::string_view arch, int input_dim,
                                int output_dim,
                                Activation act = Activation::kTanh,
                                int residual_blocks = 0);
};

/// One affine map's slices within the flat parameter vector. Weights are
/// row-major rows x cols followed by rows bias entries.
struct ParamSlice {
  int layer = 0;  // sequential affine-map index over the whole network
  int block = 0;  // block index within a BsNN layer
  std::size_t weight_begin = 0;
  int rows = 0;
  int cols = 0;
  std::size_t bias_begin = 0;
};

struct ParamLayout {
  std::vector<ParamSlice> slices;
  std::size_t total = 0;

  static ParamLayout build(const NetworkSpec& spec);
};

/// Exact trainable parameter count (weights + biases, final layer included).
std::size_t param_count(const NetworkSpec& spec);

/// Flat parameter vector plus its layout.
class ParamStore {
 public:
  ParamStore() = default;
  explicit ParamStore(const NetworkSpec& spec);

  const NetworkSpec& spec() const { return spec_; }
  const ParamLayout& layout() const { return *layout_; }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  std::size_t size() const { return data_.size(); }

 private:
  NetworkSpec spec_{};
  std::shared_ptr<const ParamLayout> layout_;
  std::vector<double> data_;
};

/// Weights and biases drawn uniformly from [-1/sqrt(fan_in), +1/sqrt(fan_in)]
/// per affine map; deterministic in the seed.
ParamStore init_params(const NetworkSpec& spec, std::uint64_t seed);

}  // namespace bspinn::net
