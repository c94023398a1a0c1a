#include "network/masked.hpp"

namespace bspinn::net {

MaskedFnn to_masked_fnn(const NetworkSpec& bsnn) {
  bsnn.validate();
  if (bsnn.kind != NetworkSpec::Kind::kBsnn) {
    throw InvalidArgument("to_masked_fnn: spec must be a BsNN");
  }
  if (bsnn.residual_blocks != 0) {
    throw InvalidArgument("to_masked_fnn: plain networks only");
  }

  MaskedFnn out;
  out.fnn = bsnn;
  out.fnn.kind = NetworkSpec::Kind::kFnn;
  out.fnn.hidden_layers = bsnn.hidden_layer_count();
  out.fnn.width = bsnn.block_first;
  out.fnn.block_first = out.fnn.block_last = 0;

  const int width = bsnn.block_first;
  const int n_hidden = bsnn.hidden_layer_count();

  // Input map: the first layer is a single block fed by the whole input.
  out.masks.emplace_back(
      static_cast<std::size_t>(width) * bsnn.input_dim, std::uint8_t{1});

  for (int l = 1; l < n_hidden; ++l) {
    const int rows_per_block = bsnn.block_size(l);
    const int parent_size = bsnn.block_size(l - 1);
    std::vector<std::uint8_t> mask(
        static_cast<std::size_t>(width) * width, std::uint8_t{0});
    for (int r = 0; r < width; ++r) {
      const int block = r / rows_per_block;
      const int parent = block / 2;
      for (int c = parent * parent_size; c < (parent + 1) * parent_size; ++c) {
        mask[static_cast<std::size_t>(r) * width + c] = 1;
      }
    }
    out.masks.push_back(std::move(mask));
  }

  // Output map: the concatenated last layer is fully connected to it.
  out.masks.emplace_back(
      static_cast<std::size_t>(bsnn.output_dim) * width, std::uint8_t{1});
  return out;
}

}  // namespace bspinn::net
