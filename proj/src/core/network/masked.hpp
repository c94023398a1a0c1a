#pragma once

#include <cstdint>

#include "network/spec.hpp"

namespace bspinn::net {

/// A BsNN viewed as a fully connected net with block-diagonal connectivity.
/// masks[m] is the row-major rows x cols 0/1 pattern of affine map m
/// (input map, hidden-to-hidden maps, output map); an unmasked FNN forward
/// restricted to the 1-entries reproduces the BsNN exactly.
struct MaskedFnn {
  NetworkSpec fnn;
  std::vector<std::vector<std::uint8_t>> masks;
};

MaskedFnn to_masked_fnn(const NetworkSpec& bsnn);

}  // namespace bspinn::net
