#pragma once

#include <cstdint>
#include <string>

#include "network/spec.hpp"

namespace bspinn::net {

struct Checkpoint {
  ParamStore params;
  std::uint64_t seed = 0;
  long long epoch = 0;
};

/// Text header (spec fields, seed, epoch) followed by the flat parameter
/// vector as base64 of little-endian IEEE-754 bytes; round-trips bit-exact.
void save_checkpoint(const std::string& path, const ParamStore& params,
                     std::uint64_t seed, long long epoch);
std::string checkpoint_to_string(const ParamStore& params, std::uint64_t seed,
                                 long long epoch);

Checkpoint load_checkpoint(const std::string& path);
Checkpoint checkpoint_from_string(const std::string& text);

}  // namespace bspinn::net
