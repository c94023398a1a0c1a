#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bspinn::util {

/// Standard base64 (RFC 4648, '=' padding, no line breaks).
std::string base64_encode(std::span<const std::uint8_t> bytes);

/// Decodes base64; whitespace is ignored. Throws ParseError on bad input.
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace bspinn::util
