#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace bspinn::util {

/// Formats a double so that parsing the text recovers the exact bits.
std::string format_double(double v);

/// Strict parsers; throw ParseError on trailing garbage or range errors.
double parse_double(std::string_view text);
long long parse_int(std::string_view text);
std::uint64_t parse_uint64(std::string_view text);

std::string_view trim(std::string_view text);
std::vector<std::string> split(std::string_view text, char sep);

/// Reads a whole file; throws IoError if it cannot be opened.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace bspinn::util
