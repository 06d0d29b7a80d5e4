#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace movebench {

// IEEE CRC-32 (reflected, poly 0xEDB88320), zlib-compatible.
std::uint32_t crc32(std::string_view data, std::uint32_t seed = 0);

// CRC rendered as 8 lowercase hex digits.
std::string crc32_hex(std::string_view data);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view data);

// Formats a double with 9 significant digits ("%.9g").
std::string format_g9(double value);

// Appends "%.9g" renderings of each value, comma-separated, to out.
void append_g9_array(std::string& out, const double* values, std::size_t count);

// Rounds through the "%.9g" text form, so a value held in memory equals the
// value recovered from its serialized rendering.
double quantize_g9(double value);

}  // namespace movebench
