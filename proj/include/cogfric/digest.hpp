#pragma once

#include <string>
#include <string_view>

namespace cogfric {

// Hex-encoded SHA-256 of the given bytes.
std::string sha256_hex(std::string_view bytes);

// Whole-file helpers. Both throw IoError.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

}  // namespace cogfric
