#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cgvm {

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(const std::vector<uint8_t>& bytes);
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

}  // namespace cgvm
