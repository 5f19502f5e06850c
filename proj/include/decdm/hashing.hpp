#pragma once

#include <span>
#include <string>

namespace decdm {

/// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(std::span<const unsigned char> bytes);

/// Git blob id: SHA-1 over "blob <size>\0" followed by the content.
std::string git_blob_hex(std::span<const unsigned char> bytes);

}  // namespace decdm
