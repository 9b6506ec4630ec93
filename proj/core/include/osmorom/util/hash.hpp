#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace osmorom::util {

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(const void* data, std::size_t size);
inline std::string sha256_hex(std::string_view s) { return sha256_hex(s.data(), s.size()); }

}  // namespace osmorom::util
