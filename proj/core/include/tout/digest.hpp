#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace tout {

/// Lower-case hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// First 64 bits of the SHA-256 of `data`; stable across platforms.
std::uint64_t stable_hash64(std::string_view data);

}  // namespace tout
