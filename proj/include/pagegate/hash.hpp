#pragma once

#include <string>
#include <string_view>

namespace pagegate {

// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

// First 16 hex characters (64 bits) of the SHA-256 of the fields joined by
// U+001F (unit separator).
std::string short_id(std::initializer_list<std::string_view> fields);

} // namespace pagegate
