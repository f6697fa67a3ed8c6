#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace nasmr {

using Bytes = std::vector<std::uint8_t>;

Bytes to_bytes(std::string_view s);
std::string to_hex(const Bytes& b);
bool from_hex(std::string_view hex, Bytes& out);

}  // namespace nasmr
