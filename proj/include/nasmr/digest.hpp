#pragma once

#include <array>
#include <compare>
#include <cstdint>

#include "nasmr/bytes.hpp"

namespace nasmr {

struct Digest {
  std::array<std::uint8_t, 32> bytes{};

  auto operator<=>(const Digest&) const = default;

  std::string hex() const;
  // First 12 hex chars; enough to disambiguate in transcript notes.
  std::string short_hex() const;
  Bytes to_bytes() const { return Bytes(bytes.begin(), bytes.end()); }
};

Digest sha256(const std::uint8_t* data, std::size_t len);
Digest sha256(const Bytes& data);

}  // namespace nasmr
