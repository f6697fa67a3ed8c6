#include "nasmr/digest.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace nasmr {

std::string Digest::hex() const {
  return to_hex(Bytes(bytes.begin(), bytes.end()));
}

std::string Digest::short_hex() const {
  return hex().substr(0, 12);
}

Digest sha256(const std::uint8_t* data, std::size_t len) {
  Digest d;
  unsigned int out_len = 0;
  if (EVP_Digest(data, len, d.bytes.data(), &out_len, EVP_sha256(), nullptr) != 1 ||
      out_len != d.bytes.size()) {
    throw std::runtime_error("sha256 failed");
  }
  return d;
}

Digest sha256(const Bytes& data) {
  return sha256(data.data(), data.size());
}

}  // namespace nasmr
