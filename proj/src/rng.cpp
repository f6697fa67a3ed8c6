#include "nasmr/rng.hpp"

#include <stdexcept>

namespace nasmr {

namespace {
std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (char c : s) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 1099511628211ull;
  }
  return h;
}
}  // namespace

Rng::Rng(std::uint64_t seed, std::string_view domain)
    : gen_(seed ^ fnv1a64(domain)) {}

std::uint64_t Rng::next() {
  return gen_();
}

std::uint64_t Rng::uniform(std::uint64_t n) {
  if (n == 0) throw std::logic_error("Rng::uniform(0)");
  // Rejection sampling keeps the draw exactly uniform.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
  std::uint64_t v;
  do {
    v = gen_();
  } while (v >= limit && limit != 0);
  return v % n;
}

std::uint64_t Rng::range(std::uint64_t lo, std::uint64_t hi) {
  return lo + uniform(hi - lo + 1);
}

bool Rng::bit() {
  return (gen_() & 1) != 0;
}

void Rng::fill(std::uint8_t* out, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) {
    out[i] = static_cast<std::uint8_t>(gen_() & 0xff);
  }
}

}  // namespace nasmr
