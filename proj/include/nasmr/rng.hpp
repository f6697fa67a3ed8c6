#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace nasmr {

// Deterministic stream of pseudorandom values. Distinct logical streams are
// derived from one scenario seed plus a domain label, so e.g. the adversary's
// choices never perturb the oracle draws.
class Rng {
 public:
  Rng(std::uint64_t seed, std::string_view domain);

  std::uint64_t next();
  // Uniform in [0, n), n > 0. Unbiased (rejection sampling).
  std::uint64_t uniform(std::uint64_t n);
  // Uniform in [lo, hi] inclusive.
  std::uint64_t range(std::uint64_t lo, std::uint64_t hi);
  bool bit();
  void fill(std::uint8_t* out, std::size_t len);

 private:
  std::mt19937_64 gen_;
};

}  // namespace nasmr
