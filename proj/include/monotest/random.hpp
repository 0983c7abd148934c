#pragma once

// Seeded random streams. Every simulation is a pure function of
// (parameters, seed): independent streams are derived from the master seed
// and a stream index, never from wall-clock time or thread identity.

#include <cmath>
#include <cstdint>
#include <random>

namespace monotest {

using Engine = std::mt19937_64;

/// splitmix64 finalizer over (seed, stream); distinct streams give
/// decorrelated mt19937_64 seeds.
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

[[nodiscard]] inline Engine make_engine(std::uint64_t seed, std::uint64_t stream) {
  return Engine{derive_seed(seed, stream)};
}

/// Uniform on the open interval (0, 1): 53 random bits offset by half an ulp.
[[nodiscard]] inline double open_uniform(Engine& eng) {
  return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
}

[[nodiscard]] inline double standard_exponential(Engine& eng) { return -std::log(open_uniform(eng)); }

}  // namespace monotest
