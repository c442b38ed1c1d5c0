#pragma once

#include <cstdint>
#include <random>

namespace fpplab {

/// Generator used throughout the library. Every sampling routine takes one
/// by reference; nothing draws from global state.
using Rng = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for record (n, replica) of a sweep with base seed `base`. Adding
/// sizes or replicas never changes the seed of an existing record.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t n,
                                    std::uint64_t replica) noexcept {
  return mix64(mix64(mix64(base) ^ n) ^ replica);
}

/// Uniform double in [0, 1) built from the top 53 bits of one draw.
inline double uniform01(Rng& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace fpplab
