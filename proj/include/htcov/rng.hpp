#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace htcov {

using Engine = std::mt19937_64;

/// splitmix64 finalizer; a bijection on 64-bit words with good avalanche.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stream seed for a task identified by a path of indices below a master seed.
/// derive_seed(s, {cell, trial}) is independent of how tasks are scheduled.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = mix64(master);
  for (std::uint64_t p : path) h = mix64(h ^ mix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

inline Engine make_engine(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return Engine(seq);
}

/// Uniform on (0, 1], never zero, so it is safe under U^{-1/alpha}.
inline double uniform_open0(Engine& eng) {
  return (static_cast<double>(eng() >> 11) + 1.0) * 0x1.0p-53;
}

inline double random_sign(Engine& eng) { return (eng() >> 63) ? 1.0 : -1.0; }

}  // namespace htcov
