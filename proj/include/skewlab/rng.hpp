#pragma once

#include <cstdint>
#include <random>

namespace skewlab {

/// SplitMix64 finalizer. Used as a counter-based hash for digit streams and
/// for deriving independent per-sample seeds from a master seed.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for sample `index` of stream `stream` under `master`. Results depend
/// only on the triple, never on which worker draws the sample.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index,
                                    std::uint64_t stream = 0) noexcept {
  return splitmix64(splitmix64(master ^ splitmix64(stream + 0x5bd1e995ULL)) +
                    index);
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t master, std::uint64_t index,
                          std::uint64_t stream = 0) {
  return Engine(derive_seed(master, index, stream));
}

/// Uniform double in [0,1) with 53 random bits.
inline double uniform01(Engine& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1p-53;
}

}  // namespace skewlab
