#pragma once

#include <cstdint>
#include <random>

namespace svb {

using Rng = std::mt19937_64;

namespace detail {

// splitmix64 finalizer; used to mix stream ids into well-separated seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

// Named substream derivation: all randomness in the library flows from a
// single master seed through (stream, substream) indices, so replicates,
// folds, and grid cells are reproducible independently of execution order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t substream = 0) {
  std::uint64_t h = detail::mix64(master);
  h = detail::mix64(h ^ detail::mix64(stream));
  h = detail::mix64(h ^ detail::mix64(substream));
  return h;
}

inline Rng make_rng(std::uint64_t seed) { return Rng(detail::mix64(seed)); }

inline Rng make_stream(std::uint64_t master, std::uint64_t stream,
                       std::uint64_t substream = 0) {
  return Rng(derive_seed(master, stream, substream));
}

}  // namespace svb
