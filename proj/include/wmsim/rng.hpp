#pragma once

#include <cstdint>
#include <random>

namespace wmsim {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed splitting rule: stream i of top-level seed s is seeded with
// splitmix64(splitmix64(s) ^ splitmix64(i + 1)). Independent of how streams
// are scheduled onto threads.
inline std::uint64_t subseed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 1));
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  return Rng(subseed(seed, stream));
}

}  // namespace wmsim
