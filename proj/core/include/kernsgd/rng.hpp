#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace kernsgd {

using Rng = std::mt19937_64;

/// One round of the SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from a master seed and a path of
/// labels, e.g. derive_seed(master, {n, seed_index, kStreamData}). The result
/// depends only on its inputs, never on scheduling or thread count.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t label : path) h = splitmix64(h ^ splitmix64(label + 0x632be59bd9b4e019ULL));
  return h;
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

}  // namespace kernsgd
