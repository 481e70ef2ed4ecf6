#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace rcf {

// splitmix64 finalizer; good avalanche, cheap.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Order-sensitive combination of seed components. Used to derive independent
// substreams so trial results do not depend on execution schedule.
inline std::uint64_t hash64(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x51'6b'9d'3c'5a'f2'8e'01ULL;
  for (std::uint64_t p : parts) h = mix64(h ^ p);
  return h;
}

enum class Stream : std::uint64_t {
  TrajectoryIc = 1,
  Reservoir = 2,
  InputNoise = 3,
  Lyapunov = 4,
};

inline std::mt19937_64 make_rng(std::uint64_t base_seed, std::uint64_t trial,
                                Stream stream) {
  return std::mt19937_64(
      hash64({base_seed, trial, static_cast<std::uint64_t>(stream)}));
}

}  // namespace rcf
