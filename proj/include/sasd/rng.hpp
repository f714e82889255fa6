#pragma once

// Seeded random streams. A master seed is split into named sub-streams with
// SplitMix64 so that drawing more numbers from one stream (say, a longer
// activation) never perturbs another (say, the noise).

#include <cstdint>
#include <random>

namespace sasd {

enum class Stream : std::uint64_t {
  kKernel = 0x6b65726e,
  kActivation = 0x61637476,
  kNoise = 0x6e6f6973,
  kInit = 0x696e6974,
  kTrial = 0x7472696c,
};

inline std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t index = 0) noexcept {
  return splitmix64(splitmix64(seed ^ static_cast<std::uint64_t>(stream)) + index);
}

inline std::mt19937_64 make_rng(std::uint64_t seed, Stream stream, std::uint64_t index = 0) {
  return std::mt19937_64(derive_seed(seed, stream, index));
}

}  // namespace sasd
