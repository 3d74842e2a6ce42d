#pragma once

#include <cstdint>
#include <random>

namespace dolrm {

using Rng = std::mt19937_64;

/// Labels for the independent random streams owned by one episode.
enum class Stream : std::uint64_t {
  kArrival = 1,
  kFeedback = 2,
  kPolicy = 3,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives a labeled stream from a master seed. Streams for different
/// labels are independent, so drawing from one never shifts another.
inline Rng make_stream(std::uint64_t seed, Stream label) {
  const auto tag = static_cast<std::uint64_t>(label);
  return Rng{splitmix64(splitmix64(seed) ^ splitmix64(tag * 0xd1b54a32d192ed03ULL))};
}

/// Uniform double in [0, 1) from the top 53 bits of one 64-bit draw.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace dolrm
