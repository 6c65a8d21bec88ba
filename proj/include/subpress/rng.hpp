#pragma once

// Counter-based random streams built on splitmix64.  stream_for(seed, index)
// yields an independent generator per sample index, so Monte Carlo estimates
// are identical no matter how the index range is split across workers.

#include <cstdint>

namespace subpress {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1]; safe as a log argument.
  double next_positive_double() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

inline SplitMix64 stream_for(std::uint64_t seed, std::uint64_t index) {
  // One scrambling round separates the (seed, index) pairs before the
  // stream's own sequence starts.
  SplitMix64 mixer(seed ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
  return SplitMix64(mixer.next_u64());
}

}  // namespace subpress
