#pragma once

#include <cstdint>

namespace discbench {

// SplitMix64 (Steele, Lea & Flood). The output stream is fully specified by
// the algorithm, so seeded results are identical across compilers and
// standard libraries, which std::uniform_int_distribution does not promise.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform integer in [0, bound) by rejection; bound must be > 0.
  std::uint64_t bounded(std::uint64_t bound);

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller (one value per call, no caching).
  double normal();

private:
  std::uint64_t state_;
};

}  // namespace discbench
