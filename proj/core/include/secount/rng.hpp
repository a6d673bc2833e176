#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace secount {

/// Seedable pseudo-random stream: the 64-bit Mersenne Twister (std::mt19937_64,
/// whose output sequence is fixed by the C++ standard) seeded through
/// std::seed_seq. Real and bounded-integer conversions are done here instead
/// of with <random> distributions, whose results vary between standard
/// libraries, so streams are bit-identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : Rng(seed, {}) {}

  /// Substream for (seed, path...). Distinct paths give statistically
  /// independent streams; used to give each run or poset its own stream.
  Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform real in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

}  // namespace secount
