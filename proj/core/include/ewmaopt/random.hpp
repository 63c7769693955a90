#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace ewmaopt {

/// SplitMix64 step; used for seeding and for hashing (seed, stream) pairs.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// xoshiro256** generator. Satisfies UniformRandomBitGenerator.
///
/// Independent substreams are derived from a (seed, stream) pair through
/// SplitMix64, so replication i of a Monte Carlo run sees the same numbers
/// regardless of which thread executes it.
class Xoshiro256ss {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256ss(std::uint64_t seed) noexcept;
  static Xoshiro256ss for_stream(std::uint64_t seed, std::uint64_t stream) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform double on (0, 1]; never returns 0 so log() is always finite.
  double uniform_open0() noexcept {
    return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;
  }

 private:
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace ewmaopt
