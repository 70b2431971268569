#pragma once

#include <cstdint>

namespace ssblab {

/// Counter-based generator: output i is splitmix64(key + (i + 1) * golden),
/// with the key derived from (seed, stream). Every value is a pure function
/// of (seed, stream, counter), so streams are bit-reproducible everywhere
/// and can be partitioned across workers by seed.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t at(std::uint64_t counter) const noexcept {
    return mix(key_ + (counter + 1) * 0x9e3779b97f4a7c15ULL);
  }

  std::uint64_t next_u64() noexcept { return at(counter_++); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace ssblab
