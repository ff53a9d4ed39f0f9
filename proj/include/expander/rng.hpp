#pragma once

#include <cstdint>

namespace expander {

/// SplitMix64 finalizer. Used as a stateless hash from counters to bits.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based stream: the k-th output depends only on (key, k), so
/// independent streams can be derived from (seed, trial) pairs without
/// sharing state between threads.
class CounterRng {
 public:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  explicit constexpr CounterRng(std::uint64_t key) noexcept : key_(mix64(key)) {}
  constexpr CounterRng(std::uint64_t key, std::uint64_t stream) noexcept
      : key_(mix64(mix64(key) ^ (stream * kGolden + 0x632be59bd9b4e019ULL))) {}

  constexpr std::uint64_t next() noexcept { return mix64(key_ + (++counter_) * kGolden); }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  constexpr std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace expander
