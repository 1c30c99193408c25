#pragma once

#include <cstdint>
#include <string_view>

namespace qtomo {

/// Counter-based 64-bit generator: draw n of stream s is the SplitMix64
/// finalizer applied to key(seed, s) + (n + 1) * golden_gamma. Any draw can
/// be computed independently, so shot ranges can be generated in any order
/// or in parallel with identical results.
class CounterRng {
 public:
  static constexpr std::string_view name = "splitmix64-counter/v1";

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_(mix(seed ^ mix(stream + kGamma))) {}

  /// Independent stream derived from this one.
  CounterRng derive(std::uint64_t stream) const noexcept { return CounterRng(key_, stream + 1); }

  std::uint64_t bits(std::uint64_t counter) const noexcept { return mix(key_ + (counter + 1) * kGamma); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform(std::uint64_t counter) const noexcept {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  std::uint64_t key_;
};

}  // namespace qtomo
