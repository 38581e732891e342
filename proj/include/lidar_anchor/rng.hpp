#pragma once

#include <cmath>
#include <cstdint>

namespace lidar_anchor {

/// Counter-based generator: the n-th draw of a stream keyed by `key` is
///
///   splitmix64_mix(key + n * 0x9E3779B97F4A7C15),  n = 1, 2, 3, ...
///
/// where splitmix64_mix is the SplitMix64 output finalizer. Any draw can be
/// recomputed from (key, n) alone, which makes models and synthetic scenes
/// reproducible across platforms and in other languages.
class CounterRng {
 public:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  explicit constexpr CounterRng(std::uint64_t key) noexcept : key_(key) {}

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Key of a child stream, e.g. one per tree node or per scene object.
  static constexpr std::uint64_t derive(std::uint64_t parent, std::uint64_t index) noexcept {
    return mix(parent ^ mix((index + 1) * kGolden));
  }

  constexpr std::uint64_t next() noexcept { return mix(key_ + (++counter_) * kGolden); }

  /// Uniform integer in [0, n) by 128-bit multiply-shift.
  constexpr std::uint64_t below(std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (one draw pair per call, second discarded).
  double normal() noexcept {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  constexpr std::uint64_t key() const noexcept { return key_; }
  constexpr std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace lidar_anchor
