#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace dlasso {

/// SplitMix64 (Steele, Lea & Flood, "Fast splittable pseudorandom number
/// generators", OOPSLA 2014). Output k of the stream seeded with s is
/// mix(s + (k+1)*gamma), so a stream is a pure function of (seed, counter)
/// and identical seeds reproduce identical draws on any platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform on (0,1): 53-bit mantissa, offset by half an ulp so 0 and 1
  /// are never returned (log() in the gaussian path needs that).
  double next_double() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via the trigonometric Box-Muller transform; consumes
  /// exactly two uniforms per pair, with the second value cached.
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = next_double();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  /// Uniform integer in [0, bound) by 128-bit multiply-shift. Bias is
  /// O(bound / 2^64), negligible at the index ranges used here.
  std::uint64_t next_index(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// SplitMix64 finalizer as a standalone 64-bit mixer.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Domain-separated sub-seed: streams for different purposes (design draw,
/// support draw, noise draw) never reuse each other's underlying counters
/// even when their user-facing seeds are adjacent integers.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t tag) {
  return mix64(seed ^ mix64(tag + 0x632be59bd9b4e019ULL));
}

namespace stream_tag {
inline constexpr std::uint64_t design = 1;
inline constexpr std::uint64_t support = 2;
inline constexpr std::uint64_t noise = 3;
}  // namespace stream_tag

}  // namespace dlasso
