#pragma once

#include <cstdint>
#include <limits>

namespace depthlab {

/// Final mixing step of SplitMix64 (Steele, Lea & Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// SplitMix64 generator.
///
/// The stream is fully specified: state += 0x9e3779b97f4a7c15, output
/// mix64(state). Bounded integers use Lemire's multiply-and-reject method and
/// doubles take the top 53 bits, so any implementation of these three rules
/// reproduces the same games from the same seed.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t bounded(std::uint64_t n) noexcept {
    using u128 = unsigned __int128;
    u128 m = static_cast<u128>((*this)()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<u128>((*this)()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Uniform double in [0, 1).
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Independent child stream.
  SplitMix64 split() noexcept { return SplitMix64(mix64((*this)() ^ 0x5851f42d4c957f2dULL)); }

  constexpr std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

/// Seed for a sub-task identified by a tuple of integers, e.g.
/// derive_seed(master, pair, opening, color, game).
template <class... Parts>
constexpr std::uint64_t derive_seed(std::uint64_t master, Parts... parts) noexcept {
  std::uint64_t h = mix64(master ^ 0x6a09e667f3bcc909ULL);
  ((h = mix64(h ^ mix64(static_cast<std::uint64_t>(parts) + 0x9e3779b97f4a7c15ULL))), ...);
  return h;
}

}  // namespace depthlab
