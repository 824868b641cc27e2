#pragma once

#include <cmath>
#include <cstdint>

#include "flyatom/constants.hpp"

namespace flyatom {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Counter-based stream keyed by (seed, a, b): draw n of stream (s, a, b) is a
/// pure function of (s, a, b, n), so results do not depend on which thread or
/// in which order samples are evaluated.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0)
      : key_(splitmix64(splitmix64(splitmix64(seed) ^ (a * 0xD1B54A32D192ED03ULL)) ^
                        (b * 0x8CB92BA72F3D8DD7ULL))) {}

  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() { return splitmix64(key_ + 0x9E3779B97F4A7C15ULL * counter_++); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1).
  double uniform_open() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

  /// Uniform integer in [0, n), unbiased.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = max() - max() % n;
    for (;;) {
      const std::uint64_t r = (*this)();
      if (r < limit) return r % n;
    }
  }

  /// Standard normal via Box-Muller.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(constants::two_pi * u2);
    has_spare_ = true;
    return r * std::cos(constants::two_pi * u2);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace flyatom
