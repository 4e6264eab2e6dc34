#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace fmca {

/// Seedable generator whose output depends only on the seed: 64-bit Mersenne
/// twister words turned into uniforms and Gaussians by fixed transforms.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on (0, 1) with 53 random bits.
  double uniform() {
    for (;;) {
      const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
      if (u > 0.0) return u;
    }
  }

  /// Box-Muller; the second variate is kept for the next call.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double a = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double variance) { return mean + std::sqrt(variance) * normal(); }

  /// Uniform integer in [0, bound) by rejection, bound > 0.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    for (;;) {
      const std::uint64_t x = engine_();
      if (x < limit) return x % bound;
    }
  }

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

} // namespace fmca
