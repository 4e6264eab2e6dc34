#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>

namespace fmca {

enum class Kernel { Gaussian, Epanechnikov };

inline double kernel_value(Kernel k, double u) {
  switch (k) {
  case Kernel::Gaussian:
    return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
  case Kernel::Epanechnikov:
    return std::abs(u) < 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
  }
  return 0.0;
}

/// Half-width of the support in bandwidth units (infinite for the Gaussian).
inline double kernel_radius(Kernel k) {
  return k == Kernel::Epanechnikov ? 1.0 : std::numeric_limits<double>::infinity();
}

std::string_view kernel_name(Kernel k);
/// Accepts "gaussian" or "epanechnikov"; throws InvalidArgumentError otherwise.
Kernel parse_kernel(std::string_view name);

} // namespace fmca
