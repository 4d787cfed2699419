#pragma once

#include <cmath>

#include "meltpinn/errors.hpp"

namespace meltpinn::stefan {

// Mold/aluminium solidification benchmark geometry and closed-form solution.
inline constexpr double kDomainLeft = -0.4;   // m
inline constexpr double kDomainRight = 0.4;
inline constexpr double kMoldTemperature = 298.15;      // K, far field x < 0
inline constexpr double kAluminumTemperature = 973.15;  // K, far field x > 0
inline constexpr double kMeltTemperature = 933.15;
inline constexpr double kWindowStart = 5.0;  // s
inline constexpr double kWindowEnd = 10.0;
inline constexpr double kInterfaceRate = 7.095e-3;  // m / sqrt(s)

inline double analytic_interface(double t) {
  require(t > 0.0, "interface position needs t > 0");
  return kInterfaceRate * std::sqrt(t);
}

inline double analytic_temperature(double x, double t) {
  require(t > 0.0, "analytic temperature needs t > 0");
  const double rt = std::sqrt(t);
  if (x <= 0.0) return 769.95 + 471.8 * std::erf(96.69 * x / rt);
  if (x <= analytic_interface(t)) return 769.95 + 360.2 * std::erf(60.02 * x / rt);
  return 973.15 - 111.4 * std::erfc(91.39 * x / rt);
}

}  // namespace meltpinn::stefan
