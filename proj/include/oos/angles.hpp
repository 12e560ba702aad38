#pragma once

#include <cmath>
#include <numbers>

namespace oos {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

/// Angle in [0, 2*pi) by which the target leads the chaser: (from - to) mod 360.
inline double phase_angle(double from_lon_deg, double to_lon_deg) {
  double d = std::fmod(from_lon_deg - to_lon_deg, 360.0);
  if (d < 0) d += 360.0;
  double a = deg_to_rad(d);
  return a >= kTwoPi ? 0.0 : a;
}

/// Same separation folded to the shortest signed angle in (-pi, pi].
inline double signed_phase_angle(double from_lon_deg, double to_lon_deg) {
  double a = phase_angle(from_lon_deg, to_lon_deg);
  return a > std::numbers::pi ? a - kTwoPi : a;
}

}  // namespace oos
