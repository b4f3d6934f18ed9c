#pragma once

#include <cmath>

#include "netcage/core/types.hpp"

namespace netcage {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle in degrees into [0, 360).
inline double wrap_degrees(double deg) {
  double w = std::fmod(deg, 360.0);
  if (w < 0.0) w += 360.0;
  if (w >= 360.0) w = 0.0;
  return w;
}

/// Current features fed to every surrogate: speed followed by the direction
/// expanded to (sin, cos) so that 0 and 360 degrees coincide.
inline Vector encode_current(double speed, double dir_deg) {
  Vector f(3);
  const double r = deg2rad(dir_deg);
  f << speed, std::sin(r), std::cos(r);
  return f;
}

}  // namespace netcage
