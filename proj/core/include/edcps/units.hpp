#pragma once

#include <numbers>

namespace edcps {

inline constexpr double kPi = std::numbers::pi;

/// System power base in MVA. A power order of 0.66 p.u. is 660 MW.
inline constexpr double kDefaultPowerBase = 1000.0;
inline constexpr double kDefaultNominalHz = 50.0;

constexpr double hz_to_rad(double hz) { return 2.0 * kPi * hz; }
constexpr double rad_to_hz(double omega) { return omega / (2.0 * kPi); }
constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

inline constexpr double kDefaultNominalOmega = hz_to_rad(kDefaultNominalHz);

}  // namespace edcps
