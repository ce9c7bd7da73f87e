#pragma once

// CODATA 2018 values, SI units.

#include <numbers>

namespace cotrap {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr double kHbar = 1.054571817e-34;           // J s
inline constexpr double kPlanck = 6.62607015e-34;          // J s
inline constexpr double kElementaryCharge = 1.602176634e-19;  // C
inline constexpr double kEpsilon0 = 8.8541878128e-12;      // F/m
inline constexpr double kCoulombConstant = 1.0 / (4.0 * std::numbers::pi * kEpsilon0);
inline constexpr double kBohrMagneton = 9.2740100783e-24;  // J/T
inline constexpr double kSpeedOfLight = 299792458.0;       // m/s
inline constexpr double kMu0 = 1.25663706212e-6;           // T m / A
inline constexpr double kAtomicMassUnit = 1.66053906660e-27;  // kg
inline constexpr double kBohrRadius = 5.29177210903e-11;   // m
inline constexpr double kStandardGravity = 9.80665;        // m/s^2

/// Physical constants handed to every computation.
///
/// Everything except the gravitational acceleration is pinned to CODATA and
/// has no setter. Gravity can be changed (most often zeroed) at construction.
class PhysicalConstants {
 public:
  constexpr PhysicalConstants() = default;
  constexpr explicit PhysicalConstants(double g_grav) : g_grav_(g_grav) {}

  constexpr double hbar() const { return kHbar; }
  constexpr double epsilon0_4pi_inv() const { return kCoulombConstant; }
  constexpr double g_grav() const { return g_grav_; }
  constexpr double mu_bohr() const { return kBohrMagneton; }
  constexpr double e_charge() const { return kElementaryCharge; }
  constexpr double c_light() const { return kSpeedOfLight; }
  constexpr double mu0() const { return kMu0; }

  friend constexpr bool operator==(const PhysicalConstants&, const PhysicalConstants&) = default;

 private:
  double g_grav_ = kStandardGravity;
};

}  // namespace cotrap
