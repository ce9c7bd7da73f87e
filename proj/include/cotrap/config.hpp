#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "cotrap/constants.hpp"

namespace cotrap {

enum class Particle { ion, nanoparticle };
enum class FrequencyConvention { angular, ordinary };

std::string_view to_string(Particle p);
std::string_view to_string(FrequencyConvention c);
std::optional<Particle> parse_particle(std::string_view s);
std::optional<FrequencyConvention> parse_convention(std::string_view s);

struct ParticleSpec {
  double mass = 0.0;              // kg
  double charge_e = 0.0;          // signed, in units of e
  double radius = 0.0;            // m, 0 for a point ion
  double rel_permittivity = 1.0;
  std::string label;
  // Optional overrides used only by the interaction ledger.
  std::optional<double> polarizability_volume;  // m^3
  std::optional<double> magnetic_moment;        // J/T

  double charge() const { return charge_e * kElementaryCharge; }
  bool operator==(const ParticleSpec&) const = default;
};

struct TrapGeometry {
  double r0 = 0.0;      // radial half-distance, m
  double z0_ax = 0.0;   // axial half-distance, m
  double kappa_rf = 1.0;
  double kappa_end = 1.0;
  bool operator==(const TrapGeometry&) const = default;
};

struct DriveConfig {
  double omega_slow = 0.0;  // rad/s
  double omega_fast = 0.0;  // rad/s
  double v_slow = 0.0;      // V
  double v_fast = 0.0;
  double v_offset = 0.0;
  double v_end = 0.0;
  FrequencyConvention frequency_convention = FrequencyConvention::ordinary;
  bool operator==(const DriveConfig&) const = default;
};

struct SimConfig {
  PhysicalConstants constants;
  TrapGeometry geometry;
  DriveConfig drive;
  ParticleSpec ion;
  ParticleSpec nanoparticle;
  bool gravity_on = true;
  bool coulomb_on = true;

  const ParticleSpec& particle(Particle p) const {
    return p == Particle::ion ? ion : nanoparticle;
  }
  ParticleSpec& particle(Particle p) { return p == Particle::ion ? ion : nanoparticle; }

  /// Gravitational acceleration actually applied (0 when gravity is off).
  double gravity() const { return gravity_on ? constants.g_grav() : 0.0; }
  bool operator==(const SimConfig&) const = default;
};

/// Charge-to-mass ratio in C/kg.
double charge_to_mass(const ParticleSpec& p);

/// Parses the JSON config format. `convention` overrides
/// `options.frequency_convention`; it decides how `*_hz` frequency keys are
/// read (ordinary: multiplied by 2 pi, angular: taken as rad/s verbatim).
/// `*_rads` keys are always angular. Throws ConfigError naming the key.
SimConfig parse_config(std::string_view json_text,
                       std::optional<FrequencyConvention> convention = std::nullopt);
SimConfig load_config(const std::filesystem::path& path,
                      std::optional<FrequencyConvention> convention = std::nullopt);

/// Serializes with `*_rads` keys; parse_config(serialize_config(c)) == c.
std::string serialize_config(const SimConfig& config);

/// Throws ConfigError if any invariant does not hold.
void validate(const SimConfig& config);

}  // namespace cotrap
