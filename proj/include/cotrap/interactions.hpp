#pragma once

#include <array>
#include <ostream>
#include <string>
#include <vector>

#include "cotrap/config.hpp"

namespace cotrap {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

/// Euclidean ion-nanoparticle distance. Throws NumericalError when zero.
double pair_distance(const Vec3& ion, const Vec3& np);

/// Distance written as the equilibrium z-separation plus fluctuations of
/// both particles about their equilibria.
double pair_distance(double d_eq, const Vec3& delta_ion, const Vec3& delta_np);

/// Second-order expansion of the Coulomb energy about a pure z-separation,
/// in the relative fluctuation r = delta_np - delta_ion:
///
///   U ~ u0 + linear_coeff r_z + quad_zz r_z^2 + quad_xx r_x^2 + quad_yy r_y^2
///
/// with u0 = k Q_i Q_np / d, linear_coeff = -u0 / d, quad_zz = u0 / d^2 and
/// quad_xx = quad_yy = -u0 / (2 d^2).
struct CoulombExpansion {
  double d_eq = 0.0;
  double u0 = 0.0;
  double linear_coeff = 0.0;
  double quad_zz = 0.0;
  double quad_xx = 0.0;
  double quad_yy = 0.0;

  double evaluate(const Vec3& relative) const;
};

CoulombExpansion coulomb_expand(const SimConfig& config, double d_eq);

/// Exact Coulomb energy for relative fluctuation `relative` about d_eq.
double exact_coulomb_energy(const SimConfig& config, double d_eq, const Vec3& relative);

/// max over dz in {+delta, -delta} of |series - exact| / |exact|.
/// Throws NumericalError("expansion invalid") for delta >= d_eq.
double expansion_error(const SimConfig& config, double d_eq, double delta);

struct LedgerEntry {
  std::string name;
  double energy = 0.0;  // J, magnitude
  double force = 0.0;   // N, magnitude
  double relative_energy = 0.0;
  double relative_force = 0.0;
  std::string note;
};

struct ForceLedger {
  double separation = 0.0;
  std::vector<LedgerEntry> entries;  // Coulomb, dipole-charge, Casimir, magnetic dipole
};

/// Polarizability volume R^3 (eps - 1) / (eps + 2) unless overridden.
double polarizability_volume(const ParticleSpec& p);

/// Ion magnetic moment defaults to one Bohr magneton, as does the nanoparticle's.
ForceLedger force_ledger(const SimConfig& config, double separation);

/// Header `name,energy_J,force_N,relative`; `relative` is the force ratio.
void write_ledger_csv(std::ostream& out, const ForceLedger& ledger);
void write_ledger_table(std::ostream& out, const ForceLedger& ledger);

}  // namespace cotrap
