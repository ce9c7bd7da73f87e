#include "cotrap/interactions.hpp"

#include <cmath>
#include <cstdio>

#include "cotrap/csv.hpp"
#include "cotrap/error.hpp"

namespace cotrap {

double pair_distance(const Vec3& ion, const Vec3& np) {
  const double d = std::hypot(np.x - ion.x, np.y - ion.y, np.z - ion.z);
  if (d == 0.0) throw NumericalError("zero separation");
  return d;
}

double pair_distance(double d_eq, const Vec3& delta_ion, const Vec3& delta_np) {
  const double rz = d_eq + delta_np.z - delta_ion.z;
  const double d = std::hypot(rz, delta_np.x - delta_ion.x, delta_np.y - delta_ion.y);
  if (d == 0.0) throw NumericalError("zero separation");
  return d;
}

double CoulombExpansion::evaluate(const Vec3& r) const {
  return u0 + linear_coeff * r.z + quad_zz * r.z * r.z + quad_xx * r.x * r.x +
         quad_yy * r.y * r.y;
}

namespace {

double coupling(const SimConfig& c) {
  return kCoulombConstant * c.ion.charge() * c.nanoparticle.charge();
}

}  // namespace

CoulombExpansion coulomb_expand(const SimConfig& config, double d_eq) {
  if (!(d_eq > 0.0)) throw ConfigError("equilibrium separation must be > 0");
  CoulombExpansion e;
  e.d_eq = d_eq;
  e.u0 = coupling(config) / d_eq;
  e.linear_coeff = -e.u0 / d_eq;
  e.quad_zz = e.u0 / (d_eq * d_eq);
  e.quad_xx = -0.5 * e.u0 / (d_eq * d_eq);
  e.quad_yy = e.quad_xx;
  return e;
}

double exact_coulomb_energy(const SimConfig& config, double d_eq, const Vec3& relative) {
  return coupling(config) / pair_distance(d_eq, Vec3{}, relative);
}

double expansion_error(const SimConfig& config, double d_eq, double delta) {
  if (delta < 0.0) throw ConfigError("expansion offset must be >= 0");
  if (delta >= d_eq) throw NumericalError("expansion invalid");
  if (delta == 0.0) return 0.0;
  const CoulombExpansion e = coulomb_expand(config, d_eq);
  double worst = 0.0;
  for (double dz : {delta, -delta}) {
    const Vec3 r{0.0, 0.0, dz};
    const double exact = exact_coulomb_energy(config, d_eq, r);
    worst = std::max(worst, std::abs(e.evaluate(r) - exact) / std::abs(exact));
  }
  return worst;
}

double polarizability_volume(const ParticleSpec& p) {
  if (p.polarizability_volume) return *p.polarizability_volume;
  const double eps = p.rel_permittivity;
  return p.radius * p.radius * p.radius * (eps - 1.0) / (eps + 2.0);
}

ForceLedger force_ledger(const SimConfig& config, double separation) {
  if (!(separation > 0.0)) throw NumericalError("separation must be > 0");
  const double d = separation;
  const double qi = config.ion.charge();
  const double qn = config.nanoparticle.charge();
  const bool point_np = config.nanoparticle.radius == 0.0;

  ForceLedger ledger;
  ledger.separation = d;

  const double u_c = std::abs(kCoulombConstant * qi * qn / d);
  const double f_c = u_c / d;
  auto add = [&](std::string name, double energy, double force, std::string note) {
    LedgerEntry e{std::move(name), energy, force, 0.0, 0.0, std::move(note)};
    e.relative_energy = energy / u_c;
    e.relative_force = force / f_c;
    ledger.entries.push_back(std::move(e));
  };
  add("Coulomb", u_c, f_c, "");
  ledger.entries.front().relative_energy = 1.0;
  ledger.entries.front().relative_force = 1.0;

  // Ion charge acting on the dipole it induces in the nanoparticle, U ~ d^-4.
  {
    const double alpha_np = point_np ? 0.0 : polarizability_volume(config.nanoparticle);
    const double u = kCoulombConstant * alpha_np * qi * qi / (2.0 * std::pow(d, 4));
    add("Dipole-Charge", u, 4.0 * u / d, point_np ? "point-particle" : "");
  }
  // Retarded Casimir-Polder between the two polarizabilities, U ~ d^-7.
  {
    const double alpha_np = point_np ? 0.0 : polarizability_volume(config.nanoparticle);
    const double alpha_ion = polarizability_volume(config.ion);
    const double u = 23.0 * kHbar * kSpeedOfLight * alpha_np * alpha_ion /
                     (4.0 * kPi * std::pow(d, 7));
    std::string note;
    if (point_np) note = "point-particle";
    else if (alpha_ion == 0.0) note = "ion polarizability not set";
    add("Casimir", u, 7.0 * u / d, note);
  }
  // Magnetic dipole-dipole, U ~ d^-3.
  {
    const double mu_i = config.ion.magnetic_moment.value_or(kBohrMagneton);
    const double mu_n = config.nanoparticle.magnetic_moment.value_or(kBohrMagneton);
    const double u = kMu0 / (4.0 * kPi) * mu_i * mu_n / (d * d * d);
    add("Magnetic dipole", u, 3.0 * u / d, "");
  }
  return ledger;
}

void write_ledger_csv(std::ostream& out, const ForceLedger& ledger) {
  csv::write_header(out, {"name", "energy_J", "force_N", "relative"});
  for (const auto& e : ledger.entries)
    out << csv::field(e.name) << ',' << csv::format(e.energy) << ',' << csv::format(e.force)
        << ',' << csv::format(e.relative_force) << '\n';
}

void write_ledger_table(std::ostream& out, const ForceLedger& ledger) {
  char line[160];
  std::snprintf(line, sizeof line, "separation = %.6g m\n", ledger.separation);
  out << line;
  std::snprintf(line, sizeof line, "%-16s %14s %14s %14s %14s  %s\n", "interaction", "energy [J]",
                "force [N]", "rel. energy", "rel. force", "note");
  out << line;
  for (const auto& e : ledger.entries) {
    std::snprintf(line, sizeof line, "%-16s %14.4e %14.4e %14.4e %14.4e  %s\n", e.name.c_str(),
                  e.energy, e.force, e.relative_energy, e.relative_force, e.note.c_str());
    out << line;
  }
}

}  // namespace cotrap
