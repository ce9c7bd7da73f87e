#include "cotrap/quantum.hpp"

#include <cmath>
#include <exception>

#include <omp.h>

#include "cotrap/constants.hpp"
#include "cotrap/csv.hpp"
#include "cotrap/error.hpp"
#include "cotrap/stability.hpp"

namespace cotrap {

namespace {

double end_field(const SimConfig& c) {
  const auto& g = c.geometry;
  return g.kappa_end * c.drive.v_end / (g.z0_ax * g.z0_ax);
}

double coulomb_strength(const SimConfig& c) {
  return c.coulomb_on ? kCoulombConstant * c.ion.charge() * c.nanoparticle.charge() : 0.0;
}

// Quadratic and kinetic weights; independent of the positions.
void fill_quadratic(const SimConfig& c, const ZeroPointData& z, double d, bool higher,
                    NormalFormCoefficients& n) {
  const double e = end_field(c);
  const double stiff = higher ? coulomb_strength(c) / (d * d * d) : 0.0;
  n.pot_a = z.z0_np * z.z0_np * (c.nanoparticle.charge() * e + stiff);
  n.pot_b = z.z0_ion * z.z0_ion * (c.ion.charge() * e + stiff);
  n.kin_a = kHbar * z.omega_np / 4.0;
  n.kin_b = kHbar * z.omega_ion / 4.0;
  n.c12 = higher ? -2.0 * stiff * z.z0_ion * z.z0_np : 0.0;
  n.include_higher_order = higher;
  n.d_eq_branch = d;
}

EquilibriumSolution reference_equilibrium(const SimConfig& c, std::optional<double> d_override) {
  if (d_override) return pinned_equilibrium(c, *d_override);
  return static_equilibrium(c, 50e-6);
}

double orientation(const EquilibriumSolution& eq) { return eq.z_np >= eq.z_ion ? 1.0 : -1.0; }

}  // namespace

double zero_point_width(double mass, double omega) {
  if (!(mass > 0.0) || !(omega > 0.0)) throw ConfigError("zero-point width needs mass, omega > 0");
  return std::sqrt(kHbar / (2.0 * mass * omega));
}

ZeroPointData zero_point_data(const SimConfig& c) {
  ZeroPointData z;
  z.omega_ion = axial_frequency(c, Particle::ion);
  z.omega_np = axial_frequency(c, Particle::nanoparticle);
  z.z0_ion = zero_point_width(c.ion.mass, z.omega_ion);
  z.z0_np = zero_point_width(c.nanoparticle.mass, z.omega_np);
  return z;
}

NormalFormCoefficients hamiltonian_coeffs(const SimConfig& c, const EquilibriumSolution& eq,
                                          double d_branch, bool include_higher_order) {
  if (!(d_branch > 0.0)) throw NumericalError("branch separation must be > 0");
  const ZeroPointData z = zero_point_data(c);
  NormalFormCoefficients n;
  fill_quadratic(c, z, d_branch, include_higher_order, n);
  const double e = end_field(c);
  const double g = c.gravity();
  const double f_c = orientation(eq) * coulomb_strength(c) / (d_branch * d_branch);
  n.lin_a = z.z0_np * (2.0 * c.nanoparticle.charge() * e * eq.z_np + c.nanoparticle.mass * g - f_c);
  n.lin_b = z.z0_ion * (2.0 * c.ion.charge() * e * eq.z_ion + c.ion.mass * g + f_c);
  return n;
}

ModeShift vacuum_shift(const NormalFormCoefficients& n, bool coupled) {
  ModeShift s;
  s.coupled = coupled;
  if (!coupled) {
    if (n.pot_a == 0.0 || n.pot_b == 0.0) throw NumericalError("degenerate quadratic form");
    s.c_a = -n.lin_a / (4.0 * n.pot_a);
    s.c_b = -n.lin_b / (4.0 * n.pot_b);
    return s;
  }
  const double diag = 16.0 * n.pot_a * n.pot_b;
  const double den = diag - 4.0 * n.c12 * n.c12;
  if (n.pot_a == 0.0 || n.pot_b == 0.0 || std::abs(den) <= 1e-14 * std::abs(diag))
    throw NumericalError("degenerate quadratic form");
  // Eliminating the partner mode keeps c12 = 0 bit-identical to the decoupled form.
  s.c_a = -(n.lin_a - n.c12 * n.lin_b / (2.0 * n.pot_b)) / (4.0 * n.pot_a - n.c12 * n.c12 / n.pot_b);
  s.c_b = -(n.lin_b - n.c12 * n.lin_a / (2.0 * n.pot_a)) / (4.0 * n.pot_b - n.c12 * n.c12 / n.pot_a);
  return s;
}

BogoliubovMode bogoliubov_mode(double a1, double a2) {
  if (!(std::abs(a1) < a2)) throw NumericalError("unstable quadratic form");
  const double t = a1 / a2;
  return {0.5 * std::atanh(t), 2.0 * a2 * std::sqrt((1.0 - t) * (1.0 + t))};
}

BogoliubovModes bogoliubov(const NormalFormCoefficients& n) {
  const BogoliubovMode a = bogoliubov_mode(n.pot_a - n.kin_a, n.pot_a + n.kin_a);
  const BogoliubovMode b = bogoliubov_mode(n.pot_b - n.kin_b, n.pot_b + n.kin_b);
  return {a.r, b.r, a.omega_tilde, b.omega_tilde, n.c12 * std::exp(-a.r - b.r)};
}

BranchPair branch_distances(const EquilibriumSolution& eq, const KickSpec& kick,
                            const ZeroPointData& zpd) {
  const double d = std::abs(eq.z_np - eq.z_ion);
  const double shift = 2.0 * zpd.z0_ion * kick.beta.real();
  BranchPair b{d + shift, d - shift, kick};
  if (!(b.d_plus > 0.0) || !(b.d_minus > 0.0))
    throw NumericalError("non-positive branch distance");
  return b;
}

EquilibriumSolution pinned_equilibrium(const SimConfig& c, double d) {
  if (!(d > 0.0)) throw ConfigError("separation override must be > 0");
  const double k_np = 2.0 * c.nanoparticle.charge() * end_field(c);
  if (!(k_np > 0.0)) throw NumericalError("no equilibrium: nanoparticle has no axial confinement");
  EquilibriumSolution s;
  s.z_np = (coulomb_strength(c) / (d * d) - c.nanoparticle.mass * c.gravity()) / k_np;
  s.z_ion = s.z_np - d;
  s.separation = d;
  s.residual_force_np = 0.0;
  s.residual_force_ion = axial_force(c, Particle::ion, s.z_ion, s.z_np);
  return s;
}

std::vector<double> period_grid(double omega_tilde, int samples) {
  if (samples < 1) throw ConfigError("sample count must be >= 1");
  if (!(omega_tilde > 0.0)) throw NumericalError("mode energy must be > 0");
  const double period = kTwoPi * kHbar / omega_tilde;
  std::vector<double> t(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) t[k] = period * k / samples;
  return t;
}

DisplacementTrace superposition_size(const SimConfig& c, std::optional<double> d_override,
                                     const KickSpec& kick, std::vector<double> times) {
  const EquilibriumSolution eq = reference_equilibrium(c, d_override);
  const ZeroPointData z = zero_point_data(c);
  const BranchPair br = branch_distances(eq, kick, z);
  const double d = std::abs(eq.z_np - eq.z_ion);

  DisplacementTrace tr;
  tr.omega_tilde_a = bogoliubov(hamiltonian_coeffs(c, eq, d)).omega_tilde_a;
  tr.c_a_plus = vacuum_shift(hamiltonian_coeffs(c, eq, br.d_plus), false).c_a;
  tr.c_a_minus = vacuum_shift(hamiltonian_coeffs(c, eq, br.d_minus), false).c_a;
  tr.z0_np = z.z0_np;
  tr.d_eq = d;
  const double amp = 2.0 * z.z0_np * std::abs(tr.c_a_minus - tr.c_a_plus);
  tr.delta_z_max = 2.0 * amp;
  tr.t_max = kPi * kHbar / tr.omega_tilde_a;
  tr.times = times.empty() ? period_grid(tr.omega_tilde_a) : std::move(times);
  tr.delta_z.resize(tr.times.size());
  const double w = tr.omega_tilde_a / kHbar;
  for (std::size_t k = 0; k < tr.times.size(); ++k)
    tr.delta_z[k] = amp * (1.0 - std::cos(w * tr.times[k]));
  return tr;
}

DisplacementTrace classical_branch_oracle(const SimConfig& c, std::optional<double> d_override,
                                          const KickSpec& kick, std::vector<double> times,
                                          int steps_per_period) {
  if (steps_per_period < 16) throw ConfigError("steps per period must be >= 16");
  const EquilibriumSolution eq = reference_equilibrium(c, d_override);
  const ZeroPointData z = zero_point_data(c);
  const BranchPair br = branch_distances(eq, kick, z);

  const double m = c.nanoparticle.mass;
  const double k = 2.0 * c.nanoparticle.charge() * end_field(c);
  const double sigma = orientation(eq);
  const double kc = coulomb_strength(c);
  const double g = c.gravity();
  auto force = [&](double zz, double d) { return -k * zz - m * g + sigma * kc / (d * d); };

  DisplacementTrace tr;
  tr.omega_tilde_a = kHbar * z.omega_np;
  tr.z0_np = z.z0_np;
  tr.d_eq = std::abs(eq.z_np - eq.z_ion);
  tr.t_max = kPi / z.omega_np;
  tr.times = times.empty() ? period_grid(tr.omega_tilde_a) : std::move(times);
  tr.delta_z.resize(tr.times.size());

  const double h_max = kTwoPi / z.omega_np / steps_per_period;
  struct Branch {
    double d, x, v;
  } branches[2] = {{br.d_plus, eq.z_np, 0.0}, {br.d_minus, eq.z_np, 0.0}};
  double t = 0.0;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    const double target = tr.times[i];
    if (target < t) throw ConfigError("oracle sample times must be ascending and >= 0");
    const long n = static_cast<long>(std::ceil((target - t) / h_max));
    if (n > 0) {
      const double h = (target - t) / n;
      for (auto& b : branches) {
        for (long s = 0; s < n; ++s) {
          const double a1 = force(b.x, b.d) / m;
          const double a2 = force(b.x + 0.5 * h * b.v, b.d) / m;
          const double a3 = force(b.x + 0.5 * h * (b.v + 0.5 * h * a1), b.d) / m;
          const double a4 = force(b.x + h * (b.v + 0.5 * h * a2), b.d) / m;
          b.x += h * (b.v + h / 6.0 * (a1 + a2 + a3));
          b.v += h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
        }
      }
    }
    t = target;
    tr.delta_z[i] = std::abs(branches[0].x - branches[1].x);
    tr.delta_z_max = std::max(tr.delta_z_max, tr.delta_z[i]);
  }
  return tr;
}

BranchFrequencies higher_order_frequencies(const SimConfig& c, const BranchPair& branch) {
  if (!(branch.d_plus > 0.0) || !(branch.d_minus > 0.0))
    throw NumericalError("non-positive branch distance");
  const ZeroPointData z = zero_point_data(c);
  auto modes = [&](double d) {
    NormalFormCoefficients n;
    fill_quadratic(c, z, d, true, n);
    return bogoliubov(n);
  };
  const BogoliubovModes p = modes(branch.d_plus);
  const BogoliubovModes m = modes(branch.d_minus);
  return {p.omega_tilde_a, m.omega_tilde_a, p.omega_tilde_b, m.omega_tilde_b};
}

namespace {

SimConfig scenario_config(const SimConfig& base, const Scenario& s) {
  SimConfig c = base;
  c.drive.v_end = s.v_end;
  c.nanoparticle.charge_e = s.charge_e;
  validate(c);
  return c;
}

SweepRow sweep_point(const SimConfig& c, const Scenario& s, double kick_m) {
  const ZeroPointData z = zero_point_data(c);
  const KickSpec kick = kick_from_displacement(kick_m, z.z0_ion);
  const DisplacementTrace tr = superposition_size(c, s.d_override, kick, {0.0});
  return {s.name, kick_m, tr.delta_z_max, tr.z0_np, tr.omega_tilde_a, tr.d_eq};
}

}  // namespace

std::vector<SweepRow> superposition_sweep_serial(const SimConfig& config,
                                                 const std::vector<double>& kicks,
                                                 const std::vector<Scenario>& scenarios) {
  std::vector<SweepRow> rows;
  rows.reserve(kicks.size() * scenarios.size());
  for (const auto& s : scenarios) {
    const SimConfig c = scenario_config(config, s);
    for (double k : kicks) rows.push_back(sweep_point(c, s, k));
  }
  return rows;
}

std::vector<SweepRow> superposition_sweep(const SimConfig& config, const std::vector<double>& kicks,
                                          const std::vector<Scenario>& scenarios, int jobs) {
  std::vector<SimConfig> configs;
  configs.reserve(scenarios.size());
  for (const auto& s : scenarios) configs.push_back(scenario_config(config, s));

  const long nk = static_cast<long>(kicks.size());
  const long total = nk * static_cast<long>(scenarios.size());
  std::vector<SweepRow> rows(static_cast<std::size_t>(total));
  std::vector<std::exception_ptr> errors(rows.size());
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
  for (long i = 0; i < total; ++i) {
    const long s = i / nk;
    try {
      rows[i] = sweep_point(configs[s], scenarios[s], kicks[i % nk]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  csv::write_header(out, {"scenario", "kick_m", "delta_z_max_m", "z0_np_m", "omega_tilde_a_J",
                          "d_eq_m"});
  for (const auto& r : rows)
    out << csv::field(r.scenario) << ',' << csv::format(r.kick) << ','
        << csv::format(r.delta_z_max) << ',' << csv::format(r.z0_np) << ','
        << csv::format(r.omega_tilde_a) << ',' << csv::format(r.d_eq) << '\n';
}

void write_trace_csv(std::ostream& out, const DisplacementTrace& trace) {
  csv::write_header(out, {"t_s", "delta_z_m"});
  for (std::size_t k = 0; k < trace.times.size(); ++k)
    out << csv::format(trace.times[k]) << ',' << csv::format(trace.delta_z[k]) << '\n';
}

}  // namespace cotrap
