#pragma once

// Spin-branch quadratic Hamiltonians of the axial ion-nanoparticle modes,
// their vacuum shifts and Bogoliubov normal forms, and the conditional
// nanoparticle displacement built from them.
//
// Mode a is the nanoparticle, mode b the ion. With X = a + a^dagger,
// Y = b + b^dagger:
//
//   H = lin_a X + lin_b Y + pot_a X^2 + pot_b Y^2 + c12 X Y
//       - kin_a (a^dagger - a)^2 - kin_b (b^dagger - b)^2
//
// Energies are in joules; time evolution uses the phase omega_tilde t / hbar.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cotrap/config.hpp"
#include "cotrap/equilibrium.hpp"
#include "cotrap/sdk.hpp"

namespace cotrap {

struct ZeroPointData {
  double z0_ion = 0.0;  // m
  double z0_np = 0.0;
  double omega_ion = 0.0;  // rad/s, axial
  double omega_np = 0.0;
};

/// sqrt(hbar / (2 m omega)).
double zero_point_width(double mass, double omega);
ZeroPointData zero_point_data(const SimConfig& config);

struct NormalFormCoefficients {
  double lin_a = 0.0, lin_b = 0.0;  // J
  double pot_a = 0.0, pot_b = 0.0;
  double kin_a = 0.0, kin_b = 0.0;
  double c12 = 0.0;
  bool include_higher_order = false;
  double d_eq_branch = 0.0;  // m
};

/// Derivatives of the axial potential at the pre-kick positions eq.z_ion and
/// eq.z_np, with the Coulomb terms evaluated at the branch separation. The
/// orientation (nanoparticle above or below the ion) follows the sign of
/// eq.z_np - eq.z_ion. Without higher-order terms pot = Q kappa_end V_end
/// z0^2 / z0_ax^2 and c12 = 0; with them both pot terms gain k Q_i Q_np z0^2
/// / d^3 and c12 = -2 k Q_i Q_np z0_ion z0_np / d^3.
NormalFormCoefficients hamiltonian_coeffs(const SimConfig& config, const EquilibriumSolution& eq,
                                          double d_branch, bool include_higher_order = false);

struct ModeShift {
  double c_a = 0.0;
  double c_b = 0.0;
  bool coupled = false;
};

/// Real shifts a -> a + c_a, b -> b + c_b that cancel the linear terms.
/// The coupled form solves both equations with c12; the decoupled one
/// ignores c12. Throws NumericalError("degenerate quadratic form").
ModeShift vacuum_shift(const NormalFormCoefficients& c, bool coupled = true);

struct BogoliubovMode {
  double r = 0.0;
  double omega_tilde = 0.0;  // J
};

/// Normal form of A1 (aa + a^dagger a^dagger) + A2 (a a^dagger + a^dagger a):
/// tanh 2r = A1 / A2, omega_tilde = 2 sqrt(A2^2 - A1^2). Throws
/// NumericalError("unstable quadratic form") unless |A1| < A2.
BogoliubovMode bogoliubov_mode(double a1, double a2);

struct BogoliubovModes {
  double r_a = 0.0, r_b = 0.0;
  double omega_tilde_a = 0.0, omega_tilde_b = 0.0;  // J
  double c12_tilde = 0.0;                           // J
};

/// A1 = pot - kin, A2 = pot + kin per mode. Since X = e^{-r} X_tilde,
/// c12_tilde = c12 exp(-r_a - r_b).
BogoliubovModes bogoliubov(const NormalFormCoefficients& c);

struct BranchPair {
  double d_plus = 0.0;  // m
  double d_minus = 0.0;
  KickSpec kick;
};

/// d_pm = |z_np - z_ion| +- 2 z0_ion Re(beta). Throws NumericalError when
/// either is not positive.
BranchPair branch_distances(const EquilibriumSolution& eq, const KickSpec& kick,
                            const ZeroPointData& zpd);

/// Positions with the nanoparticle in force balance at separation d above
/// the ion (the ion itself is generally not in balance).
EquilibriumSolution pinned_equilibrium(const SimConfig& config, double d);

struct DisplacementTrace {
  std::vector<double> times;    // s
  std::vector<double> delta_z;  // m
  double delta_z_max = 0.0;     // 4 z0_np |c_a^- - c_a^+|
  double t_max = 0.0;           // pi hbar / omega_tilde_a
  double omega_tilde_a = 0.0;   // J
  double c_a_plus = 0.0;
  double c_a_minus = 0.0;
  double z0_np = 0.0;
  double d_eq = 0.0;
};

inline constexpr int kDefaultTraceSamples = 2048;

/// Uniform grid t_k = k T / n, k < n, over one period T = 2 pi hbar / omega_tilde.
std::vector<double> period_grid(double omega_tilde, int samples = kDefaultTraceSamples);

/// Delta z(t) = 2 z0_np |c_a^- - c_a^+| (1 - cos(omega_tilde_a t / hbar)) with
/// decoupled shifts. `d_override` replaces the solved equilibrium; empty
/// `times` selects period_grid.
DisplacementTrace superposition_size(const SimConfig& config, std::optional<double> d_override,
                                     const KickSpec& kick, std::vector<double> times = {});

/// Nanoparticle centroid in each branch: harmonic end-cap force, gravity and
/// the Coulomb force of the displaced ion, frozen at its branch value. Both
/// start at rest at the pre-kick position; RK4 with `steps_per_period` steps
/// per axial period. Returns |z_+ - z_-|.
DisplacementTrace classical_branch_oracle(const SimConfig& config, std::optional<double> d_override,
                                          const KickSpec& kick, std::vector<double> times = {},
                                          int steps_per_period = 4096);

struct BranchFrequencies {
  double omega_a_plus = 0.0, omega_a_minus = 0.0;  // J
  double omega_b_plus = 0.0, omega_b_minus = 0.0;
};

/// omega_tilde of both modes with the 1/d^3 Coulomb stiffening retained.
BranchFrequencies higher_order_frequencies(const SimConfig& config, const BranchPair& branch);

struct Scenario {
  std::string name;
  double v_end = 0.0;     // V
  double charge_e = 0.0;  // nanoparticle charge in e
  std::optional<double> d_override;
};

struct SweepRow {
  std::string scenario;
  double kick = 0.0;  // m, ion displacement
  double delta_z_max = 0.0;
  double z0_np = 0.0;
  double omega_tilde_a = 0.0;
  double d_eq = 0.0;
};

/// Rows ordered scenario-major, kick-minor.
std::vector<SweepRow> superposition_sweep_serial(const SimConfig& config,
                                                 const std::vector<double>& kicks,
                                                 const std::vector<Scenario>& scenarios);
std::vector<SweepRow> superposition_sweep(const SimConfig& config, const std::vector<double>& kicks,
                                          const std::vector<Scenario>& scenarios, int jobs = 0);

/// Header `scenario,kick_m,delta_z_max_m,z0_np_m,omega_tilde_a_J,d_eq_m`.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_trace_csv(std::ostream& out, const DisplacementTrace& trace);

}  // namespace cotrap
