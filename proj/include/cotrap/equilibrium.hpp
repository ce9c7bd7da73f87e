#pragma once

// Axial force balance of the ion-nanoparticle pair and full 6-DOF
// time-domain integration of the trap equations of motion.

#include <array>
#include <ostream>
#include <vector>

#include "cotrap/config.hpp"

namespace cotrap {

/// Which side of the ion the nanoparticle sits on along z.
enum class Branch { above, below };

struct EquilibriumSolution {
  double z_ion = 0.0;  // m
  double z_np = 0.0;
  double separation = 0.0;  // oriented: +(z_np - z_ion) above, -(z_np - z_ion) below
  double residual_force_ion = 0.0;  // N
  double residual_force_np = 0.0;
  int iterations = 0;
  bool coincident = false;  // both particles at the same point (degenerate inputs)
  bool used_bisection = false;
};

inline constexpr double kForceTolerance = 1e-22;  // N
inline constexpr int kMaxNewtonIterations = 200;
inline constexpr double kBracketMin = 1e-8;  // m
inline constexpr double kBracketMax = 1e-2;

/// Net axial force on `particle` at z_self with its partner at z_other:
/// end-cap restoring force, exact Coulomb repulsion, and gravity along -z.
/// Throws NumericalError("zero separation") if the positions coincide while
/// the Coulomb interaction is enabled.
double axial_force(const SimConfig& config, Particle particle, double z_self, double z_other);

/// Newton iteration on both z-coordinates with an analytic Jacobian, falling
/// back to bisection on the separation. Residuals below kForceTolerance.
EquilibriumSolution static_equilibrium(const SimConfig& config, double initial_guess_d,
                                       Branch branch = Branch::above);

struct VoltagePoint {
  double v_end = 0.0;
  EquilibriumSolution solution;
};

/// Sweep over end-cap voltages. Serial mode warm-starts each solve from the
/// previous separation; parallel mode (jobs != 1) solves every point from
/// `initial_guess_d` so the output does not depend on scheduling.
std::vector<VoltagePoint> separation_vs_voltage(const SimConfig& config,
                                                const std::vector<double>& v_end_list,
                                                double initial_guess_d = 50e-6, int jobs = 1,
                                                Branch branch = Branch::above);

void write_equilibrium_csv(std::ostream& out, const std::vector<VoltagePoint>& points);
void write_equilibrium_report(std::ostream& out, const EquilibriumSolution& s);

/// Positions then velocities: x_i, y_i, z_i, x_np, y_np, z_np, vx_i, ..., vz_np.
using PairState = std::array<double, 12>;

struct TrajectoryTrace {
  std::vector<double> times;
  std::vector<PairState> states;
  std::array<double, 6> time_avg_positions{};
  std::array<double, 6> micromotion_amplitude{};  // max |pos - avg| in the window
  double averaging_window = 0.0;  // s, an integer number of slow periods if possible
};

/// PairState at rest at a solved equilibrium, radial coordinates 0.
PairState state_at_rest(const EquilibriumSolution& eq);

/// Default step 2 pi / (200 Omega_f).
double default_time_step(const SimConfig& config);

/// Fixed-step RK4 of both particles in both RF tones with exact Coulomb
/// coupling. Requires dt <= 2 pi / (50 Omega_f); negative dt integrates
/// backwards. Records every `record_stride`-th step.
TrajectoryTrace integrate_eom(const SimConfig& config, const PairState& initial, double t_end,
                              double dt, int record_stride = 1);

/// Header `t,z_ion,z_np,x_ion,y_ion,x_np,y_np`.
void write_trajectory_csv(std::ostream& out, const TrajectoryTrace& trace);

/// Energy of the axial subsystem (kinetic + end-cap + Coulomb + gravity).
double axial_energy(const SimConfig& config, const PairState& s);

}  // namespace cotrap
