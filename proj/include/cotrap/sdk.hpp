#pragma once

// State-dependent kick on the ion: Zeeman splitting of the pseudo-spin,
// Lamb-Dicke parameter of the Raman pair, and the first- and second-order
// terms of the kick propagator.

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace cotrap {

using Complex = std::complex<double>;

enum class SpinLevel { down, up };

/// Defaults: |down> = S1/2 (M_J = 1/2, g_J = 2), |up> = D5/2 (M_J = 3/2,
/// g_J = 6/5) of 40Ca+, both coupled to P3/2 at 393.366 nm and 854.209 nm.
struct IonLevelScheme {
  double g_lande_down = 2.0;
  double g_lande_up = 6.0 / 5.0;
  double m_j_down = 0.5;
  double m_j_up = 1.5;
  double lambda_down_e = 393.366e-9;  // m
  double lambda_up_e = 854.209e-9;    // m
};

/// Raman beams alpha and beta. Couplings g_{l,s} are in joules.
struct LaserConfig {
  double k_alpha = 0.0;  // 1/m, signed along z
  double k_beta = 0.0;
  double phi_alpha = 0.0;
  double phi_beta = 0.0;
  Complex g_alpha_down{}, g_alpha_up{}, g_beta_down{}, g_beta_up{};
  double detuning_big = 0.0;    // Delta, rad/s
  double detuning_small = 0.0;  // delta, rad/s
  double trap_omega = 0.0;      // omega_T, rad/s
  double ion_position = 0.0;    // Z0, m
};

/// Ion displacement in the text's naming (beta).
struct KickSpec {
  Complex beta{};
  double delta_z_ion = 0.0;  // 2 z0_ion Re(beta), m
  double duration = 0.0;     // s
  double npbar = 0.0;        // nanoparticle occupation; carried, not used
};

inline constexpr double kMaxKickMagnitude = 20.0;

/// mu_B g_J m_J B / h in Hz.
double zeeman_shift(SpinLevel level, const IonLevelScheme& scheme, double b_field);
double qubit_splitting(const IonLevelScheme& scheme, double b_field);

/// |dk| sqrt(hbar / (2 m omega_T)); counter-propagating beams add wavenumbers.
double lamb_dicke(const IonLevelScheme& scheme, double ion_mass, double trap_omega,
                  bool counter_propagating = true);

/// eta g*_{down,alpha} g_{up,beta} / (hbar^2 Delta) e^{i (k Z0 - phi)} in 1/s,
/// with k = k_beta - k_alpha and phi = phi_beta - phi_alpha.
Complex sdk_prefactor(const LaserConfig& laser, double eta);

/// alpha(t) = P [1 - e^{i theta t}] / (i theta), theta = omega_T - delta.
/// Switches to the series limit when |theta t| < 1e-6.
Complex sdk_alpha(const LaserConfig& laser, double eta, double t);

/// Off-resonance bound 2 |P| / |theta| on |alpha(t)|.
double sdk_alpha_bound(const LaserConfig& laser, double eta);

/// Phi(t_k) = Im int alpha* d alpha along the alpha(t) path (trapezoidal),
/// one value per grid point, Phi(t_0) = 0. Requires >= 16 uniform points.
std::vector<double> sdk_phase(const LaserConfig& laser, double eta, std::span<const double> t_grid);

/// Same accumulation for an arbitrary sampled path.
std::vector<double> path_phase(std::span<const Complex> path);

struct StarkShifts {
  double up = 0.0;  // chi_up / (hbar Delta), J
  double down = 0.0;
};
StarkShifts ac_stark_shifts(const LaserConfig& laser);

/// Warnings when |Delta| < 10 |g|/hbar for any coupling.
std::vector<std::string> adiabatic_warnings(const LaserConfig& laser);

KickSpec kick_from_alpha(Complex alpha, double z0_ion);

/// Kick of a given ion displacement delta_z = 2 z0 Re(beta), beta real.
KickSpec kick_from_displacement(double delta_z_ion, double z0_ion);

}  // namespace cotrap
