#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cotrap/constants.hpp"
#include "cotrap/equilibrium.hpp"
#include "cotrap/error.hpp"
#include "cotrap/stability.hpp"
#include "support.hpp"

using namespace cotrap;

namespace {

double stiffness(const SimConfig& c, const ParticleSpec& p) {
  return 2.0 * p.charge() * c.geometry.kappa_end * c.drive.v_end /
         (c.geometry.z0_ax * c.geometry.z0_ax);
}

SimConfig drives_off(SimConfig c) {
  c.drive.v_slow = c.drive.v_fast = c.drive.v_offset = 0.0;
  return c;
}

}  // namespace

TEST_CASE("axial force limits") {
  SimConfig c = reference_config();
  c.gravity_on = false;
  c.ion.charge_e = c.nanoparticle.charge_e = 0.0;
  CHECK(axial_force(c, Particle::ion, 0.0, 1e-6) == 0.0);

  c = reference_config();
  c.gravity_on = false;
  c.drive.v_end = 0.0;
  const double d = 20e-6;
  const double coulomb = kCoulombConstant * c.ion.charge() * c.nanoparticle.charge() / (d * d);
  CHECK(axial_force(c, Particle::nanoparticle, d, 0.0) == doctest::Approx(coulomb).epsilon(1e-14));
  CHECK(axial_force(c, Particle::ion, 0.0, d) == doctest::Approx(-coulomb).epsilon(1e-14));
  CHECK_THROWS_WITH_AS(axial_force(c, Particle::ion, 1e-6, 1e-6), "zero separation",
                       NumericalError);
}

TEST_CASE("solved equilibria have sub-tolerance residuals") {
  const SimConfig base = reference_config();
  for (double v : {200.0, 300.0, 400.0, 500.0})
    for (bool gravity : {true, false}) {
      SimConfig c = base;
      c.drive.v_end = v;
      c.gravity_on = gravity;
      for (Branch b : {Branch::above, Branch::below}) {
        const EquilibriumSolution s = static_equilibrium(c, 50e-6, b);
        CHECK(s.separation > 0.0);
        CHECK(std::abs(axial_force(c, Particle::ion, s.z_ion, s.z_np)) < kForceTolerance);
        CHECK(std::abs(axial_force(c, Particle::nanoparticle, s.z_np, s.z_ion)) <
              kForceTolerance);
        CHECK((b == Branch::above) == (s.z_np > s.z_ion));
      }
    }
}

TEST_CASE("degenerate and decoupled limits") {
  SimConfig c = reference_config();
  c.gravity_on = false;
  c.ion.charge_e = c.nanoparticle.charge_e = 0.0;
  c.drive.v_end = 200.0;
  // Zero charge removes the axial confinement too; with gravity off both
  // particles simply stay at the origin.
  EquilibriumSolution s = static_equilibrium(c, 50e-6);
  CHECK(s.coincident);
  CHECK(s.separation == 0.0);

  c = reference_config();
  c.gravity_on = false;
  c.coulomb_on = false;
  s = static_equilibrium(c, 50e-6);
  CHECK(s.coincident);
  CHECK(s.z_ion == 0.0);
  CHECK(s.z_np == 0.0);

  c = reference_config();
  c.coulomb_on = false;
  s = static_equilibrium(c, 50e-6);
  CHECK(s.z_np ==
        doctest::Approx(-c.nanoparticle.mass * kStandardGravity / stiffness(c, c.nanoparticle))
            .epsilon(1e-14));
  CHECK(s.z_ion == doctest::Approx(-c.ion.mass * kStandardGravity / stiffness(c, c.ion))
                       .epsilon(1e-14));
}

TEST_CASE("independent of the initial guess") {
  const SimConfig c = reference_config();
  const EquilibriumSolution ref = static_equilibrium(c, 50e-6);
  for (double g : {10e-6, 100e-6}) {
    const EquilibriumSolution s = static_equilibrium(c, g);
    CHECK(std::abs(s.z_np - ref.z_np) < 1e-12);
    CHECK(std::abs(s.z_ion - ref.z_ion) < 1e-12);
  }
  CHECK_THROWS_AS(static_equilibrium(c, 0.0), ConfigError);
}

TEST_CASE("voltage sweep follows the inverse cube root") {
  SimConfig c = reference_config();
  c.gravity_on = false;
  const auto pts = separation_vs_voltage(c, {200.0, 400.0, 500.0});
  const double d200 = pts[0].solution.separation;
  CHECK(pts[1].solution.separation / d200 == doctest::Approx(std::cbrt(0.5)).epsilon(0.05));
  CHECK(pts[2].solution.separation / d200 == doctest::Approx(std::cbrt(0.4)).epsilon(0.05));
  // Without gravity d^3 = K (1/k_ion + 1/k_np) with both springs linear in V.
  const double ratio = pts[1].solution.separation / d200;
  CHECK(ratio == doctest::Approx(std::cbrt(0.5)).epsilon(1e-6));
}

TEST_CASE("sweep is monotone and a single entry matches the direct solve") {
  const SimConfig c = reference_config();
  std::vector<double> volts;
  for (int i = 0; i < 10; ++i) volts.push_back(200.0 + 30.0 * i);
  const auto pts = separation_vs_voltage(c, volts);
  for (std::size_t i = 1; i < pts.size(); ++i)
    CHECK(pts[i].solution.separation < pts[i - 1].solution.separation);
  const auto one = separation_vs_voltage(c, {c.drive.v_end});
  CHECK(one[0].solution.separation == static_equilibrium(c, 50e-6).separation);
  CHECK_THROWS_AS(separation_vs_voltage(c, {0.0}), ConfigError);
}

TEST_CASE("gravity-free separation matches the two-spring closed form") {
  SimConfig c = reference_config();
  c.gravity_on = false;
  const EquilibriumSolution s = static_equilibrium(c, 50e-6);
  const double k = kCoulombConstant * c.ion.charge() * c.nanoparticle.charge();
  const double k_np = stiffness(c, c.nanoparticle);
  const double k_ion = stiffness(c, c.ion);
  CHECK(s.separation == doctest::Approx(std::cbrt(k * (1.0 / k_np + 1.0 / k_ion))).epsilon(1e-12));
}

TEST_CASE("pinned-partner estimate holds when the partner is much stiffer") {
  // Static stiffness scales with charge, not charge-to-mass, so the ion is
  // only pinned when it carries the larger charge.
  SimConfig c = reference_config();
  c.gravity_on = false;
  c.ion.charge_e = 800.0;
  c.nanoparticle.charge_e = 1.0;
  const EquilibriumSolution s = static_equilibrium(c, 50e-6);
  const double k = kCoulombConstant * c.ion.charge() * c.nanoparticle.charge();
  const double pinned = std::cbrt(k / stiffness(c, c.nanoparticle));
  CHECK(s.separation == doctest::Approx(pinned).epsilon(0.01));
}

TEST_CASE("equilibrium CSV and report") {
  const auto pts = separation_vs_voltage(reference_config(), {200.0, 500.0});
  std::ostringstream out;
  write_equilibrium_csv(out, pts);
  CHECK(out.str().rfind("v_end_V,z_ion_m,z_np_m,d_eq_m,", 0) == 0);
  std::ostringstream rep;
  write_equilibrium_report(rep, pts[0].solution);
  CHECK(rep.str().find("residual_force_np_N = ") != std::string::npos);
}

TEST_CASE("time integration: stationary start") {
  SimConfig c = drives_off(reference_config());
  c.drive.v_end = 0.0;
  c.gravity_on = false;
  c.coulomb_on = false;
  PairState s{};
  s[2] = -1e-5;
  s[5] = 1e-5;
  const TrajectoryTrace tr = integrate_eom(c, s, 1e-6, default_time_step(c));
  for (std::size_t k = 0; k < 12; ++k) CHECK(tr.states.back()[k] == s[k]);
}

TEST_CASE("time integration: harmonic axial period") {
  SimConfig c = drives_off(reference_config());
  c.gravity_on = false;
  c.coulomb_on = false;
  const double w = axial_frequency(c, Particle::ion);
  const double period = kTwoPi / w;
  PairState s{};
  s[2] = 1e-6;
  const double dt = kTwoPi / (200.0 * c.drive.omega_fast);
  const long steps = std::lround(period / dt);
  const TrajectoryTrace tr = integrate_eom(c, s, steps * dt, dt);
  // Locate the first return to the starting maximum by parabolic interpolation.
  std::size_t best = 1;
  for (std::size_t k = 1; k + 1 < tr.times.size(); ++k)
    if (tr.times[k] > 0.5 * period && tr.states[k][2] > tr.states[best][2]) best = k;
  const double y0 = tr.states[best - 1][2], y1 = tr.states[best][2], y2 = tr.states[best + 1][2];
  const double offset = 0.5 * (y0 - y2) / (y0 - 2.0 * y1 + y2);
  const double t_peak = tr.times[best] + offset * dt;
  CHECK(std::abs(t_peak - period) / period < 1e-6);
}

TEST_CASE("time integration: time reversal") {
  SimConfig c = drives_off(reference_config());
  c.gravity_on = true;
  const EquilibriumSolution eq = static_equilibrium(c, 50e-6);
  PairState s = state_at_rest(eq);
  s[2] += 2e-7;
  s[5] -= 1e-8;
  const double dt = default_time_step(c);
  const TrajectoryTrace fwd = integrate_eom(c, s, 2000 * dt, dt);
  const TrajectoryTrace back = integrate_eom(c, fwd.states.back(), -2000 * dt, -dt);
  for (int k : {2, 5}) CHECK(std::abs(back.states.back()[k] - s[k]) <= 1e-8 * std::abs(s[k]));
}

TEST_CASE("time integration: energy drift with drives off") {
  SimConfig c = drives_off(reference_config());
  const EquilibriumSolution eq = static_equilibrium(c, 50e-6);
  PairState s = state_at_rest(eq);
  s[2] += 1e-7;
  const double dt = default_time_step(c);
  const TrajectoryTrace tr = integrate_eom(c, s, 1000000 * dt, dt, 1000000);
  const double e0 = axial_energy(c, s);
  const double e1 = axial_energy(c, tr.states.back());
  const double scale = std::abs(axial_energy(c, s) - axial_energy(c, state_at_rest(eq)));
  CHECK(std::abs(e1 - e0) < 1e-6 * scale);
}

TEST_CASE("time integration: averaged positions track the static equilibrium") {
  const SimConfig c = reference_config();
  const EquilibriumSolution eq = static_equilibrium(c, 50e-6);
  const double dt = default_time_step(c);
  const double t_end = kTwoPi / c.drive.omega_slow;
  const TrajectoryTrace tr = integrate_eom(c, state_at_rest(eq), t_end, dt, 50);
  CHECK(tr.averaging_window == doctest::Approx(t_end).epsilon(1e-9));
  CHECK(std::abs(tr.time_avg_positions[2] - eq.z_ion) <=
        tr.micromotion_amplitude[2] + 1e-3 * eq.separation);
  CHECK(std::abs(tr.time_avg_positions[5] - eq.z_np) <=
        tr.micromotion_amplitude[5] + 1e-3 * eq.separation);
}

TEST_CASE("time integration: step limits") {
  const SimConfig c = reference_config();
  CHECK_THROWS_AS(integrate_eom(c, PairState{}, 1e-6, 0.0), ConfigError);
  CHECK_THROWS_AS(integrate_eom(c, PairState{}, 1e-6, kTwoPi / (40.0 * c.drive.omega_fast)),
                  ConfigError);
  std::ostringstream out;
  write_trajectory_csv(out, integrate_eom(c, state_at_rest(static_equilibrium(c, 50e-6)),
                                          10 * default_time_step(c), default_time_step(c)));
  CHECK(out.str().rfind("t,z_ion,z_np,x_ion,y_ion,x_np,y_np\n", 0) == 0);
}
