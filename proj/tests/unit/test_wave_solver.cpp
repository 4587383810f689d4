#include <doctest.h>

#include "capeuler/exact_solutions.hpp"
#include "capeuler/wave_solver.hpp"

#include <cmath>

using namespace capeuler;

TEST_CASE("equilibrium circle is a fixed point of the stepper") {
  SimConfig cfg;
  cfg.n_theta = 64;
  cfg.n_r = 24;
  cfg.eps = 0.5;
  WaveState s = init_state(cfg);
  for (int i = 0; i < 5; ++i) {
    WaveState s2 = step(s, 1e-2, cfg.n_r);
    CHECK((s2.outer.rho() - s.outer.rho()).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((s2.phi_outer - s.phi_outer).cwiseAbs().maxCoeff() < 1e-13);
    s = s2;
  }
  // the absorbed Bernoulli constant integrates -eps^2 kappa
  CHECK(s.bernoulli_offset == doctest::Approx(-0.25 * 5e-2).epsilon(1e-10));
}

TEST_CASE("one step is time reversible to high order") {
  SimConfig cfg;
  cfg.n_theta = 64;
  cfg.n_r = 24;
  cfg.eps = 0.5;
  cfg.shape_modes = {{2, 1e-3}};
  WaveState s0 = init_state(cfg);
  double dt = 2e-3;
  WaveState fwd = step(s0, dt, cfg.n_r);
  WaveState back = step(fwd, -dt, cfg.n_r);
  CHECK((back.outer.rho() - s0.outer.rho()).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((back.phi_outer - s0.phi_outer).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("capillary drop frequency matches the dispersion law") {
  SimConfig cfg;
  cfg.n_theta = 128;
  cfg.n_r = 32;
  cfg.cfl = 0.35;
  DispersionResult r = dispersion_probe(3, 1e-3, 0.5, cfg);
  CHECK(r.oscillation_detected);
  CHECK_FALSE(r.contaminated);
  CHECK(r.deviation < 0.01);
}

TEST_CASE("no restoring force without surface tension") {
  SimConfig cfg;
  cfg.n_theta = 64;
  cfg.n_r = 24;
  DispersionResult r = dispersion_probe(3, 1e-3, 0.0, cfg);
  CHECK_FALSE(r.oscillation_detected);
}

TEST_CASE("dispersion probe rejects nonlinear amplitudes") {
  SimConfig cfg;
  CHECK_THROWS_AS(dispersion_probe(3, 0.1, 0.5, cfg), std::invalid_argument);
}

TEST_CASE("drop run conserves E0 and area") {
  SimConfig cfg;
  cfg.n_theta = 64;
  cfg.n_r = 24;
  cfg.eps = 0.5;
  cfg.shape_modes = {{3, 1e-3}};
  cfg.cfl = 0.4;
  // one oscillation period of the k=3 mode
  cfg.t_final = 2.0 * M_PI / std::sqrt(0.25 * 3.0 * 8.0);
  cfg.output_every = 10;
  DiagnosticsSeries series = simulate(cfg);
  CHECK(series.e0_max_drift < 1e-7);
  CHECK(series.area_max_drift < 1e-9);
  CHECK(series.rows.size() >= 3);
}

TEST_CASE("annulus radial flow matches the ODE oracle") {
  SimConfig cfg;
  cfg.geometry = SimConfig::Geometry::annulus;
  cfg.inner_radius = 1.0;
  cfg.outer_radius = 2.0;
  cfg.flux = 0.5;
  cfg.n_theta = 64;
  cfg.n_r = 32;
  cfg.eps = 0.0;
  cfg.t_final = 0.2;
  WaveState s = init_state(cfg);
  double dt = 5e-3;
  while (s.t < cfg.t_final - 1e-14) s = step(s, std::min(dt, cfg.t_final - s.t), cfg.n_r);

  AnnulusODEState ode = make_annulus_state(1.0, 2.0, 0.5, [](double) { return 0.0; });
  AnnulusTrajectory traj = annulus_integrate(ode, cfg.t_final, 1e-4);
  double r1_ode = traj.samples.back().r1;
  double r2_ode = traj.samples.back().r2;
  CHECK(std::abs(s.inner->rho().mean() - r1_ode) < 1e-6);
  CHECK(std::abs(s.outer.rho().mean() - r2_ode) < 1e-6);
  // boundaries stay circular
  CHECK((s.outer.rho().array() - s.outer.rho().mean()).abs().maxCoeff() < 1e-10);
}

TEST_CASE("annulus with surface tension matches the extended ODE oracle") {
  SimConfig cfg;
  cfg.geometry = SimConfig::Geometry::annulus;
  cfg.inner_radius = 1.0;
  cfg.outer_radius = 1.5;
  cfg.flux = 0.5;
  cfg.n_theta = 64;
  cfg.n_r = 32;
  cfg.eps = 0.4;
  cfg.t_final = 0.2;
  WaveState s = init_state(cfg);
  double dt = 2e-3;
  while (s.t < cfg.t_final - 1e-14) s = step(s, std::min(dt, cfg.t_final - s.t), cfg.n_r);
  AnnulusODEState ode = make_annulus_state(1.0, 1.5, 0.5, [](double) { return 0.0; });
  AnnulusTrajectory traj = annulus_integrate(ode, cfg.t_final, 1e-4, cfg.eps);
  CHECK(std::abs(s.outer.rho().mean() - traj.samples.back().r2) < 1e-6);
  CHECK(std::abs(s.inner->rho().mean() - traj.samples.back().r1) < 1e-6);
}

TEST_CASE("eps sweep refuses an RT-violating scenario") {
  // a static annulus has zero margin: refused
  SimConfig cfg;
  cfg.geometry = SimConfig::Geometry::annulus;
  cfg.inner_radius = 1.0;
  cfg.outer_radius = 1.5;
  cfg.flux = 0.0;
  cfg.n_theta = 64;
  cfg.n_r = 24;
  cfg.t_final = 0.05;
  EpsSweepResult r = eps_sweep(cfg, {0.2, 0.1});
  CHECK(r.refused);
}

TEST_CASE("stability rule rejects oversized dt through the config path") {
  SimConfig cfg;
  cfg.n_theta = 128;
  cfg.n_r = 24;
  cfg.eps = 1.0;
  WaveState s = init_state(cfg);
  double bound = stability_dt(s, 0.5);
  CHECK(bound > 0.0);
  CHECK(bound < 0.1);
}
