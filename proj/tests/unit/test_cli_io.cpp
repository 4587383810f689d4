#include <doctest.h>

#include "capeuler/checkpoint.hpp"
#include "capeuler/config.hpp"
#include "capeuler/run_io.hpp"

#include <cstdio>
#include <fstream>

using namespace capeuler;

TEST_CASE("minimal config gets defaults") {
  SimConfig cfg = parse_config_text("[geometry]\ntype = circle\n[sim]\neps = 0.5\n");
  CHECK(cfg.n_theta == 256);
  CHECK(cfg.n_r == 64);
  CHECK(cfg.dt == 0.0); // auto
  CHECK(cfg.eps == 0.5);
}

TEST_CASE("config rejects unknown keys with line context") {
  try {
    parse_config_text("[sim]\neps = 0.5\nepz = 0.1\n", "bad.cfg");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    CHECK(msg.find("bad.cfg:3") != std::string::npos);
    CHECK(msg.find("epz") != std::string::npos);
  }
}

TEST_CASE("config validation") {
  // annulus without inner radius
  CHECK_THROWS_WITH_AS(
      parse_config_text("[geometry]\ntype = annulus\nouter_radius = 2.0\n"),
      doctest::Contains("inner_radius"), ConfigError);
  // dt beyond the stability bound names the bound
  try {
    parse_config_text(
        "[geometry]\ntype = circle\n[sim]\neps = 1.0\nn_theta = 128\ndt = 0.5\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("stability bound") != std::string::npos);
  }
  // bad numbers carry their location
  CHECK_THROWS_AS(parse_config_text("[sim]\neps = zebra\n"), ConfigError);
  // modes syntax
  SimConfig cfg = parse_config_text(
      "[geometry]\ntype = circle\n[perturbation]\nmodes = 3:1e-3, 5:2e-4\n");
  REQUIRE(cfg.shape_modes.size() == 2);
  CHECK(cfg.shape_modes[1].first == 5);
  CHECK(cfg.shape_modes[1].second == doctest::Approx(2e-4));
}

TEST_CASE("checkpoint round trips") {
  SimConfig cfg;
  cfg.n_theta = 64;
  cfg.eps = 0.3;
  cfg.shape_modes = {{3, 1e-3}};
  cfg.phi_modes = {{2, 5e-4}};
  WaveState s = init_state(cfg);
  s.t = 0.7251;
  s.bernoulli_offset = -0.1;

  SUBCASE("text is bit exact") {
    write_checkpoint_text("ckpt_test.json", s);
    WaveState r = read_checkpoint("ckpt_test.json");
    CHECK(r.t == s.t);
    CHECK(r.eps == s.eps);
    CHECK(r.bernoulli_offset == s.bernoulli_offset);
    CHECK((r.outer.rho_modes() - s.outer.rho_modes()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((r.phi_outer - s.phi_outer).cwiseAbs().maxCoeff() == 0.0);
    std::remove("ckpt_test.json");
  }

  SUBCASE("binary carries full float64") {
    write_checkpoint_binary("ckpt_test.bin", s);
    CheckpointInfo info = checkpoint_info("ckpt_test.bin");
    CHECK(info.format == "binary");
    CHECK(info.n_theta == 64);
    WaveState r = read_checkpoint("ckpt_test.bin");
    CHECK(r.t == s.t);
    CHECK((r.outer.rho_modes() - s.outer.rho_modes()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((r.phi_outer - s.phi_outer).cwiseAbs().maxCoeff() == 0.0);
    std::remove("ckpt_test.bin");
  }

  SUBCASE("annulus state round trips") {
    SimConfig ac;
    ac.geometry = SimConfig::Geometry::annulus;
    ac.inner_radius = 1.0;
    ac.outer_radius = 2.0;
    ac.flux = 0.5;
    ac.n_theta = 64;
    WaveState sa = init_state(ac);
    write_checkpoint_text("ckpt_ann.json", sa);
    WaveState ra = read_checkpoint("ckpt_ann.json");
    CHECK(ra.is_annulus());
    CHECK((ra.phi_inner - sa.phi_inner).cwiseAbs().maxCoeff() == 0.0);
    std::remove("ckpt_ann.json");
  }
}

TEST_CASE("legacy checkpoint version is rejected by name") {
  std::ofstream out("ckpt_old.json");
  out << "{\"format_version\": 0, \"kind\": \"disk\", \"t\": 0, \"eps\": 0,"
      << "\"bernoulli_offset\": 0, \"flux\": 0, \"n_theta\": 4,"
      << "\"center\": [0,0], \"outer_rho_spectrum\": [1,0,0,0,0,0,0,0],"
      << "\"phi_outer\": [0,0,0,0]}\n";
  out.close();
  try {
    read_checkpoint("ckpt_old.json");
    FAIL("expected version error");
  } catch (const std::runtime_error& e) {
    std::string msg = e.what();
    CHECK(msg.find("version 0") != std::string::npos);
    CHECK(msg.find("expected 1") != std::string::npos);
  }
  std::remove("ckpt_old.json");
}

TEST_CASE("timeseries format") {
  CHECK(timeseries_header() ==
        "t,E0,E_dtJ,E_eps,E_vort,E_RT,rt_margin,max_kappa,area,"
        "mon_kappa_h2,mon_v_h3,mon_kappa_h1");
  EnergyReport rep;
  rep.E0 = 1.0 / 3.0;
  std::string row1 = timeseries_row(0.125, rep);
  std::string row2 = timeseries_row(0.125, rep);
  CHECK(row1 == row2); // deterministic formatting
  CHECK(row1.find("0.33333333333333331") != std::string::npos);
}

TEST_CASE("config hash is stable") {
  CHECK(hash_text("abc") == hash_text("abc"));
  CHECK(hash_text("abc") != hash_text("abd"));
}
