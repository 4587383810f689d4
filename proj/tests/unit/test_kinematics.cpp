#include <doctest.h>

#include "capeuler/kinematics.hpp"

#include <cmath>

using namespace capeuler;

namespace {

FlowSnapshot snapshot_of(const std::string& family, double t, int n, int nr) {
  return standard_family(family, n).snapshot_at(t, nr);
}

} // namespace

TEST_CASE("dt_normal closed forms") {
  // rigid rotation on the unit circle: D_t N = omega e_theta
  FlowSnapshot rot = snapshot_of("rigid-rotation", 0.0, 128, 32);
  auto [dnx, dny] = dt_normal(rot);
  const Vec& th = rot.domain->theta();
  for (int j = 0; j < 128; j += 9) {
    CHECK(dnx[j] == doctest::Approx(-0.7 * std::sin(th[j])).epsilon(1e-8));
    CHECK(dny[j] == doctest::Approx(0.7 * std::cos(th[j])).epsilon(1e-8));
  }
  // radial expansion: the normal never turns
  FlowSnapshot exp = snapshot_of("expanding-circle", 0.0, 128, 32);
  auto [ex, ey] = dt_normal(exp);
  CHECK(ex.cwiseAbs().maxCoeff() < 1e-9);
  CHECK(ey.cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("dt_surface_measure closed forms") {
  FlowSnapshot exp = snapshot_of("expanding-circle", 0.0, 128, 32);
  BoundaryScalar f = dt_surface_measure(exp);
  CHECK((f.values.array() - 1.0).abs().maxCoeff() < 1e-9); // 1/R at R=1

  FlowSnapshot rot = snapshot_of("rigid-rotation", 0.0, 128, 32);
  CHECK(dt_surface_measure(rot).values.cwiseAbs().maxCoeff() < 1e-9);

  // expanding circle at a later time: R = 1 + t
  FlowSnapshot exp2 = snapshot_of("expanding-circle", 0.5, 128, 32);
  CHECK((dt_surface_measure(exp2).values.array() - 1.0 / 1.5).abs().maxCoeff() < 1e-8);
}

TEST_CASE("dt_curvature closed forms and internal agreement") {
  FlowSnapshot exp = snapshot_of("expanding-circle", 0.0, 128, 32);
  DtCurvature dk = dt_curvature(exp);
  CHECK((dk.via_normal_speed.values.array() + 1.0).abs().maxCoeff() < 1e-9);
  CHECK((dk.via_velocity_laplacian.values.array() + 1.0).abs().maxCoeff() < 1e-9);

  FlowSnapshot rot = snapshot_of("rigid-rotation", 0.0, 128, 32);
  DtCurvature dkr = dt_curvature(rot);
  CHECK(dkr.via_normal_speed.values.cwiseAbs().maxCoeff() < 1e-9);

  // the two assembled forms agree on a deforming family
  FlowSnapshot sh = snapshot_of("ellipse-shear", 0.05, 256, 48);
  DtCurvature dks = dt_curvature(sh);
  double scale = dks.via_normal_speed.values.cwiseAbs().maxCoeff();
  CHECK((dks.via_velocity_laplacian.values - dks.via_normal_speed.values)
            .cwiseAbs()
            .maxCoeff() < 1e-8 * scale);
}

TEST_CASE("dt_J vanishes where curvature stays constant") {
  FlowSnapshot exp = snapshot_of("expanding-circle", 0.0, 128, 40);
  VectorField2 dj = dt_J(exp);
  CHECK(l2_norm(dj) < 1e-8);

  FlowSnapshot rot = snapshot_of("rigid-rotation", 0.0, 128, 40);
  CHECK(l2_norm(dt_J(rot)) < 1e-8);
}

TEST_CASE("dt2_curvature closed forms") {
  // static circle: everything zero
  FlowSnapshot still = standard_family("stationary", 128).snapshot_at(0.0, 32, true);
  Dt2Curvature d2 = dt2_curvature(still);
  CHECK(d2.total.values.cwiseAbs().maxCoeff() < 1e-10);

  // acceleration field is required
  FlowSnapshot rot = snapshot_of("rigid-rotation", 0.0, 128, 32);
  CHECK_THROWS_AS(dt2_curvature(rot), std::invalid_argument);

  // rigid rotation with acceleration: circle shape is stationary, kappa frozen
  FlowSnapshot rota = standard_family("rigid-rotation", 128).snapshot_at(0.0, 32, true);
  Dt2Curvature d2r = dt2_curvature(rota);
  CHECK(d2r.total.values.cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("flow family consistency") {
  for (const char* name : {"ellipse-shear", "expanding-circle", "ellipse-swirl"}) {
    FlowFamily fam = standard_family(name, 128);
    CHECK(fam.consistency_residual(0.1, 1e-4) < 1e-6);
  }
}

TEST_CASE("stationary family: every formula and FD vanish") {
  FlowFamily fam = standard_family("stationary", 64);
  auto table = verify_kinematics(fam, 0.0, 1e-3, 24, 1e-5);
  for (const auto& row : table) {
    INFO(row.id);
    CHECK(row.residual < 1e-9);
  }
}

TEST_CASE("expanding circle: dt kappa FD hits the closed form") {
  FlowFamily fam = standard_family("expanding-circle", 64);
  FlowSnapshot snap = fam.snapshot_at(0.25, 24);
  // kappa(t) = 1/(1+t): D_t kappa = -1/(1+t)^2
  DtCurvature dk = dt_curvature(snap);
  double want = -1.0 / (1.25 * 1.25);
  CHECK((dk.via_normal_speed.values.array() - want).abs().maxCoeff() < 1e-8);
  auto table = verify_kinematics(fam, 0.25, 1e-3, 24, 1e-4);
  for (const auto& row : table) {
    INFO(row.id << " residual=" << row.residual << " order=" << row.observed_order);
    CHECK(row.pass);
  }
}

TEST_CASE("ellipse + shear: full formula table against the flow oracle") {
  FlowFamily fam = standard_family("ellipse-shear", 128);
  auto table = verify_kinematics(fam, 0.0, 1e-3, 40, 1e-5);
  CHECK(table.size() >= 8);
  for (const auto& row : table) {
    INFO(row.id << " residual=" << row.residual << " order=" << row.observed_order
                << " terminal=" << row.terminal_rel_err);
    CHECK(row.pass);
  }
}

TEST_CASE("ellipse + band-limited swirl: formula table") {
  FlowFamily fam = standard_family("ellipse-swirl", 128);
  auto table = verify_kinematics(fam, 0.0, 1e-3, 40, 1e-5);
  for (const auto& row : table) {
    INFO(row.id << " residual=" << row.residual << " order=" << row.observed_order);
    CHECK(row.pass);
  }
}
