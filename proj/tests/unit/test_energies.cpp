#include <doctest.h>

#include "capeuler/energies.hpp"

#include <cmath>

using namespace capeuler;

namespace {

DomainPtr unit_disk(int n = 128, int nr = 40) {
  return SpectralDomain::make_disk(make_star_curve({}, 1.0, n), nr);
}

VectorField2 zero_v(const DomainPtr& d) {
  return VectorField2(d->zero_field(), d->zero_field());
}

VectorField2 rigid_rotation(const DomainPtr& d, double omega0) {
  return sample_vector(d, [omega0](double x, double y) {
    return Eigen::Vector2d(-omega0 * y, omega0 * x);
  });
}

} // namespace

TEST_CASE("conserved energy closed forms") {
  auto d = unit_disk();
  CHECK(conserved_energy(d, zero_v(d), 1.0) == doctest::Approx(2.0 * M_PI).epsilon(1e-10));

  double om = 1.3;
  CHECK(conserved_energy(d, rigid_rotation(d, om), 0.0) ==
        doctest::Approx(M_PI * om * om / 4.0).epsilon(1e-10));

  auto a = SpectralDomain::make_annulus(
      AnnulusShape(make_star_curve({}, 1.0, 128), make_star_curve({}, 2.0, 128)), 40);
  double a1 = 0.6;
  VectorField2 rad = sample_vector(a, [a1](double x, double y) {
    double r2 = x * x + y * y;
    return Eigen::Vector2d(a1 * x / r2, a1 * y / r2);
  });
  CHECK(conserved_energy(a, rad, 0.0) ==
        doctest::Approx(M_PI * a1 * a1 * std::log(2.0)).epsilon(1e-10));
}

TEST_CASE("higher energy at the circular equilibrium") {
  auto d = unit_disk();
  EnergyReport rep = higher_energy(d, zero_v(d), 0.5);
  CHECK(rep.E_dtJ < 1e-10);
  CHECK(rep.E_eps < 1e-10);
  CHECK(rep.E_vort < 1e-10);
  CHECK(std::abs(rep.E_RT) < 1e-10);
  CHECK(rep.rt_margin == doctest::Approx(0.0));
  CHECK(std::isfinite(rep.mon_kappa_h2));
  CHECK(std::isfinite(rep.mon_v_h3));
}

TEST_CASE("higher energy for the rigid rotation") {
  auto d = unit_disk();
  double om = 0.8;
  EnergyReport rep = higher_energy(d, rigid_rotation(d, om), 0.0);
  // J = 0 on the disk: only the vorticity term survives
  CHECK(rep.E_dtJ < 1e-9);
  CHECK(rep.E_eps < 1e-12);
  CHECK(std::abs(rep.E_RT) < 1e-9);
  CHECK(rep.E_vort == doctest::Approx(4.0 * om * om * M_PI).epsilon(1e-8));
  // RT fails for rotation: margin = -omega^2
  CHECK(rep.rt_margin == doctest::Approx(-om * om).epsilon(1e-8));
}

TEST_CASE("rt margin closed forms") {
  auto d = unit_disk();
  CHECK(std::abs(rt_margin(d, zero_v(d))) < 1e-12);
  double om = 1.1;
  CHECK(rt_margin(d, rigid_rotation(d, om)) == doctest::Approx(-om * om).epsilon(1e-8));
}

TEST_CASE("E_eps follows the disk eigenrelation scaling") {
  // rho = 1 + a cos k theta gives, to leading order in a,
  //   Jperp = a k (k^2-1) cos k theta  and
  //   E_eps = eps^2/2 * pi a^2 k^4 (k^2-1)^2
  const double a = 1e-4, eps = 0.5;
  for (int k : {2, 4, 8}) {
    auto d = SpectralDomain::make_disk(make_star_curve({{k, a}}, 1.0, 256), 48);
    EnergyReport rep = higher_energy(d, zero_v(d), eps);
    double want = 0.5 * eps * eps * M_PI * a * a * std::pow(k, 4) *
                  std::pow(double(k) * k - 1.0, 2);
    CHECK(rep.E_eps == doctest::Approx(want).epsilon(0.1));
    CHECK(rep.E_eps > 0.0);
  }
}

TEST_CASE("E_RT computed two ways agrees") {
  // deformed drop with a swirl velocity: E_RT from the report vs the volume
  // pairing of R0 against the irrotational lift of Jperp
  auto d = SpectralDomain::make_disk(make_star_curve({{3, 0.02}}, 1.0, 128), 40);
  VectorField2 v = rigid_rotation(d, 0.6);
  EnergyReport rep = higher_energy(d, v, 0.3);

  VectorField2 J = curvature_force_J(d);
  NormalTrace jn = normal_trace(J);
  VectorField2 rj = op_R0(v, jn);
  BoundaryScalar pot = d->dn_inverse(jn.outer);
  auto [lx, ly] = d->gradient(d->harmonic_extension(pot));
  double quad = 0.5 * inner_product(rj, VectorField2(lx, ly));
  CHECK(rep.E_RT == doctest::Approx(quad).epsilon(1e-6));
}

TEST_CASE("monitor table") {
  auto d = unit_disk();
  EnergyReport rep = higher_energy(d, zero_v(d), 0.5);
  auto rows = energy_monitors(rep);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].name == "kappa_h2_over_E");
  for (const auto& r : rows) CHECK(std::isfinite(r.value));
}

TEST_CASE("linearized residual vanishes at equilibrium") {
  auto d = unit_disk();
  FlowSnapshot s{d, zero_v(d), std::nullopt};
  LinearizedResidual lr = linearized_residual(s, s, s, 1e-3, 1.0);
  CHECK(lr.residual_norm < 1e-8);
}
