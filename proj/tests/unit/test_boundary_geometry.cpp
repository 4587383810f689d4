#include <doctest.h>

#include "capeuler/star_curve.hpp"
#include "oracles/oracles.hpp"

#include <cmath>

using namespace capeuler;

namespace {

double ellipse_rho(double a, double b, double th) {
  double c = std::cos(th), s = std::sin(th);
  return a * b / std::sqrt(b * b * c * c + a * a * s * s);
}

double ellipse_rho_prime(double a, double b, double th) {
  double D = b * b * std::cos(th) * std::cos(th) + a * a * std::sin(th) * std::sin(th);
  double Dp = (a * a - b * b) * std::sin(2.0 * th);
  return -0.5 * a * b * Dp / std::pow(D, 1.5);
}

} // namespace

TEST_CASE("make_star_curve basic cases") {
  StarCurve circle = make_star_curve({}, 1.0, 256);
  CHECK((circle.rho().array() - 1.0).abs().maxCoeff() < 1e-14);

  StarCurve pert = make_star_curve({{2, 0.1}}, 1.0, 256);
  Vec th = fourier::theta_grid(256);
  for (int j : {0, 17, 100})
    CHECK(pert.rho()[j] == doctest::Approx(1.0 + 0.1 * std::cos(2 * th[j])).epsilon(1e-13));
  CHECK(pert.resolved());

  CHECK_THROWS_WITH_AS(make_star_curve({{2, 1.5}}, 1.0, 256),
                       doctest::Contains("not star-shaped"), std::invalid_argument);
  CHECK_THROWS_AS(make_star_curve({}, 1.0, 200), std::invalid_argument);
  CHECK_THROWS_AS(make_star_curve({}, -1.0, 256), std::invalid_argument);
}

TEST_CASE("geometry on circle") {
  for (double R : {1.0, 2.5}) {
    StarCurve c = make_star_curve({}, R, 128);
    GeometryReport g = geometry(c);
    CHECK((g.kappa.array() - 1.0 / R).abs().maxCoeff() < 1e-12);
    CHECK((g.measure.array() - R).abs().maxCoeff() < 1e-12);
    CHECK(g.arclength == doctest::Approx(2.0 * M_PI * R).epsilon(1e-13));
  }
}

TEST_CASE("geometry report invariants") {
  StarCurve c = make_ellipse(1.3, 1.0, 256);
  GeometryReport g = geometry(c);
  for (int j = 0; j < c.n_theta(); ++j) {
    double nn = std::hypot(g.nx[j], g.ny[j]);
    CHECK(std::abs(nn - 1.0) < 1e-12);
    CHECK(std::abs(g.nx[j] * g.tx[j] + g.ny[j] * g.ty[j]) < 1e-12);
    CHECK(g.second_form[j] == g.kappa[j]);
  }
}

TEST_CASE("ellipse curvature matches the closed form") {
  const double a = 2.0, b = 1.0;
  StarCurve c = make_ellipse(a, b, 256);
  GeometryReport g = geometry(c);
  double worst = 0.0;
  for (int j = 0; j < c.n_theta(); ++j) {
    double t = oracles::ellipse_param_of_theta(a, b, c.theta()[j]);
    worst = std::max(worst, std::abs(g.kappa[j] - oracles::ellipse_curvature(a, b, t)));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("Gauss-Bonnet on assorted resolved curves") {
  std::vector<StarCurve> curves = {
      make_star_curve({}, 1.0, 128),
      make_star_curve({{2, 0.1}, {5, 0.02}}, 1.0, 256),
      make_ellipse(2.0, 1.0, 256),
  };
  for (const auto& c : curves) {
    GeometryReport g = geometry(c);
    double total = integrate_boundary(c, g.kappa);
    CHECK(std::abs(total - 2.0 * M_PI) < 1e-10);
  }
}

TEST_CASE("annulus shape validation") {
  StarCurve in = make_star_curve({}, 1.0, 128);
  StarCurve out = make_star_curve({}, 2.0, 128);
  CHECK_NOTHROW(AnnulusShape(in, out));
  StarCurve big_inner = make_star_curve({{2, 0.3}}, 1.8, 128);
  CHECK_THROWS_AS(AnnulusShape(big_inner, out), std::invalid_argument);
  // fluid-side inner geometry: circle of radius r1 has kappa = -1/r1
  GeometryReport gi = fluid_geometry(in, BoundaryTag::inner);
  CHECK((gi.kappa.array() + 1.0).abs().maxCoeff() < 1e-12);
  CHECK(gi.nx[0] == doctest::Approx(-1.0)); // points toward the center at theta=0
}

TEST_CASE("surface laplacian eigenfunctions and symmetry") {
  StarCurve c = make_star_curve({}, 2.0, 128);
  Vec th = c.theta();
  for (int k : {1, 3, 7}) {
    Vec fv(128);
    for (int j = 0; j < 128; ++j) fv[j] = std::cos(k * th[j]);
    BoundaryScalar lf = surface_laplacian(c, BoundaryScalar(fv));
    for (int j = 0; j < 128; ++j)
      CHECK(lf.values[j] ==
            doctest::Approx(-k * k / 4.0 * std::cos(k * th[j])).epsilon(1e-10));
  }
  BoundaryScalar cst(Vec::Constant(128, 3.7));
  CHECK(surface_laplacian(c, cst).values.cwiseAbs().maxCoeff() < 1e-12);

  // symmetry on an ellipse
  StarCurve e = make_ellipse(1.4, 1.0, 256);
  BoundaryScalar f(fourier::random_band_limited(256, 12, 7));
  BoundaryScalar g(fourier::random_band_limited(256, 12, 8));
  double lhs =
      integrate_boundary(e, Vec(g.values.cwiseProduct(surface_laplacian(e, f).values)));
  double rhs =
      integrate_boundary(e, Vec(f.values.cwiseProduct(surface_laplacian(e, g).values)));
  CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(lhs)));

  // negative semi-definite with constants as kernel
  double qf =
      integrate_boundary(e, Vec(f.values.cwiseProduct(surface_laplacian(e, f).values)));
  CHECK(qf < 0.0);
  CHECK_THROWS_AS(surface_laplacian(e, BoundaryScalar(Vec::Zero(64))),
                  std::invalid_argument);
}

TEST_CASE("surface laplacian against an arclength FD oracle") {
  const double a = 1.5, b = 1.0;
  StarCurve c = make_ellipse(a, b, 256);
  Vec fv(256);
  for (int j = 0; j < 256; ++j) fv[j] = std::cos(2.0 * c.theta()[j]);
  BoundaryScalar lf = surface_laplacian(c, BoundaryScalar(fv));

  auto f_of_t = [](double t) { return std::cos(2.0 * t); };
  auto speed = [&](double t) {
    return std::hypot(ellipse_rho(a, b, t), ellipse_rho_prime(a, b, t));
  };
  for (int j : {3, 50, 120, 200}) {
    double want = oracles::arclength_fd_laplacian(f_of_t, speed, c.theta()[j]);
    CHECK(std::abs(lf.values[j] - want) < 1e-6);
  }
}

TEST_CASE("boundary integration") {
  StarCurve c = make_star_curve({}, 1.7, 128);
  CHECK(integrate_boundary(c, Vec(Vec::Ones(128))) ==
        doctest::Approx(2.0 * M_PI * 1.7).epsilon(1e-13));
  for (int k : {1, 4, 9}) {
    Vec f(128);
    for (int j = 0; j < 128; ++j) f[j] = std::cos(k * c.theta()[j]);
    CHECK(std::abs(integrate_boundary(c, f)) < 1e-13);
  }
  // ellipse perimeter vs adaptive quadrature
  StarCurve e = make_ellipse(2.0, 1.0, 256);
  double per = oracles::adaptive_simpson(
      [](double t) { return std::hypot(2.0 * std::sin(t), std::cos(t)); }, 0.0,
      2.0 * M_PI);
  CHECK(std::abs(e.arclength() - per) < 1e-10);
}

TEST_CASE("boundary Sobolev norms") {
  StarCurve c = make_star_curve({}, 1.0, 128);
  Vec th = c.theta();
  for (int k : {1, 3, 8}) {
    for (double r : {-1.5, 0.0, 1.0, 2.0}) {
      Vec f(128);
      for (int j = 0; j < 128; ++j) f[j] = std::cos(k * th[j]);
      double got = boundary_norm(c, BoundaryScalar(f), r);
      double want = std::sqrt(M_PI * std::pow(1.0 + k * k, r));
      CHECK(got == doctest::Approx(want).epsilon(1e-10));
    }
  }
  CHECK(boundary_norm(c, BoundaryScalar(Vec::Zero(128)), 1.5) == 0.0);
  CHECK_THROWS_AS(boundary_norm(c, BoundaryScalar(Vec::Zero(128)), 5.0),
                  std::invalid_argument);

  // duality |oint f g dS| <= |f|_{H^1} |g|_{H^-1} on an ellipse
  StarCurve e = make_ellipse(1.5, 1.0, 256);
  for (unsigned seed : {1u, 2u, 3u, 4u, 5u}) {
    BoundaryScalar f(fourier::random_band_limited(256, 20, seed));
    BoundaryScalar g(fourier::random_band_limited(256, 20, seed + 100));
    double pairing =
        std::abs(integrate_boundary(e, Vec(f.values.cwiseProduct(g.values))));
    double bound = boundary_norm(e, f, 1.0) * boundary_norm(e, g, -1.0);
    CHECK(pairing <= bound * (1.0 + 1e-10));
  }
}

TEST_CASE("parametrization invariance under grid rotation") {
  StarCurve c = make_star_curve({{3, 0.05}, {5, 0.02}}, 1.0, 128);
  const int shift = 9;
  StarCurve cr = c.rotated(2.0 * M_PI * shift / 128);
  GeometryReport g = geometry(c), gr = geometry(cr);
  for (int j = 0; j < 128; ++j) {
    int js = (j + shift) % 128;
    CHECK(std::abs(gr.kappa[j] - g.kappa[js]) < 1e-11);
    CHECK(std::abs(gr.measure[j] - g.measure[js]) < 1e-11);
  }
  BoundaryScalar f(fourier::random_band_limited(128, 10, 3));
  Vec fr(128);
  for (int j = 0; j < 128; ++j) fr[j] = f.values[(j + shift) % 128];
  CHECK(std::abs(integrate_boundary(c, f) -
                 integrate_boundary(cr, BoundaryScalar(fr))) < 1e-12);
  CHECK(std::abs(boundary_norm(c, f, 1.5) -
                 boundary_norm(cr, BoundaryScalar(fr), 1.5)) < 1e-11);
}

TEST_CASE("curvature converges spectrally in n_theta") {
  const double a = 3.0, b = 1.0;
  auto kappa_error = [&](int n) {
    StarCurve c = make_ellipse(a, b, n);
    GeometryReport g = geometry(c);
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
      double t = oracles::ellipse_param_of_theta(a, b, c.theta()[j]);
      worst = std::max(worst, std::abs(g.kappa[j] - oracles::ellipse_curvature(a, b, t)));
    }
    return worst;
  };
  double e64 = kappa_error(64), e128 = kappa_error(128), e256 = kappa_error(256);
  CHECK(e128 < std::max(1e-2 * e64, 1e-11));
  CHECK(e256 < std::max(1e-2 * e64, 1e-11));
  CHECK(e64 > 1e-9); // underresolved level really is worse
}

TEST_CASE("resolution flag") {
  StarCurve smooth = make_star_curve({{2, 0.1}}, 1.0, 64);
  CHECK(smooth.resolved());
  StarCurve rough = make_star_curve({{30, 0.05}}, 1.0, 64);
  CHECK_FALSE(rough.resolved());
}
