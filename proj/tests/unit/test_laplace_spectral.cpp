#include <doctest.h>

#include "capeuler/spectral_domain.hpp"
#include "oracles/oracles.hpp"

#include <cmath>

using namespace capeuler;

namespace {

DomainPtr unit_disk(int n = 256, int nr = 64) {
  return SpectralDomain::make_disk(make_star_curve({}, 1.0, n), nr);
}

DomainPtr annulus12(int n = 128, int nr = 48) {
  return SpectralDomain::make_annulus(
      AnnulusShape(make_star_curve({}, 1.0, n), make_star_curve({}, 2.0, n)), nr);
}

Vec cos_k(const Vec& th, int k) {
  Vec f(th.size());
  for (int j = 0; j < th.size(); ++j) f[j] = std::cos(k * th[j]);
  return f;
}

} // namespace

TEST_CASE("harmonic extension on the disk") {
  auto d = unit_disk();
  Vec th = d->theta();
  for (int k : {1, 3, 8}) {
    InteriorField u = d->harmonic_extension(BoundaryScalar(cos_k(th, k)));
    // exact extension is r^k cos k theta
    Mat want(d->n_r(), d->n_theta());
    for (int j = 0; j < d->n_theta(); ++j)
      for (int i = 0; i < d->n_r(); ++i)
        want(i, j) = std::pow(d->map_radius()(i, j), k) * std::cos(k * th[j]);
    CHECK((u.values - want).cwiseAbs().maxCoeff() < 1e-11);
    // interpolated value at r = 1/2
    CHECK(d->eval_field(u, 0.5, 0.0) == doctest::Approx(std::pow(0.5, k)).epsilon(1e-10));
    // trace equals the data
    CHECK((d->trace_outer(u).values - cos_k(th, k)).cwiseAbs().maxCoeff() < 1e-12);
  }
  InteriorField c = d->harmonic_extension(BoundaryScalar(Vec::Constant(256, 2.5)));
  CHECK((c.values.array() - 2.5).abs().maxCoeff() < 1e-11);
}

TEST_CASE("harmonic extension on the annulus") {
  auto a = annulus12();
  InteriorField u = a->harmonic_extension2(BoundaryScalar(Vec::Ones(128), BoundaryTag::outer),
                                           BoundaryScalar(Vec::Zero(128), BoundaryTag::inner));
  Mat want = (a->map_radius().array().log() / std::log(2.0)).matrix();
  CHECK((u.values - want).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("poisson with zero Dirichlet data") {
  auto d = unit_disk(128, 48);
  InteriorField g = d->constant_field(4.0);
  InteriorField u = d->poisson_zero_dirichlet(g);
  Mat want = (d->map_radius().array().square() - 1.0).matrix();
  CHECK((u.values - want).cwiseAbs().maxCoeff() < 1e-11);

  InteriorField z = d->poisson_zero_dirichlet(d->zero_field());
  CHECK(z.values.cwiseAbs().maxCoeff() == 0.0);

  // annulus vs independent radial BVP oracle
  auto a = annulus12();
  InteriorField ua = a->poisson_zero_dirichlet(a->constant_field(1.0));
  auto g1 = [](double) { return 1.0; };
  for (double r : {1.2, 1.5, 1.8}) {
    double want_r = oracles::radial_poisson_bvp(g1, 1.0, 2.0, r);
    CHECK(a->eval_field(ua, r, 0.0) == doctest::Approx(want_r).epsilon(1e-8));
  }

  // self-adjointness <invLap g, h> = <g, invLap h>
  auto e = SpectralDomain::make_disk(make_ellipse(1.2, 1.0, 128), 40);
  InteriorField gg = e->sample([](double x, double y) { return x * x - y; });
  InteriorField hh = e->sample([](double x, double y) { return std::sin(x) + y * y; });
  double lhs = e->inner_product(e->poisson_zero_dirichlet(gg), hh);
  double rhs = e->inner_product(gg, e->poisson_zero_dirichlet(hh));
  CHECK(std::abs(lhs - rhs) < 1e-8 * std::max(std::abs(lhs), 1.0));
}

TEST_CASE("dirichlet-neumann eigenrelation on the disk") {
  auto d = unit_disk();
  Vec th = d->theta();
  for (int k : {1, 2, 5, 16, 64}) {
    BoundaryScalar nf = d->dirichlet_neumann(BoundaryScalar(cos_k(th, k)));
    CHECK((nf.values - k * cos_k(th, k)).cwiseAbs().maxCoeff() / k < 1e-9);
  }
  BoundaryScalar nz = d->dirichlet_neumann(BoundaryScalar(Vec::Constant(256, 1.0)));
  CHECK(nz.values.cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("dirichlet-neumann on the annulus matches the Laurent solve") {
  auto a = annulus12();
  Vec th = a->theta();
  // u = (c1 r + c2 / r) cos theta with u(2)=cos, u(1)=0
  Eigen::Matrix2d M;
  M << 2.0, 0.5, 1.0, 1.0;
  Eigen::Vector2d rhs(1.0, 0.0);
  Eigen::Vector2d c = M.partialPivLu().solve(rhs);
  auto [no, ni] = a->dirichlet_neumann2(BoundaryScalar(cos_k(th, 1), BoundaryTag::outer),
                                        BoundaryScalar(Vec::Zero(128), BoundaryTag::inner));
  Vec want_out = (c[0] - c[1] / 4.0) * cos_k(th, 1);
  CHECK((no.values - want_out).cwiseAbs().maxCoeff() < 1e-8);
  // inner fluid-outward normal is -e_r
  Vec want_in = -(c[0] - c[1]) * cos_k(th, 1);
  CHECK((ni.values - want_in).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("dn gauss law, symmetry, and energy identity") {
  auto e = SpectralDomain::make_disk(make_ellipse(1.2, 1.0, 128), 40);
  const StarCurve& curve = e->outer_curve();
  BoundaryScalar f(fourier::random_band_limited(128, 10, 11));
  BoundaryScalar g(fourier::random_band_limited(128, 10, 12));
  BoundaryScalar nf = e->dirichlet_neumann(f);
  BoundaryScalar ng = e->dirichlet_neumann(g);
  CHECK(std::abs(integrate_boundary(curve, nf)) < 1e-9);
  double pair_fg = integrate_boundary(curve, Vec(f.values.cwiseProduct(ng.values)));
  double pair_gf = integrate_boundary(curve, Vec(g.values.cwiseProduct(nf.values)));
  CHECK(std::abs(pair_fg - pair_gf) < 1e-9 * std::max(1.0, std::abs(pair_fg)));

  InteriorField uf = e->harmonic_extension(f);
  auto [gx, gy] = e->gradient(uf);
  double dirichlet_energy =
      e->inner_product(gx, gx) + e->inner_product(gy, gy);
  double pairing = integrate_boundary(curve, Vec(f.values.cwiseProduct(nf.values)));
  CHECK(std::abs(pairing - dirichlet_energy) < 1e-8 * std::abs(pairing));
  CHECK(pairing > 0.0);
}

TEST_CASE("dn_inverse") {
  auto d = unit_disk(128, 48);
  Vec th = d->theta();
  for (int k : {1, 4, 9}) {
    BoundaryScalar g((k * cos_k(th, k)).eval());
    BoundaryScalar phi = d->dn_inverse(g);
    CHECK((phi.values - cos_k(th, k)).cwiseAbs().maxCoeff() < 1e-9);
  }
  CHECK_THROWS_WITH_AS(d->dn_inverse(BoundaryScalar(Vec::Ones(128))),
                       doctest::Contains("not in the range"), std::invalid_argument);

  // ellipse round trip on random zero-mean band-limited data
  auto e = SpectralDomain::make_disk(make_ellipse(1.3, 1.0, 128), 40);
  Vec raw = fourier::random_band_limited(128, 8, 21);
  BoundaryScalar g0(raw);
  BoundaryScalar ng = e->dirichlet_neumann(g0);
  BoundaryScalar back = e->dn_inverse(ng);
  // compare up to the zero-mean gauge
  double c0 = integrate_boundary(e->outer_curve(), g0) / e->outer_curve().arclength();
  Vec want = (g0.values.array() - c0).matrix();
  CHECK((back.values - want).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("deltaN theorem: sqrt(-Lap) - N stays bounded while each grows") {
  auto e = SpectralDomain::make_disk(make_ellipse(1.2, 1.0, 256), 64);
  const StarCurve& curve = e->outer_curve();
  Vec th = e->theta();
  std::vector<double> ratio;
  double prev_norm = 0.0;
  for (int k : {2, 4, 8, 16, 32, 64}) {
    BoundaryScalar f(cos_k(th, k));
    BoundaryScalar nf = e->dirichlet_neumann(f);
    BoundaryScalar sf = sqrt_minus_laplacian(curve, f);
    Vec diff = sf.values - nf.values;
    double dnorm = std::sqrt(integrate_boundary(curve, Vec(diff.array().square().matrix())));
    double nnorm = std::sqrt(integrate_boundary(curve, Vec(nf.values.array().square().matrix())));
    ratio.push_back(dnorm / nnorm);
    CHECK(nnorm > prev_norm); // each term alone grows with k
    prev_norm = nnorm;
  }
  for (size_t i = 1; i < ratio.size(); ++i) CHECK(ratio[i] < ratio[i - 1] * 1.05);
  CHECK(ratio.back() < 0.05);

  // on the circle the difference vanishes to solver tolerance
  auto d = unit_disk(128, 48);
  BoundaryScalar f(cos_k(d->theta(), 7));
  Vec diff = sqrt_minus_laplacian(d->outer_curve(), f).values -
             d->dirichlet_neumann(f).values;
  CHECK(diff.cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("solver rejects mismatched inputs") {
  auto d = unit_disk(128, 32);
  CHECK_THROWS_AS(d->harmonic_extension(BoundaryScalar(Vec::Zero(64))),
                  std::invalid_argument);
  auto d2 = unit_disk(128, 32);
  InteriorField f = d2->constant_field(1.0);
  CHECK_THROWS_AS(d->poisson_zero_dirichlet(f), std::invalid_argument);
}
