#include "capeuler/exact_solutions.hpp"

#include "capeuler/chebyshev.hpp"
#include "capeuler/kinematics.hpp"

#include <cmath>
#include <stdexcept>

namespace capeuler {

// ---------- rotating disk ----------

RotatingDiskSolution::RotatingDiskSolution(std::function<double(double)> angular_velocity,
                                           double support_lo, double support_hi)
    : theta_(std::move(angular_velocity)), lo_(support_lo), hi_(support_hi) {
  if (lo_ <= 0.0 || hi_ >= 1.0 || lo_ >= hi_)
    throw std::invalid_argument("Theta support must sit strictly inside (0,1)");
}

double RotatingDiskSolution::theta_profile(double r) const {
  if (r <= lo_ || r >= hi_) return 0.0;
  return theta_(r);
}

double RotatingDiskSolution::pressure(double r) const {
  // dp/dr = r Theta^2, p(1) = 0; integrate with composite Simpson on [r, 1]
  if (r >= hi_) return 0.0;
  double a = std::max(r, 0.0);
  const int n = 400;
  double h = (hi_ - a) / n;
  double acc = 0.0;
  auto f = [&](double rr) {
    double t = theta_profile(rr);
    return rr * t * t;
  };
  for (int i = 0; i < n; ++i) {
    double x0 = a + i * h, x1 = x0 + 0.5 * h, x2 = x0 + h;
    acc += h / 6.0 * (f(x0) + 4.0 * f(x1) + f(x2));
  }
  return -acc; // p decreasing toward the center, p(1) = 0
}

double RotatingDiskSolution::lagrangian_angle(double t, double r0, double th0) const {
  return th0 + t * theta_profile(r0);
}

RotatingDiskSolution::Report RotatingDiskSolution::verify(int n_theta, int n_r) const {
  DomainPtr d = SpectralDomain::make_disk(make_star_curve({}, 1.0, n_theta), n_r);
  VectorField2 v = sample_vector(d, [&](double x, double y) {
    double r = std::hypot(x, y);
    double om = theta_profile(r);
    return Eigen::Vector2d(-om * y, om * x);
  });
  Report rep;
  rep.div_residual = divergence_residual(v);

  // grad_v v + grad p with the quadrature pressure
  auto [vxx, vxy] = d->gradient(v.x);
  auto [vyx, vyy] = d->gradient(v.y);
  Mat advx = v.x.values.cwiseProduct(vxx.values) + v.y.values.cwiseProduct(vxy.values);
  Mat advy = v.x.values.cwiseProduct(vyx.values) + v.y.values.cwiseProduct(vyy.values);
  InteriorField gpx = d->sample([&](double x, double y) {
    double r = std::hypot(x, y);
    double t = theta_profile(r);
    return t * t * x; // p_r e_r = r Theta^2 e_r
  });
  InteriorField gpy = d->sample([&](double x, double y) {
    double r = std::hypot(x, y);
    double t = theta_profile(r);
    return t * t * y;
  });
  rep.euler_residual = std::max((advx + gpx.values).cwiseAbs().maxCoeff(),
                                (advy + gpy.values).cwiseAbs().maxCoeff());

  // the Lagrange-multiplier pressure solve reproduces the quadrature pressure
  InteriorField pvv = pressure_bilinear(v, v);
  InteriorField pq = d->sample([&](double x, double y) {
    return pressure(std::hypot(x, y));
  });
  rep.pressure_split = (pvv.values - pq.values).cwiseAbs().maxCoeff();

  // p - eps^2 kappa constant on the boundary (eps = 1, kappa = 1)
  Vec ptr = d->trace_outer(pq).values;
  Vec bc = ptr - d->outer_geometry().kappa;
  rep.boundary_const = bc.maxCoeff() - bc.minCoeff();

  FlowSnapshot snap{d, v, std::nullopt};
  DtCurvature dk = dt_curvature(snap);
  auto [dnx, dny] = dt_normal(snap);
  rep.stationary = std::max({dk.via_normal_speed.values.cwiseAbs().maxCoeff(),
                             dnx.cwiseAbs().maxCoeff(), dny.cwiseAbs().maxCoeff()});
  return rep;
}

// ---------- annulus ODE ----------

double AnnulusODEState::r1() const {
  double v = r10 * r10 + 2.0 * A;
  if (v <= 0.0) throw std::runtime_error("annulus collapsed: r1^2 <= 0");
  return std::sqrt(v);
}

double AnnulusODEState::r2() const { return std::sqrt(r20 * r20 + 2.0 * A); }

double AnnulusODEState::theta_at(double r) const {
  double r0sq = r * r - 2.0 * A;
  if (r0sq <= 0.0) return 0.0;
  double r0 = std::sqrt(r0sq);
  if (r0 < r10 - 1e-12 || r0 > r20 + 1e-12) return 0.0;
  return (r0sq / (r * r)) * theta0_fn(std::clamp(r0, r10, r20));
}

AnnulusODEState make_annulus_state(double r10, double r20, double a1_0,
                                   const std::function<double(double)>& theta0,
                                   int n_r0) {
  if (r10 <= 0.0 || r20 <= r10)
    throw std::invalid_argument("need 0 < r10 < r20");
  AnnulusODEState s;
  s.r10 = r10;
  s.r20 = r20;
  s.a1 = a1_0;
  Vec nodes01 = chebyshev::lobatto01(n_r0 - 1);
  s.r0_nodes = (r10 + (r20 - r10) * nodes01.array()).matrix();
  s.r0_weights = (r20 - r10) * chebyshev::quadrature_weights01(nodes01);
  s.theta0_profile.resize(n_r0);
  for (int i = 0; i < n_r0; ++i) s.theta0_profile[i] = theta0(s.r0_nodes[i]);
  s.theta1 = Vec::Zero(n_r0);
  s.theta0_fn = theta0;
  return s;
}

AnnulusRates annulus_ode_rhs(const AnnulusODEState& s, double eps) {
  AnnulusRates r;
  r.dA = s.a1;
  double r1 = s.r1(), r2 = s.r2();
  double lg = std::log(r2 / r1);
  // swirl integral int_{r1}^{r2} r Theta(t,r)^2 dr in the r0 variable
  double swirl = 0.0;
  for (int i = 0; i < s.r0_nodes.size(); ++i) {
    double r0 = s.r0_nodes[i];
    double den = r0 * r0 + 2.0 * s.A;
    double th = s.theta0_profile[i] * (r0 * r0 / den);
    swirl += s.r0_weights[i] * r0 * th * th;
  }
  double st = eps * eps * (1.0 / r2 + 1.0 / r1); // -(kappa2 - kappa1) with kappa1 = -1/r1
  r.da1 = (0.5 * s.a1 * s.a1 * (1.0 / (r1 * r1) - 1.0 / (r2 * r2)) + swirl - st) / lg;
  r.dtheta1.resize(s.r0_nodes.size());
  for (int i = 0; i < s.r0_nodes.size(); ++i) {
    double r0 = s.r0_nodes[i];
    r.dtheta1[i] = s.theta0_profile[i] * r0 * r0 / (r0 * r0 + 2.0 * s.A);
  }
  return r;
}

namespace {

AnnulusSample sample_state(const AnnulusODEState& s, double eps) {
  AnnulusSample out;
  out.t = s.t;
  out.A = s.A;
  out.a1 = s.a1;
  out.r1 = s.r1();
  out.r2 = s.r2();
  out.E0 = annulus_kinetic_energy(s) +
           eps * eps * 2.0 * M_PI * (out.r1 + out.r2);
  AnnulusRtSigns rt = annulus_rt_signs(s);
  out.pr_inner = rt.pr_inner;
  out.pr_outer = rt.pr_outer;
  out.rt_ok = rt.satisfied;
  return out;
}

} // namespace

AnnulusTrajectory annulus_integrate(const AnnulusODEState& initial, double t_final,
                                    double dt, double eps, int sample_every) {
  AnnulusTrajectory traj;
  AnnulusODEState s = initial;
  traj.samples.push_back(sample_state(s, eps));
  int step = 0;
  auto add = [&](const AnnulusODEState& base, const AnnulusRates& r, double h) {
    AnnulusODEState out = base;
    out.A += h * r.dA;
    out.a1 += h * r.da1;
    out.theta1 += h * r.dtheta1;
    return out;
  };
  while (s.t < t_final - 1e-14) {
    double h = std::min(dt, t_final - s.t);
    AnnulusRates k1 = annulus_ode_rhs(s, eps);
    AnnulusODEState s2 = add(s, k1, 0.5 * h);
    AnnulusRates k2 = annulus_ode_rhs(s2, eps);
    AnnulusODEState s3 = add(s, k2, 0.5 * h);
    AnnulusRates k3 = annulus_ode_rhs(s3, eps);
    AnnulusODEState s4 = add(s, k3, h);
    AnnulusRates k4 = annulus_ode_rhs(s4, eps);
    s.A += h / 6.0 * (k1.dA + 2.0 * k2.dA + 2.0 * k3.dA + k4.dA);
    s.a1 += h / 6.0 * (k1.da1 + 2.0 * k2.da1 + 2.0 * k3.da1 + k4.da1);
    s.theta1 +=
        h / 6.0 * (k1.dtheta1 + 2.0 * k2.dtheta1 + 2.0 * k3.dtheta1 + k4.dtheta1);
    s.t += h;
    if (s.r10 * s.r10 + 2.0 * s.A <= 1e-12)
      throw std::runtime_error("annulus collapse during integration");
    if (++step % sample_every == 0 || s.t >= t_final - 1e-14)
      traj.samples.push_back(sample_state(s, eps));
  }
  traj.final_state = s;
  return traj;
}

AnnulusRtSigns annulus_rt_signs(const AnnulusODEState& s) {
  double r1 = s.r1(), r2 = s.r2();
  double a2 = -annulus_ode_rhs(s, 0.0).da1;
  auto pr = [&](double r) {
    double th = s.theta_at(r);
    return s.a1 * s.a1 / (r * r * r) + r * th * th + a2 / r;
  };
  AnnulusRtSigns out;
  out.pr_inner = pr(r1);
  out.pr_outer = pr(r2);
  out.margin = std::min(out.pr_inner, -out.pr_outer);
  out.satisfied = out.pr_inner > 0.0 && out.pr_outer < 0.0;
  return out;
}

double annulus_radial_energy(const AnnulusODEState& s) {
  return M_PI * s.a1 * s.a1 * std::log(s.r2() / s.r1());
}

double annulus_kinetic_energy(const AnnulusODEState& s) {
  double swirl = 0.0;
  for (int i = 0; i < s.r0_nodes.size(); ++i) {
    double r0 = s.r0_nodes[i];
    double den = r0 * r0 + 2.0 * s.A;
    double t0 = s.theta0_profile[i];
    swirl += s.r0_weights[i] * (r0 * r0 * r0 * r0 * r0 / den) * t0 * t0;
  }
  return annulus_radial_energy(s) + M_PI * swirl;
}

} // namespace capeuler
