#include "capeuler/energies.hpp"

#include <cmath>

namespace capeuler {

namespace {

double total_surface(const DomainPtr& d) {
  double s = d->outer_curve().arclength();
  if (d->is_annulus()) s += d->inner_curve().arclength();
  return s;
}

double boundary_l2sq(const StarCurve& c, const Vec& f) {
  return integrate_boundary(c, Vec(f.array().square().matrix()));
}

} // namespace

double conserved_energy(const DomainPtr& d, const VectorField2& v, double eps) {
  double kin = 0.5 * (d->inner_product(v.x, v.x) + d->inner_product(v.y, v.y));
  return kin + eps * eps * total_surface(d);
}

double rt_margin(const DomainPtr& d, const VectorField2& v) {
  (void)d;
  NormalTrace mg = rt_pressure_gradient(v);
  double m = mg.outer.values.minCoeff();
  if (mg.inner) m = std::min(m, mg.inner->values.minCoeff());
  return m;
}

EnergyReport higher_energy(const DomainPtr& d, const VectorField2& v, double eps) {
  EnergyReport rep;
  rep.E0 = conserved_energy(d, v, eps);
  rep.area = d->area();

  VectorField2 J = curvature_force_J(d);
  NormalTrace jn = normal_trace(J);

  FlowSnapshot snap{d, v, std::nullopt};
  VectorField2 cdj = covariant_dt_J(snap);
  rep.E_dtJ = 0.5 * inner_product(cdj, cdj);

  BoundaryScalar dsj_o = surface_derivative(d->outer_curve(), jn.outer);
  double eps_term = boundary_l2sq(d->outer_curve(), dsj_o.values);
  if (d->is_annulus()) {
    BoundaryScalar dsj_i = surface_derivative(d->inner_curve(), *jn.inner);
    eps_term += boundary_l2sq(d->inner_curve(), dsj_i.values);
  }
  rep.E_eps = 0.5 * eps * eps * eps_term;

  InteriorField om = vorticity(v);
  double om_h2 = d->hm_norm(om, 2);
  rep.E_vort = om_h2 * om_h2;

  rep.E_total = rep.E_dtJ + rep.E_eps + rep.E_vort;

  NormalTrace mg = rt_pressure_gradient(v);
  rep.rt_margin = mg.outer.values.minCoeff();
  double ert = integrate_boundary(
      d->outer_curve(),
      Vec(mg.outer.values.cwiseProduct(jn.outer.values.array().square().matrix())));
  if (d->is_annulus()) {
    rep.rt_margin = std::min(rep.rt_margin, mg.inner->values.minCoeff());
    ert += integrate_boundary(
        d->inner_curve(),
        Vec(mg.inner->values.cwiseProduct(jn.inner->values.array().square().matrix())));
  }
  rep.E_RT = 0.5 * ert;
  rep.rt_warning = rep.rt_margin < -1e-10;
  rep.script_E = rep.E_total + rep.E_RT;

  double kap2 = boundary_norm(d->outer_curve(),
                              BoundaryScalar(d->outer_geometry().kappa), 2.0);
  double kap1 = boundary_norm(d->outer_curve(),
                              BoundaryScalar(d->outer_geometry().kappa), 1.0);
  double kap2sq = kap2 * kap2, kap1sq = kap1 * kap1;
  rep.max_kappa = d->outer_geometry().kappa.cwiseAbs().maxCoeff();
  if (d->is_annulus()) {
    double k2i = boundary_norm(d->inner_curve(),
                               BoundaryScalar(d->inner_geometry().kappa), 2.0);
    double k1i = boundary_norm(d->inner_curve(),
                               BoundaryScalar(d->inner_geometry().kappa), 1.0);
    kap2sq += k2i * k2i;
    kap1sq += k1i * k1i;
    rep.max_kappa =
        std::max(rep.max_kappa, d->inner_geometry().kappa.cwiseAbs().maxCoeff());
  }
  double vh3 = d->hm_norm(v.x, 3), vh3y = d->hm_norm(v.y, 3);
  rep.mon_kappa_h2 = eps * eps * kap2sq / (3.0 * rep.E_total + eps * eps);
  rep.mon_v_h3 = (vh3 * vh3 + vh3y * vh3y) / (rep.E_total + rep.E0 + 1.0);
  rep.mon_kappa_h1 = (rep.rt_margin > 0.0) ? kap1sq / (rep.E_RT + 1.0) : 0.0;
  return rep;
}

std::vector<MonitorRow> energy_monitors(const EnergyReport& rep) {
  return {{"kappa_h2_over_E", rep.mon_kappa_h2},
          {"v_h3_over_E", rep.mon_v_h3},
          {"kappa_h1_over_ERT", rep.mon_kappa_h1}};
}

LinearizedResidual linearized_residual(const FlowSnapshot& prev,
                                       const FlowSnapshot& mid,
                                       const FlowSnapshot& next, double dt,
                                       double eps) {
  const DomainPtr& d = mid.domain;
  if (d->is_annulus())
    throw std::invalid_argument("linearized_residual: drop trajectories only");
  const StarCurve& curve = d->outer_curve();
  const GeometryReport& g = d->outer_geometry();
  const int n = d->n_theta();

  // covariant D_t J at the three times
  VectorField2 cdj_prev = covariant_dt_J(prev);
  VectorField2 cdj_mid = covariant_dt_J(mid);
  VectorField2 cdj_next = covariant_dt_J(next);

  // second-order particle positions from the Euler acceleration
  VectorField2 J = curvature_force_J(d);
  InteriorField pvv = pressure_bilinear(mid.v, mid.v);
  auto [px, py] = d->gradient(pvv);
  Vec ax = -d->trace_outer(px).values - eps * eps * d->trace_outer(J.x).values;
  Vec ay = -d->trace_outer(py).values - eps * eps * d->trace_outer(J.y).values;
  Vec vx0 = d->trace_outer(mid.v.x).values, vy0 = d->trace_outer(mid.v.y).values;
  Vec bx = curve.x(), by = curve.y();

  auto trace_spec = [](const VectorField2& f) {
    return std::make_pair(
        fourier::to_spectrum(Vec(f.x.values.row(0).transpose())),
        fourier::to_spectrum(Vec(f.y.values.row(0).transpose())));
  };
  auto [spx, spy] = trace_spec(cdj_next);
  auto [smx, smy] = trace_spec(cdj_prev);
  const Eigen::Vector2d c = curve.center();

  Vec fd_x(n), fd_y(n);
  for (int j = 0; j < n; ++j) {
    double xp = bx[j] + dt * vx0[j] + 0.5 * dt * dt * ax[j];
    double yp = by[j] + dt * vy0[j] + 0.5 * dt * dt * ay[j];
    double xm = bx[j] - dt * vx0[j] + 0.5 * dt * dt * ax[j];
    double ym = by[j] - dt * vy0[j] + 0.5 * dt * dt * ay[j];
    double thp = std::atan2(yp - c.y(), xp - c.x());
    double thm = std::atan2(ym - c.y(), xm - c.x());
    fd_x[j] = (fourier::eval(spx, thp) - fourier::eval(smx, thm)) / (2.0 * dt);
    fd_y[j] = (fourier::eval(spy, thp) - fourier::eval(smy, thm)) / (2.0 * dt);
  }

  // covariant correction grad p_{v, DtJ} at the middle time
  InteriorField pcorr = pressure_bilinear(mid.v, cdj_mid);
  auto [pcx, pcy] = d->gradient(pcorr);
  Vec ddx = fd_x + d->trace_outer(pcx).values;
  Vec ddy = fd_y + d->trace_outer(pcy).values;
  Vec dd_n = ddx.cwiseProduct(g.nx) + ddy.cwiseProduct(g.ny);

  NormalTrace jn = normal_trace(J);
  VectorField2 aj = op_A(jn, d);
  VectorField2 rj = op_R0(mid.v, jn);
  Vec aj_n = normal_trace(aj).outer.values;
  Vec rj_n = normal_trace(rj).outer.values;

  Vec total = dd_n + rj_n + eps * eps * aj_n;
  LinearizedResidual out;
  out.residual_norm = std::sqrt(boundary_l2sq(curve, total));
  out.leading_norm = eps * eps * std::sqrt(boundary_l2sq(curve, aj_n));
  out.ratio = out.residual_norm / std::max(out.leading_norm, 1e-300);
  return out;
}

} // namespace capeuler
