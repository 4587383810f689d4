#include "capeuler/kinematics.hpp"

#include <cmath>
#include <stdexcept>

namespace capeuler {

namespace {

// boundary traces of v and its derivatives that the evaluators share
struct Frame {
  GeometryReport geom;
  Vec vx, vy, vn, vt;
  Vec gT_x, gT_y; // (Dv)T components
  Vec gN_x, gN_y; // (Dv)N components
  Vec gN, gT, hN, gNT; // N.(Dv)T, T.(Dv)T, N.(Dv)N, T.(Dv)N
  Vec lap_vx, lap_vy;  // interior vector Laplacian traces
  Vec ss_vx, ss_vy;    // arclength second derivatives of the traces
  Vec httN;            // D^2 v (T,T) . N
  Vec dskappa;
};

Frame make_frame(const FlowSnapshot& snap, BoundaryTag tag = BoundaryTag::outer) {
  const DomainPtr& d = snap.domain;
  const bool inner = (tag == BoundaryTag::inner);
  const StarCurve& curve = inner ? d->inner_curve() : d->outer_curve();
  auto trace = [&](const InteriorField& u) {
    return inner ? d->trace_inner(u).values : d->trace_outer(u).values;
  };
  Frame f;
  f.geom = inner ? d->inner_geometry() : d->outer_geometry();
  f.vx = trace(snap.v.x);
  f.vy = trace(snap.v.y);
  f.vn = f.vx.cwiseProduct(f.geom.nx) + f.vy.cwiseProduct(f.geom.ny);
  f.vt = f.vx.cwiseProduct(f.geom.tx) + f.vy.cwiseProduct(f.geom.ty);

  auto [vxx, vxy] = d->gradient(snap.v.x);
  auto [vyx, vyy] = d->gradient(snap.v.y);
  Vec vxx0 = trace(vxx), vxy0 = trace(vxy);
  Vec vyx0 = trace(vyx), vyy0 = trace(vyy);
  f.gT_x = vxx0.cwiseProduct(f.geom.tx) + vxy0.cwiseProduct(f.geom.ty);
  f.gT_y = vyx0.cwiseProduct(f.geom.tx) + vyy0.cwiseProduct(f.geom.ty);
  f.gN_x = vxx0.cwiseProduct(f.geom.nx) + vxy0.cwiseProduct(f.geom.ny);
  f.gN_y = vyx0.cwiseProduct(f.geom.nx) + vyy0.cwiseProduct(f.geom.ny);
  f.gN = f.gT_x.cwiseProduct(f.geom.nx) + f.gT_y.cwiseProduct(f.geom.ny);
  f.gT = f.gT_x.cwiseProduct(f.geom.tx) + f.gT_y.cwiseProduct(f.geom.ty);
  f.hN = f.gN_x.cwiseProduct(f.geom.nx) + f.gN_y.cwiseProduct(f.geom.ny);
  f.gNT = f.gN_x.cwiseProduct(f.geom.tx) + f.gN_y.cwiseProduct(f.geom.ty);

  f.lap_vx = trace(d->laplacian(snap.v.x));
  f.lap_vy = trace(d->laplacian(snap.v.y));
  f.ss_vx = surface_laplacian(curve, BoundaryScalar(f.vx)).values;
  f.ss_vy = surface_laplacian(curve, BoundaryScalar(f.vy)).values;

  // Hessians of the components contracted with T twice
  auto [vxxx, vxxy] = d->gradient(vxx);
  auto [vxyx_unused, vxyy] = d->gradient(vxy);
  (void)vxyx_unused;
  auto [vyxx, vyxy] = d->gradient(vyx);
  auto [vyyx_unused, vyyy] = d->gradient(vyy);
  (void)vyyx_unused;
  auto tt = [&](const InteriorField& axx, const InteriorField& axy,
                const InteriorField& ayy) {
    Vec a = trace(axx), b = trace(axy), c = trace(ayy);
    return Vec(a.cwiseProduct(f.geom.tx.cwiseProduct(f.geom.tx)) +
               2.0 * b.cwiseProduct(f.geom.tx.cwiseProduct(f.geom.ty)) +
               c.cwiseProduct(f.geom.ty.cwiseProduct(f.geom.ty)));
  };
  Vec htt_x = tt(vxxx, vxxy, vxyy);
  Vec htt_y = tt(vyxx, vyxy, vyyy);
  f.httN = htt_x.cwiseProduct(f.geom.nx) + htt_y.cwiseProduct(f.geom.ny);

  f.dskappa = surface_derivative(curve, BoundaryScalar(f.geom.kappa)).values;
  return f;
}

// 2 Dv . D^2 f + grad f . Lap v with f given by its gradient field
InteriorField commutator_bulk_rhs(const FlowSnapshot& snap, const VectorField2& gradf) {
  const DomainPtr& d = snap.domain;
  auto [fxx, fxy] = d->gradient(gradf.x);
  auto [fyx, fyy] = d->gradient(gradf.y);
  auto [vxx, vxy] = d->gradient(snap.v.x);
  auto [vyx, vyy] = d->gradient(snap.v.y);
  Mat term = 2.0 * (vxx.values.cwiseProduct(fxx.values) +
                    vxy.values.cwiseProduct(fxy.values) +
                    vyx.values.cwiseProduct(fyx.values) +
                    vyy.values.cwiseProduct(fyy.values));
  InteriorField lvx = d->laplacian(snap.v.x);
  InteriorField lvy = d->laplacian(snap.v.y);
  term += gradf.x.values.cwiseProduct(lvx.values) +
          gradf.y.values.cwiseProduct(lvy.values);
  return InteriorField(snap.v.x.domain, std::move(term));
}

} // namespace

// ---------- instantaneous evaluators ----------

std::pair<Vec, Vec> dt_normal(const FlowSnapshot& snap) {
  Frame f = make_frame(snap);
  return {Vec(-f.gN.cwiseProduct(f.geom.tx)), Vec(-f.gN.cwiseProduct(f.geom.ty))};
}

BoundaryScalar dt_surface_measure(const FlowSnapshot& snap) {
  Frame f = make_frame(snap);
  const StarCurve& curve = snap.domain->outer_curve();
  Vec dsvt = surface_derivative(curve, BoundaryScalar(f.vt)).values;
  return BoundaryScalar(Vec(f.vn.cwiseProduct(f.geom.kappa) + dsvt));
}

namespace {

DtCurvature dt_curvature_on(const FlowSnapshot& snap, BoundaryTag tag) {
  Frame f = make_frame(snap, tag);
  const StarCurve& curve = (tag == BoundaryTag::inner) ? snap.domain->inner_curve()
                                                       : snap.domain->outer_curve();
  DtCurvature out;
  Vec k1 = -(f.ss_vx.cwiseProduct(f.geom.nx) + f.ss_vy.cwiseProduct(f.geom.ny)) -
           2.0 * f.geom.kappa.cwiseProduct(f.gT);
  out.via_velocity_laplacian = BoundaryScalar(k1, tag);
  Vec lap_vn = surface_laplacian(curve, BoundaryScalar(f.vn)).values;
  Vec k2 = -lap_vn - f.vn.cwiseProduct(f.geom.kappa.array().square().matrix()) +
           f.dskappa.cwiseProduct(f.vt);
  out.via_normal_speed = BoundaryScalar(k2, tag);
  return out;
}

} // namespace

DtCurvature dt_curvature(const FlowSnapshot& snap) {
  return dt_curvature_on(snap, BoundaryTag::outer);
}

Dt2Curvature dt2_curvature(const FlowSnapshot& snap) {
  if (!snap.dt_v)
    throw std::invalid_argument("dt2_curvature needs the acceleration field");
  Frame f = make_frame(snap);
  const DomainPtr& d = snap.domain;
  const StarCurve& curve = d->outer_curve();

  Vec ax = d->trace_outer(snap.dt_v->x).values;
  Vec ay = d->trace_outer(snap.dt_v->y).values;
  Vec ss_ax = surface_laplacian(curve, BoundaryScalar(ax)).values;
  Vec ss_ay = surface_laplacian(curve, BoundaryScalar(ay)).values;
  Vec leading = -(ss_ax.cwiseProduct(f.geom.nx) + ss_ay.cwiseProduct(f.geom.ny));

  auto [axx, axy] = d->gradient(snap.dt_v->x);
  auto [ayx, ayy] = d->gradient(snap.dt_v->y);
  Vec axx0 = d->trace_outer(axx).values, axy0 = d->trace_outer(axy).values;
  Vec ayx0 = d->trace_outer(ayx).values, ayy0 = d->trace_outer(ayy).values;
  Vec aT_x = axx0.cwiseProduct(f.geom.tx) + axy0.cwiseProduct(f.geom.ty);
  Vec aT_y = ayx0.cwiseProduct(f.geom.tx) + ayy0.cwiseProduct(f.geom.ty);
  Vec aT = aT_x.cwiseProduct(f.geom.tx) + aT_y.cwiseProduct(f.geom.ty);

  Vec ssvT = f.ss_vx.cwiseProduct(f.geom.tx) + f.ss_vy.cwiseProduct(f.geom.ty);
  Vec dsgN = surface_derivative(curve, BoundaryScalar(f.gN)).values;

  Vec rem = 2.0 * f.httN.cwiseProduct(f.gT) -
            2.0 * f.hN.cwiseProduct(f.geom.kappa).cwiseProduct(f.gT) +
            ssvT.cwiseProduct(f.gN) -
            f.geom.kappa.cwiseProduct(f.gN.array().square().matrix()) -
            2.0 * f.geom.kappa.cwiseProduct(aT) + ssvT.cwiseProduct(f.gN) +
            2.0 * (dsgN + f.geom.kappa.cwiseProduct(f.gT)).cwiseProduct(f.gT) +
            2.0 * f.geom.kappa.cwiseProduct(
                      (f.gT.array().square() + f.gN.array() * f.gNT.array()).matrix());

  Dt2Curvature out;
  out.leading = BoundaryScalar(leading);
  out.remainder = BoundaryScalar(rem);
  out.total = BoundaryScalar(Vec(leading + rem));
  return out;
}

VectorField2 dt_J(const FlowSnapshot& snap) {
  const DomainPtr& d = snap.domain;
  VectorField2 J = curvature_force_J(d);
  InteriorField h;
  if (d->is_annulus()) {
    DtCurvature dko = dt_curvature_on(snap, BoundaryTag::outer);
    DtCurvature dki = dt_curvature_on(snap, BoundaryTag::inner);
    h = d->harmonic_extension2(dko.via_normal_speed, dki.via_normal_speed);
  } else {
    h = d->harmonic_extension(dt_curvature(snap).via_normal_speed);
  }
  auto [hx, hy] = d->gradient(h);
  InteriorField bulk = commutator_bulk_rhs(snap, J);
  InteriorField corr = d->poisson_zero_dirichlet(bulk);
  auto [cx, cy] = d->gradient(corr);

  auto [vxx, vxy] = d->gradient(snap.v.x);
  auto [vyx, vyy] = d->gradient(snap.v.y);
  // (Dv)^* J components: x: dx v^x Jx + dx v^y Jy ; y: dy v^x Jx + dy v^y Jy
  Mat dvsx = vxx.values.cwiseProduct(J.x.values) + vyx.values.cwiseProduct(J.y.values);
  Mat dvsy = vxy.values.cwiseProduct(J.x.values) + vyy.values.cwiseProduct(J.y.values);

  return VectorField2(
      InteriorField(snap.v.x.domain, hx.values + cx.values - dvsx),
      InteriorField(snap.v.x.domain, hy.values + cy.values - dvsy));
}

VectorField2 covariant_dt_J(const FlowSnapshot& snap) {
  VectorField2 dj = dt_J(snap);
  VectorField2 J = curvature_force_J(snap.domain);
  InteriorField p = pressure_bilinear(snap.v, J);
  auto [px, py] = snap.domain->gradient(p);
  return VectorField2(InteriorField(dj.x.domain, dj.x.values + px.values),
                      InteriorField(dj.x.domain, dj.y.values + py.values));
}

BoundaryScalar commutator_dn(const FlowSnapshot& snap, const BoundaryScalar& f) {
  const DomainPtr& d = snap.domain;
  Frame fr = make_frame(snap);
  InteriorField fh = d->harmonic_extension(f);
  auto grad_fh = d->gradient(fh);
  VectorField2 gf(grad_fh.first, grad_fh.second);
  InteriorField bulk = commutator_bulk_rhs(snap, gf);
  InteriorField corr = d->poisson_zero_dirichlet(bulk);
  Vec t1 = d->normal_derivative(corr, BoundaryTag::outer).values;
  Vec fx0 = d->trace_outer(gf.x).values, fy0 = d->trace_outer(gf.y).values;
  Vec t2 = fx0.cwiseProduct(fr.gN_x) + fy0.cwiseProduct(fr.gN_y);
  Vec dsf = surface_derivative(d->outer_curve(), f).values;
  Vec t3 = dsf.cwiseProduct(fr.gN);
  return BoundaryScalar(Vec(t1 - t2 - t3));
}

BoundaryScalar commutator_surface_laplacian(const FlowSnapshot& snap,
                                            const BoundaryScalar& f) {
  const DomainPtr& d = snap.domain;
  Frame fr = make_frame(snap);
  const StarCurve& curve = d->outer_curve();
  Vec ssf = surface_laplacian(curve, f).values;
  Vec dsf = surface_derivative(curve, f).values;
  Vec ssvT = fr.ss_vx.cwiseProduct(fr.geom.tx) + fr.ss_vy.cwiseProduct(fr.geom.ty);
  Vec out = -2.0 * fr.gT.cwiseProduct(ssf) - dsf.cwiseProduct(ssvT) +
            fr.geom.kappa.cwiseProduct(dsf).cwiseProduct(fr.gN);
  return BoundaryScalar(out);
}

InteriorField commutator_harmonic(const FlowSnapshot& snap, const BoundaryScalar& f) {
  const DomainPtr& d = snap.domain;
  InteriorField fh = d->harmonic_extension(f);
  auto grad_fh = d->gradient(fh);
  VectorField2 gf(grad_fh.first, grad_fh.second);
  return d->poisson_zero_dirichlet(commutator_bulk_rhs(snap, gf));
}

InteriorField commutator_inverse_laplacian(const FlowSnapshot& snap,
                                           const InteriorField& g) {
  const DomainPtr& d = snap.domain;
  InteriorField phi = d->poisson_zero_dirichlet(g);
  auto grad_phi = d->gradient(phi);
  VectorField2 gp(grad_phi.first, grad_phi.second);
  return d->poisson_zero_dirichlet(commutator_bulk_rhs(snap, gp));
}

// ---------- flow families ----------

FlowFamily::FlowFamily(StarCurve initial, VelocityClosure v, double t0)
    : initial_(std::move(initial)), v_(std::move(v)), t0_(t0) {}

namespace {

Vec shape_rhs(const StarCurve& c, const VelocityClosure& vel, double t) {
  GeometryReport g = geometry(c);
  const Vec& th = c.theta();
  const Vec& rho = c.rho();
  Vec out(c.n_theta());
  for (int j = 0; j < c.n_theta(); ++j) {
    double x = c.center().x() + rho[j] * std::cos(th[j]);
    double y = c.center().y() + rho[j] * std::sin(th[j]);
    Eigen::Vector2d v = vel(t, x, y);
    double vn = v.x() * g.nx[j] + v.y() * g.ny[j];
    out[j] = vn * g.measure[j] / rho[j];
  }
  return out;
}

StarCurve advance_shape(const StarCurve& c, const VelocityClosure& vel, double t,
                        double dt, int n_steps) {
  Vec rho = c.rho();
  double tt = t;
  double h = dt / n_steps;
  for (int s = 0; s < n_steps; ++s) {
    StarCurve c1(c.center(), fourier::to_spectrum(rho));
    Vec k1 = shape_rhs(c1, vel, tt);
    StarCurve c2(c.center(), fourier::to_spectrum(Vec(rho + 0.5 * h * k1)));
    Vec k2 = shape_rhs(c2, vel, tt + 0.5 * h);
    StarCurve c3(c.center(), fourier::to_spectrum(Vec(rho + 0.5 * h * k2)));
    Vec k3 = shape_rhs(c3, vel, tt + 0.5 * h);
    StarCurve c4(c.center(), fourier::to_spectrum(Vec(rho + h * k3)));
    Vec k4 = shape_rhs(c4, vel, tt + h);
    rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    tt += h;
  }
  return StarCurve(c.center(), fourier::to_spectrum(rho));
}

Eigen::Vector2d advance_point(Eigen::Vector2d x, const VelocityClosure& vel, double t,
                              double dt, int n_steps) {
  double h = dt / n_steps;
  double tt = t;
  for (int s = 0; s < n_steps; ++s) {
    Eigen::Vector2d k1 = vel(tt, x.x(), x.y());
    Eigen::Vector2d x2 = x + 0.5 * h * k1;
    Eigen::Vector2d k2 = vel(tt + 0.5 * h, x2.x(), x2.y());
    Eigen::Vector2d x3 = x + 0.5 * h * k2;
    Eigen::Vector2d k3 = vel(tt + 0.5 * h, x3.x(), x3.y());
    Eigen::Vector2d x4 = x + h * k3;
    Eigen::Vector2d k4 = vel(tt + h, x4.x(), x4.y());
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    tt += h;
  }
  return x;
}

} // namespace

StarCurve FlowFamily::shape_at(double t, int n_steps) const {
  if (std::abs(t - t0_) < 1e-15) return initial_;
  int steps = std::max(n_steps, static_cast<int>(std::ceil(std::abs(t - t0_) / 5e-3)));
  return advance_shape(initial_, v_, t0_, t - t0_, steps);
}

FlowSnapshot FlowFamily::snapshot_at(double t, int n_r, bool with_acceleration_fd,
                                     double fd_dt) const {
  StarCurve shape = shape_at(t);
  DomainPtr d = SpectralDomain::make_disk(shape, n_r);
  VectorField2 v = sample_vector(
      d, [&](double x, double y) { return v_(t, x, y); });
  FlowSnapshot snap{d, v, std::nullopt};
  if (with_acceleration_fd) {
    // D_t v = partial_t v + (v . grad) v; time part by centered closure FD
    VectorField2 vp = sample_vector(
        d, [&](double x, double y) { return v_(t + fd_dt, x, y); });
    VectorField2 vm = sample_vector(
        d, [&](double x, double y) { return v_(t - fd_dt, x, y); });
    auto [vxx, vxy] = d->gradient(v.x);
    auto [vyx, vyy] = d->gradient(v.y);
    Mat ax = (vp.x.values - vm.x.values) / (2.0 * fd_dt) +
             v.x.values.cwiseProduct(vxx.values) + v.y.values.cwiseProduct(vxy.values);
    Mat ay = (vp.y.values - vm.y.values) / (2.0 * fd_dt) +
             v.x.values.cwiseProduct(vyx.values) + v.y.values.cwiseProduct(vyy.values);
    snap.dt_v = VectorField2(InteriorField(d, std::move(ax)),
                             InteriorField(d, std::move(ay)));
  }
  return snap;
}

double FlowFamily::consistency_residual(double t, double dt) const {
  StarCurve base = shape_at(t);
  StarCurve plus = advance_shape(base, v_, t, dt, 1);
  StarCurve minus = advance_shape(base, v_, t, -dt, 1);
  GeometryReport g = geometry(base);
  const Vec& th = base.theta();
  double worst = 0.0;
  for (int j = 0; j < base.n_theta(); j += 7) {
    double drho = (plus.rho()[j] - minus.rho()[j]) / (2.0 * dt);
    double x = base.center().x() + base.rho()[j] * std::cos(th[j]);
    double y = base.center().y() + base.rho()[j] * std::sin(th[j]);
    Eigen::Vector2d v = v_(t, x, y);
    double vn = v.x() * g.nx[j] + v.y() * g.ny[j];
    worst = std::max(worst, std::abs(drho * base.rho()[j] / g.measure[j] - vn));
  }
  return worst;
}

// ---------- the verification table ----------

namespace {

struct CurveEval {
  CVec rho_spec;
  Eigen::Vector2d center;
  // geometry of the curve at an arbitrary angle
  void at(double th, double* rho, double* nx, double* ny, double* kappa) const {
    const int n = static_cast<int>(rho_spec.size());
    double r = fourier::eval(rho_spec, th);
    CVec d1 = fourier::derivative_spectrum(rho_spec, 1);
    CVec d2 = fourier::derivative_spectrum(rho_spec, 2);
    double rp = fourier::eval(d1, th);
    double rpp = fourier::eval(d2, th);
    (void)n;
    double w = std::hypot(r, rp);
    double c = std::cos(th), s = std::sin(th);
    if (nx) *nx = (r * c + rp * s) / w;
    if (ny) *ny = (r * s - rp * c) / w;
    if (kappa) *kappa = (r * r + 2.0 * rp * rp - r * rpp) / (w * w * w);
    if (rho) *rho = r;
  }
};

double vec_rel_err(const Vec& got, const Vec& want, double scale_floor = 1e-12) {
  double scale = std::max(want.cwiseAbs().maxCoeff(), scale_floor);
  return (got - want).cwiseAbs().maxCoeff() / scale;
}

} // namespace

std::vector<FormulaCheck> verify_kinematics(const FlowFamily& family, double t,
                                            double dt, int n_r, double tol_rel) {
  std::vector<FormulaCheck> table;
  const VelocityClosure& vel = family.velocity();
  StarCurve base = family.shape_at(t);
  const int n = base.n_theta();
  DomainPtr d = SpectralDomain::make_disk(base, n_r);
  VectorField2 v = sample_vector(d, [&](double x, double y) { return vel(t, x, y); });
  FlowSnapshot snap{d, v, std::nullopt};
  GeometryReport g0 = geometry(base);
  Vec bx = base.x(), by = base.y();
  double vmax = 1e-8;
  for (int j = 0; j < n; ++j) {
    Eigen::Vector2d vv = vel(t, bx[j], by[j]);
    vmax = std::max(vmax, vv.norm());
  }

  // shapes and advected boundary particles at +-dt and +-dt/2
  auto curve_eval = [&](const StarCurve& c) {
    return CurveEval{c.rho_modes(), c.center()};
  };
  struct Side {
    CurveEval ce;
    std::vector<Eigen::Vector2d> pts;
    DomainPtr dom;
  };
  auto make_side = [&](double delta, bool with_domain) {
    Side s;
    StarCurve c = advance_shape(base, vel, t, delta, 2);
    s.ce = curve_eval(c);
    s.pts.resize(n);
    for (int j = 0; j < n; ++j)
      s.pts[j] = advance_point(Eigen::Vector2d(bx[j], by[j]), vel, t, delta, 2);
    if (with_domain) s.dom = SpectralDomain::make_disk(c, n_r);
    return s;
  };

  auto push_row = [&](const std::string& id, double val_norm, double r_dt,
                      double r_half) {
    FormulaCheck row;
    row.id = id;
    row.residual = r_dt;
    double floor = 1e-9 * std::max(val_norm, 1.0);
    row.observed_order =
        (r_half > floor) ? std::log2(std::max(r_dt, 1e-300) / r_half) : 2.0;
    row.terminal_rel_err = r_half / std::max(val_norm, 1e-12);
    row.pass = (row.terminal_rel_err < tol_rel) &&
               (row.observed_order > 1.6 || r_half < floor);
    table.push_back(row);
    return row;
  };

  // --- D_t N ---
  {
    auto [dnx, dny] = dt_normal(snap);
    auto fd_at = [&](double delta) {
      Side p = make_side(delta, false), m = make_side(-delta, false);
      Vec fx(n), fy(n);
      for (int j = 0; j < n; ++j) {
        double thp = std::atan2(p.pts[j].y() - base.center().y(),
                                p.pts[j].x() - base.center().x());
        double thm = std::atan2(m.pts[j].y() - base.center().y(),
                                m.pts[j].x() - base.center().x());
        double nxp, nyp, nxm, nym;
        p.ce.at(thp, nullptr, &nxp, &nyp, nullptr);
        m.ce.at(thm, nullptr, &nxm, &nym, nullptr);
        fx[j] = (nxp - nxm) / (2.0 * delta);
        fy[j] = (nyp - nym) / (2.0 * delta);
      }
      return std::make_pair(fx, fy);
    };
    auto [fx1, fy1] = fd_at(dt);
    auto [fx2, fy2] = fd_at(0.5 * dt);
    double scale = std::max({dnx.cwiseAbs().maxCoeff(), dny.cwiseAbs().maxCoeff(), vmax});
    double r1 = std::max((fx1 - dnx).cwiseAbs().maxCoeff(),
                         (fy1 - dny).cwiseAbs().maxCoeff()) / scale;
    double r2 = std::max((fx2 - dnx).cwiseAbs().maxCoeff(),
                         (fy2 - dny).cwiseAbs().maxCoeff()) / scale;
    push_row("dtN", 1.0, r1, r2);
  }

  // --- D_t dS via material segment stretch ---
  {
    BoundaryScalar factor = dt_surface_measure(snap);
    auto fd_at = [&](double delta) {
      auto stretch = [&](double seg) {
        Vec out(n);
        for (int j = 0; j < n; ++j) {
          Eigen::Vector2d a(bx[j] - 0.5 * seg * g0.tx[j], by[j] - 0.5 * seg * g0.ty[j]);
          Eigen::Vector2d b(bx[j] + 0.5 * seg * g0.tx[j], by[j] + 0.5 * seg * g0.ty[j]);
          double ep = (advance_point(b, vel, t, delta, 2) -
                       advance_point(a, vel, t, delta, 2)).norm();
          double em = (advance_point(b, vel, t, -delta, 2) -
                       advance_point(a, vel, t, -delta, 2)).norm();
          out[j] = (std::log(ep) - std::log(em)) / (2.0 * delta);
        }
        return out;
      };
      // Richardson in the segment length removes the chord-sampling bias
      Vec s1 = stretch(2e-3), s2 = stretch(1e-3);
      return Vec((4.0 * s2 - s1) / 3.0);
    };
    Vec f1 = fd_at(dt), f2 = fd_at(0.5 * dt);
    double scale = std::max(factor.values.cwiseAbs().maxCoeff(), vmax);
    push_row("dtdS", 1.0, (f1 - factor.values).cwiseAbs().maxCoeff() / scale,
             (f2 - factor.values).cwiseAbs().maxCoeff() / scale);
  }

  // --- D_t kappa: internal k1 == k2 agreement and FD ---
  {
    DtCurvature dk = dt_curvature(snap);
    double scale = std::max(dk.via_normal_speed.values.cwiseAbs().maxCoeff(), 1e-12);
    double agree =
        (dk.via_velocity_laplacian.values - dk.via_normal_speed.values).cwiseAbs().maxCoeff() /
        scale;
    FormulaCheck row;
    row.id = "dtkappa[k1==k2]";
    row.residual = agree;
    row.observed_order = 0.0;
    row.terminal_rel_err = agree;
    row.pass = agree < 1e-8;
    table.push_back(row);

    auto fd_at = [&](double delta) {
      Side p = make_side(delta, false), m = make_side(-delta, false);
      Vec out(n);
      for (int j = 0; j < n; ++j) {
        double thp = std::atan2(p.pts[j].y() - base.center().y(),
                                p.pts[j].x() - base.center().x());
        double thm = std::atan2(m.pts[j].y() - base.center().y(),
                                m.pts[j].x() - base.center().x());
        double kp, km;
        p.ce.at(thp, nullptr, nullptr, nullptr, &kp);
        m.ce.at(thm, nullptr, nullptr, nullptr, &km);
        out[j] = (kp - km) / (2.0 * delta);
      }
      return out;
    };
    Vec f1 = fd_at(dt), f2 = fd_at(0.5 * dt);
    push_row("dtkappa", 1.0, vec_rel_err(f1, dk.via_normal_speed.values, vmax),
             vec_rel_err(f2, dk.via_normal_speed.values, vmax));
  }

  // --- D_t J (boundary trace of the E:dtJ2 evaluator) ---
  {
    VectorField2 dj = dt_J(snap);
    Vec ev_x = d->trace_outer(dj.x).values;
    Vec ev_y = d->trace_outer(dj.y).values;
    auto fd_at = [&](double delta) {
      Side p = make_side(delta, true), m = make_side(-delta, true);
      VectorField2 jp = curvature_force_J(p.dom);
      VectorField2 jm = curvature_force_J(m.dom);
      CVec jpx = fourier::to_spectrum(Vec(jp.x.values.row(0).transpose()));
      CVec jpy = fourier::to_spectrum(Vec(jp.y.values.row(0).transpose()));
      CVec jmx = fourier::to_spectrum(Vec(jm.x.values.row(0).transpose()));
      CVec jmy = fourier::to_spectrum(Vec(jm.y.values.row(0).transpose()));
      Vec fx(n), fy(n);
      for (int j = 0; j < n; ++j) {
        double thp = std::atan2(p.pts[j].y() - base.center().y(),
                                p.pts[j].x() - base.center().x());
        double thm = std::atan2(m.pts[j].y() - base.center().y(),
                                m.pts[j].x() - base.center().x());
        fx[j] = (fourier::eval(jpx, thp) - fourier::eval(jmx, thm)) / (2.0 * delta);
        fy[j] = (fourier::eval(jpy, thp) - fourier::eval(jmy, thm)) / (2.0 * delta);
      }
      return std::make_pair(fx, fy);
    };
    auto [fx1, fy1] = fd_at(dt);
    auto [fx2, fy2] = fd_at(0.5 * dt);
    double scale = std::max({ev_x.cwiseAbs().maxCoeff(), ev_y.cwiseAbs().maxCoeff(),
                             dt_curvature(snap).via_normal_speed.values.cwiseAbs().maxCoeff(),
                             1e-12});
    double r1 = std::max((fx1 - ev_x).cwiseAbs().maxCoeff(),
                         (fy1 - ev_y).cwiseAbs().maxCoeff()) / scale;
    double r2 = std::max((fx2 - ev_x).cwiseAbs().maxCoeff(),
                         (fy2 - ev_y).cwiseAbs().maxCoeff()) / scale;
    push_row("dtJ", 1.0, r1, r2);
  }

  // --- commutators ---
  // test data: a fixed spatial closure restricted to the moving boundary
  auto fclo = [](double x, double y) { return x * x - 0.5 * y + 0.3 * x * y; };
  InteriorField fint = d->sample(fclo);
  auto grad_f = d->gradient(fint);
  // D_t f = v . grad f for time-independent ambient f
  Mat dtf_m = v.x.values.cwiseProduct(grad_f.first.values) +
              v.y.values.cwiseProduct(grad_f.second.values);
  InteriorField dtf(d, dtf_m);
  BoundaryScalar f_b = d->trace_outer(fint);
  BoundaryScalar dtf_b = d->trace_outer(dtf);

  // boundary commutators: N and surface Laplacian
  for (const char* which : {"N", "surfLap"}) {
    bool is_dn = std::string(which) == "N";
    Vec rhs = is_dn ? commutator_dn(snap, f_b).values
                    : commutator_surface_laplacian(snap, f_b).values;
    Vec op0 = is_dn ? d->dirichlet_neumann(dtf_b).values
                    : surface_laplacian(base, dtf_b).values;
    auto fd_at = [&](double delta) {
      Side p = make_side(delta, true), m = make_side(-delta, true);
      auto boundary_op = [&](const Side& s) {
        const StarCurve& c = s.dom->outer_curve();
        Vec fb(n);
        Vec cx = c.x(), cy = c.y();
        for (int j = 0; j < n; ++j) fb[j] = fclo(cx[j], cy[j]);
        if (is_dn) return s.dom->dirichlet_neumann(BoundaryScalar(fb)).values;
        return surface_laplacian(c, BoundaryScalar(fb)).values;
      };
      Vec op_p = boundary_op(p), op_m = boundary_op(m);
      CVec sp = fourier::to_spectrum(op_p), sm = fourier::to_spectrum(op_m);
      Vec lhs(n);
      for (int j = 0; j < n; ++j) {
        double thp = std::atan2(p.pts[j].y() - base.center().y(),
                                p.pts[j].x() - base.center().x());
        double thm = std::atan2(m.pts[j].y() - base.center().y(),
                                m.pts[j].x() - base.center().x());
        double dop = (fourier::eval(sp, thp) - fourier::eval(sm, thm)) / (2.0 * delta);
        lhs[j] = dop - op0[j];
      }
      return lhs;
    };
    Vec l1 = fd_at(dt), l2 = fd_at(0.5 * dt);
    push_row(std::string("comm[") + which + "]", 1.0, vec_rel_err(l1, rhs, vmax),
             vec_rel_err(l2, rhs, vmax));
  }

  // interior commutators: H and invLap, compared at interior probe points
  {
    std::vector<std::pair<int, int>> probes;
    for (int i = n_r / 6; i < n_r; i += std::max(1, n_r / 6))
      for (int j = 0; j < n; j += n / 16) probes.emplace_back(i, j);

    for (const char* which : {"H", "invLap"}) {
      bool is_h = std::string(which) == "H";
      InteriorField rhs_field =
          is_h ? commutator_harmonic(snap, f_b) : commutator_inverse_laplacian(snap, fint);
      InteriorField op_dtf = is_h ? d->harmonic_extension(dtf_b)
                                  : d->poisson_zero_dirichlet(dtf);
      auto fd_at = [&](double delta) {
        Side p = make_side(delta, true), m = make_side(-delta, true);
        auto op_field = [&](const Side& s) {
          if (is_h) {
            const StarCurve& c = s.dom->outer_curve();
            Vec fb(n);
            Vec cx = c.x(), cy = c.y();
            for (int j = 0; j < n; ++j) fb[j] = fclo(cx[j], cy[j]);
            return s.dom->harmonic_extension(BoundaryScalar(fb));
          }
          return s.dom->poisson_zero_dirichlet(s.dom->sample(fclo));
        };
        InteriorField op_p = op_field(p), op_m = op_field(m);
        Vec lhs(probes.size());
        int idx = 0;
        for (auto [i, j] : probes) {
          Eigen::Vector2d x0(d->X()(i, j), d->Y()(i, j));
          Eigen::Vector2d xp = advance_point(x0, vel, t, delta, 2);
          Eigen::Vector2d xm = advance_point(x0, vel, t, -delta, 2);
          double dop = (p.dom->eval_field(op_p, xp.x(), xp.y()) -
                        m.dom->eval_field(op_m, xm.x(), xm.y())) / (2.0 * delta);
          lhs[idx++] = dop - op_dtf.values(i, j);
        }
        return lhs;
      };
      Vec want(probes.size());
      int idx = 0;
      for (auto [i, j] : probes) want[idx++] = rhs_field.values(i, j);
      Vec l1 = fd_at(dt), l2 = fd_at(0.5 * dt);
      push_row(std::string("comm[") + which + "]", 1.0, vec_rel_err(l1, want, vmax),
               vec_rel_err(l2, want, vmax));
    }
  }

  return table;
}

FlowFamily standard_family(const std::string& name, int n_theta) {
  if (name == "ellipse-shear") {
    return FlowFamily(make_ellipse(1.2, 1.0, n_theta),
                      [](double, double, double y) {
                        return Eigen::Vector2d(y, 0.0);
                      });
  }
  if (name == "ellipse-swirl") {
    return FlowFamily(make_ellipse(1.2, 1.0, n_theta),
                      [](double, double x, double y) {
                        // perp-gradient of psi = 0.3 sin(x + 0.3 y) + 0.2 x y^2
                        double px = 0.3 * std::cos(x + 0.3 * y) + 0.2 * y * y;
                        double py = 0.09 * std::cos(x + 0.3 * y) + 0.4 * x * y;
                        return Eigen::Vector2d(-py, px);
                      });
  }
  if (name == "expanding-circle") {
    return FlowFamily(make_star_curve({}, 1.0, n_theta),
                      [](double, double x, double y) {
                        double r = std::hypot(x, y);
                        return Eigen::Vector2d(x / r, y / r);
                      });
  }
  if (name == "rigid-rotation") {
    return FlowFamily(make_star_curve({}, 1.0, n_theta),
                      [](double, double x, double y) {
                        return Eigen::Vector2d(-0.7 * y, 0.7 * x);
                      });
  }
  if (name == "stationary") {
    return FlowFamily(make_star_curve({}, 1.0, n_theta),
                      [](double, double, double) { return Eigen::Vector2d(0.0, 0.0); });
  }
  throw std::invalid_argument("unknown flow family: " + name);
}

} // namespace capeuler
