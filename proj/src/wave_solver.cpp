#include "capeuler/wave_solver.hpp"

#include <cmath>
#include <stdexcept>

namespace capeuler {

namespace {

struct Rates {
  Vec drho_out, dphi_out;
  Vec drho_in, dphi_in;
  double dgauge = 0.0;
  double flux = 0.0;
};

// boundary evolution rates from the potential formulation
Rates evaluate_rates(const WaveState& s, int n_r) {
  Rates r;
  if (!s.is_annulus()) {
    DomainPtr d = SpectralDomain::make_disk(s.outer, n_r);
    InteriorField u = d->harmonic_extension(BoundaryScalar(s.phi_outer));
    Vec vn = d->normal_derivative(u, BoundaryTag::outer).values;
    Vec vt = surface_derivative(s.outer, BoundaryScalar(s.phi_outer)).values;
    const GeometryReport& g = d->outer_geometry();
    const Vec& rho = s.outer.rho();
    const Vec& w = s.outer.measure();
    const Vec& dr = s.outer.drho();
    Vec v2 = vn.array().square().matrix() + vt.array().square().matrix();
    r.drho_out = vn.cwiseProduct(w).cwiseQuotient(rho);
    // e_r . v with the outward frame: (rho/w) vn + (rho'/w) vt
    Vec erv = (rho.cwiseProduct(vn) + dr.cwiseProduct(vt)).cwiseQuotient(w);
    r.dphi_out = -0.5 * v2 - s.eps * s.eps * g.kappa + r.drho_out.cwiseProduct(erv);
    double c = integrate_boundary(s.outer, r.dphi_out) / s.outer.arclength();
    r.dphi_out.array() -= c;
    r.dgauge = c;
    r.flux = integrate_boundary(s.outer, vn);
    r.drho_out = fourier::dealias(r.drho_out);
    r.dphi_out = fourier::dealias(r.dphi_out);
    return r;
  }

  AnnulusShape shape(*s.inner, s.outer);
  DomainPtr d = SpectralDomain::make_annulus(shape, n_r);
  InteriorField u = d->harmonic_extension2(BoundaryScalar(s.phi_outer, BoundaryTag::outer),
                                           BoundaryScalar(s.phi_inner, BoundaryTag::inner));
  auto rates_on = [&](const StarCurve& curve, BoundaryTag tag, Vec& drho, Vec& dphi) {
    Vec vn = d->normal_derivative(u, tag).values;
    Vec phi = (tag == BoundaryTag::outer) ? s.phi_outer : s.phi_inner;
    Vec vt = surface_derivative(curve, BoundaryScalar(phi)).values;
    const GeometryReport& g =
        (tag == BoundaryTag::outer) ? d->outer_geometry() : d->inner_geometry();
    const Vec& rho = curve.rho();
    const Vec& w = curve.measure();
    const Vec& dr = curve.drho();
    double sgn = (tag == BoundaryTag::outer) ? 1.0 : -1.0;
    Vec v2 = vn.array().square().matrix() + vt.array().square().matrix();
    drho = sgn * vn.cwiseProduct(w).cwiseQuotient(rho);
    Vec erv = (sgn * rho.cwiseProduct(vn) + dr.cwiseProduct(vt)).cwiseQuotient(w);
    dphi = -0.5 * v2 - s.eps * s.eps * g.kappa + drho.cwiseProduct(erv);
  };
  rates_on(s.outer, BoundaryTag::outer, r.drho_out, r.dphi_out);
  rates_on(*s.inner, BoundaryTag::inner, r.drho_in, r.dphi_in);
  double c = (integrate_boundary(s.outer, r.dphi_out) +
              integrate_boundary(*s.inner, r.dphi_in)) /
             (s.outer.arclength() + s.inner->arclength());
  r.dphi_out.array() -= c;
  r.dphi_in.array() -= c;
  r.dgauge = c;
  r.flux = integrate_boundary(s.outer, d->normal_derivative(u, BoundaryTag::outer).values);
  r.drho_out = fourier::dealias(r.drho_out);
  r.dphi_out = fourier::dealias(r.dphi_out);
  r.drho_in = fourier::dealias(r.drho_in);
  r.dphi_in = fourier::dealias(r.dphi_in);
  return r;
}

WaveState apply_rates(const WaveState& s, const Rates& r, double h) {
  WaveState out(StarCurve(s.outer.center(),
                          fourier::to_spectrum(Vec(s.outer.rho() + h * r.drho_out))));
  out.phi_outer = s.phi_outer + h * r.dphi_out;
  if (s.is_annulus()) {
    out.inner = StarCurve(s.inner->center(),
                          fourier::to_spectrum(Vec(s.inner->rho() + h * r.drho_in)));
    out.phi_inner = s.phi_inner + h * r.dphi_in;
  }
  out.t = s.t + h;
  out.eps = s.eps;
  out.bernoulli_offset = s.bernoulli_offset + h * r.dgauge;
  out.flux = r.flux;
  return out;
}

void check_finite(const WaveState& s) {
  if (!s.outer.rho().allFinite() || !s.phi_outer.allFinite())
    throw std::runtime_error("NaN detected in the wave state");
  if (s.is_annulus() && (!s.inner->rho().allFinite() || !s.phi_inner.allFinite()))
    throw std::runtime_error("NaN detected in the wave state");
}

} // namespace

double WaveState::enclosed_area() const {
  double a_out = 0.5 * outer.rho().array().square().sum() * 2.0 * M_PI / outer.n_theta();
  if (!is_annulus()) return a_out;
  double a_in = 0.5 * inner->rho().array().square().sum() * 2.0 * M_PI / inner->n_theta();
  return a_out - a_in;
}

WaveState init_state(const SimConfig& cfg) {
  if (cfg.geometry == SimConfig::Geometry::circle) {
    WaveState s(make_star_curve(cfg.shape_modes, cfg.radius, cfg.n_theta));
    s.phi_outer = Vec::Zero(cfg.n_theta);
    const Vec& th = s.outer.theta();
    for (const auto& [k, a] : cfg.phi_modes)
      for (int j = 0; j < cfg.n_theta; ++j) s.phi_outer[j] += a * std::cos(k * th[j]);
    s.eps = cfg.eps;
    return s;
  }
  if (cfg.inner_radius <= 0.0 || cfg.outer_radius <= cfg.inner_radius)
    throw std::invalid_argument("annulus needs 0 < inner_radius < outer_radius");
  WaveState s(make_star_curve(cfg.shape_modes, cfg.outer_radius, cfg.n_theta));
  s.inner = make_star_curve(cfg.shape_modes_inner, cfg.inner_radius, cfg.n_theta);
  // radial-flux potential a1 log r, evaluated on the actual boundaries
  s.phi_outer = cfg.flux * s.outer.rho().array().log().matrix();
  s.phi_inner = cfg.flux * s.inner->rho().array().log().matrix();
  const Vec& th = s.outer.theta();
  for (const auto& [k, a] : cfg.phi_modes)
    for (int j = 0; j < cfg.n_theta; ++j) s.phi_outer[j] += a * std::cos(k * th[j]);
  s.eps = cfg.eps;
  s.flux = 2.0 * M_PI * cfg.flux;
  return s;
}

double stability_dt(const WaveState& s, double cfl) {
  auto bound_on = [&](const StarCurve& c, const Vec& phi) {
    double dsig = c.measure().minCoeff() * 2.0 * M_PI / c.n_theta();
    double bound = std::numeric_limits<double>::infinity();
    if (s.eps > 1e-12) bound = std::pow(dsig, 1.5) / s.eps;
    Vec vt = surface_derivative(c, BoundaryScalar(phi)).values;
    double vmax = vt.cwiseAbs().maxCoeff() + 1e-6;
    // rough normal-speed scale from the potential variation
    bound = std::min(bound, dsig / vmax);
    return bound;
  };
  double b = bound_on(s.outer, s.phi_outer);
  if (s.is_annulus()) {
    b = std::min(b, bound_on(*s.inner, s.phi_inner));
    // radial flux speed
    double vr = std::abs(s.flux) / (2.0 * M_PI * s.inner->rho().minCoeff());
    double dsig = s.inner->measure().minCoeff() * 2.0 * M_PI / s.inner->n_theta();
    if (vr > 1e-12) b = std::min(b, dsig / vr);
  }
  return cfl * b;
}

WaveState step(const WaveState& s, double dt, int n_r) {
  check_finite(s);
  Rates k1 = evaluate_rates(s, n_r);
  WaveState s2 = apply_rates(s, k1, 0.5 * dt);
  Rates k2 = evaluate_rates(s2, n_r);
  WaveState s3 = apply_rates(s, k2, 0.5 * dt);
  Rates k3 = evaluate_rates(s3, n_r);
  WaveState s4 = apply_rates(s, k3, dt);
  Rates k4 = evaluate_rates(s4, n_r);
  Rates sum;
  sum.drho_out = (k1.drho_out + 2.0 * k2.drho_out + 2.0 * k3.drho_out + k4.drho_out) / 6.0;
  sum.dphi_out = (k1.dphi_out + 2.0 * k2.dphi_out + 2.0 * k3.dphi_out + k4.dphi_out) / 6.0;
  if (s.is_annulus()) {
    sum.drho_in = (k1.drho_in + 2.0 * k2.drho_in + 2.0 * k3.drho_in + k4.drho_in) / 6.0;
    sum.dphi_in = (k1.dphi_in + 2.0 * k2.dphi_in + 2.0 * k3.dphi_in + k4.dphi_in) / 6.0;
  }
  sum.dgauge = (k1.dgauge + 2.0 * k2.dgauge + 2.0 * k3.dgauge + k4.dgauge) / 6.0;
  sum.flux = k1.flux;
  WaveState out = apply_rates(s, sum, dt);
  check_finite(out);
  return out;
}

StateFields state_fields(const WaveState& s, int n_r) {
  StateFields f;
  if (s.is_annulus()) {
    AnnulusShape shape(*s.inner, s.outer);
    f.domain = SpectralDomain::make_annulus(shape, n_r);
    f.potential = f.domain->harmonic_extension2(
        BoundaryScalar(s.phi_outer, BoundaryTag::outer),
        BoundaryScalar(s.phi_inner, BoundaryTag::inner));
  } else {
    f.domain = SpectralDomain::make_disk(s.outer, n_r);
    f.potential = f.domain->harmonic_extension(BoundaryScalar(s.phi_outer));
  }
  auto [gx, gy] = f.domain->gradient(f.potential);
  f.v = VectorField2(std::move(gx), std::move(gy));
  return f;
}

namespace {

SnapshotDiag make_diag(const WaveState& s, int n_r) {
  SnapshotDiag d;
  d.t = s.t;
  StateFields f = state_fields(s, n_r);
  d.energy = higher_energy(f.domain, f.v, s.eps);
  d.flux = s.flux;
  d.outer_spectrum = s.outer.rho_modes();
  if (s.is_annulus()) d.inner_spectrum = s.inner->rho_modes();
  return d;
}

} // namespace

DiagnosticsSeries simulate(const SimConfig& cfg, const SnapshotSink& sink) {
  WaveState s = init_state(cfg);
  const int n_r = cfg.n_r;
  double dt = cfg.dt > 0.0 ? cfg.dt : stability_dt(s, cfg.cfl);
  DiagnosticsSeries series;
  SnapshotDiag d0 = make_diag(s, n_r);
  series.e0_initial = d0.energy.E0;
  series.area_initial = s.enclosed_area();
  series.rows.push_back(d0);
  if (sink) sink(s, d0);
  int step_count = 0;
  while (s.t < cfg.t_final - 1e-14) {
    double h = std::min(dt, cfg.t_final - s.t);
    s = step(s, h, n_r);
    ++step_count;
    if (step_count % cfg.output_every == 0 || s.t >= cfg.t_final - 1e-14) {
      SnapshotDiag d = make_diag(s, n_r);
      series.rows.push_back(d);
      series.e0_max_drift =
          std::max(series.e0_max_drift,
                   std::abs(d.energy.E0 - series.e0_initial) /
                       std::max(std::abs(series.e0_initial), 1e-300));
      series.area_max_drift =
          std::max(series.area_max_drift,
                   std::abs(s.enclosed_area() - series.area_initial) /
                       std::max(std::abs(series.area_initial), 1e-300));
      if (d.energy.rt_margin < 0.0) series.rt_all_positive = false;
      if (sink) sink(s, d);
    }
  }
  return series;
}

DispersionResult dispersion_probe(int k, double amplitude, double eps,
                                  const SimConfig& base) {
  if (amplitude > 1e-2)
    throw std::invalid_argument("dispersion probe requires amplitude <= 1e-2");
  DispersionResult res;
  res.k = k;
  res.eps = eps;
  double R = base.radius;
  res.predicted_frequency =
      std::sqrt(std::max(0.0, eps * eps * k * (double(k) * k - 1.0) / (R * R * R)));

  SimConfig cfg = base;
  cfg.eps = eps;
  cfg.shape_modes = {{k, amplitude}};
  cfg.phi_modes.clear();
  WaveState s = init_state(cfg);
  double dt = cfg.dt > 0.0 ? cfg.dt : stability_dt(s, cfg.cfl);

  std::vector<double> ts, cs;
  double t_run = (res.predicted_frequency > 1e-12)
                     ? 3.5 * 2.0 * M_PI / res.predicted_frequency
                     : 1.0;
  while (s.t < t_run) {
    ts.push_back(s.t);
    cs.push_back(2.0 * s.outer.rho_modes()[k].real());
    s = step(s, dt, cfg.n_r);
  }
  const int nsamp = static_cast<int>(ts.size());
  double mean = 0.0;
  for (double c : cs) mean += c;
  mean /= nsamp;
  // zero crossings of the detrended mode amplitude
  std::vector<double> crossings;
  for (int i = 1; i < nsamp; ++i) {
    double a = cs[i - 1] - mean, b = cs[i] - mean;
    if (a == 0.0 || a * b < 0.0) {
      double frac = a / (a - b);
      crossings.push_back(ts[i - 1] + frac * (ts[i] - ts[i - 1]));
    }
  }
  double swing = 0.0;
  for (double c : cs) swing = std::max(swing, std::abs(c - mean));
  if (crossings.size() < 4 || swing < 0.05 * amplitude) {
    res.oscillation_detected = false;
    return res;
  }
  res.oscillation_detected = true;
  double period_sum = 0.0;
  for (size_t i = 1; i < crossings.size(); ++i)
    period_sum += crossings[i] - crossings[i - 1];
  double half_period = period_sum / (crossings.size() - 1);
  res.measured_frequency = M_PI / half_period;
  res.deviation = std::abs(res.measured_frequency - res.predicted_frequency) /
                  std::max(res.predicted_frequency, 1e-300);

  // least-squares single-harmonic fit to flag nonlinear contamination
  double w = res.measured_frequency;
  double sc = 0, ss = 0, scc = 0, sss = 0, scs = 0, yc = 0, ys = 0, sy = 0;
  for (int i = 0; i < nsamp; ++i) {
    double c = std::cos(w * ts[i]), sn = std::sin(w * ts[i]);
    sc += c; ss += sn; scc += c * c; sss += sn * sn; scs += c * sn;
    yc += (cs[i] - mean) * c; ys += (cs[i] - mean) * sn; sy += cs[i] - mean;
  }
  Eigen::Matrix3d M;
  M << scc, scs, sc, scs, sss, ss, sc, ss, double(nsamp);
  Eigen::Vector3d rhs(yc, ys, sy);
  Eigen::Vector3d ab = M.fullPivLu().solve(rhs);
  double resid = 0.0;
  for (int i = 0; i < nsamp; ++i) {
    double fit = ab[0] * std::cos(w * ts[i]) + ab[1] * std::sin(w * ts[i]) + ab[2];
    resid += std::pow(cs[i] - mean - fit, 2);
  }
  double amp_fit = std::hypot(ab[0], ab[1]);
  res.harmonic_content = std::sqrt(resid / nsamp) / std::max(amp_fit, 1e-300);
  res.contaminated = res.harmonic_content > 0.05;
  return res;
}

DispersionSweep dispersion_sweep(const std::vector<int>& ks, double amplitude,
                                 double eps, const SimConfig& base) {
  DispersionSweep sweep;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (int k : ks) {
    DispersionResult r = dispersion_probe(k, amplitude, eps, base);
    sweep.results.push_back(r);
    if (r.oscillation_detected) {
      double lx = std::log(double(k)), ly = std::log(r.measured_frequency);
      sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
      ++m;
    }
  }
  if (m >= 2) sweep.loglog_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return sweep;
}

bool eps_sweep_admissible(const DomainPtr& d, const VectorField2& v) {
  return rt_margin(d, v) > 0.0;
}

EpsSweepResult eps_sweep(const SimConfig& scenario, std::vector<double> eps_list) {
  EpsSweepResult out;
  // precondition: RT margin positive at t = 0 for the eps = 0 scenario
  {
    SimConfig c0 = scenario;
    c0.eps = 0.0;
    WaveState s0 = init_state(c0);
    StateFields f = state_fields(s0, c0.n_r);
    if (!eps_sweep_admissible(f.domain, f.v)) {
      out.refused = true;
      return out;
    }
  }
  auto run_shape = [&](double eps, bool* rt_ok) {
    SimConfig c = scenario;
    c.eps = eps;
    c.output_every = 5;
    bool ok = true;
    WaveState s = init_state(c);
    double dt = c.dt > 0.0 ? c.dt : stability_dt(s, c.cfl);
    // honor the stiffest eps in the sweep so runs share comparable accuracy
    int steps = 0;
    while (s.t < c.t_final - 1e-14) {
      double h = std::min(dt, c.t_final - s.t);
      s = step(s, h, c.n_r);
      if (++steps % c.output_every == 0) {
        StateFields f = state_fields(s, c.n_r);
        if (rt_margin(f.domain, f.v) <= 0.0) ok = false;
      }
    }
    if (rt_ok) *rt_ok = ok;
    return s;
  };
  bool rt_ok_all = true, ok = true;
  WaveState base_run = run_shape(0.0, &ok);
  rt_ok_all = rt_ok_all && ok;
  auto distance = [&](const WaveState& a, const WaveState& b) {
    double acc = integrate_boundary(
        a.outer, Vec((a.outer.rho() - b.outer.rho()).array().square().matrix()));
    if (a.is_annulus())
      acc += integrate_boundary(
          *a.inner, Vec((a.inner->rho() - b.inner->rho()).array().square().matrix()));
    return std::sqrt(acc);
  };
  std::vector<WaveState> finals;
  for (double e : eps_list) {
    WaveState se = run_shape(e, &ok);
    rt_ok_all = rt_ok_all && ok;
    out.eps_values.push_back(e);
    out.distances.push_back(distance(se, base_run));
    finals.push_back(std::move(se));
  }
  for (size_t i = 0; i + 1 < finals.size(); ++i)
    out.pair_cauchy.push_back(distance(finals[i], finals[i + 1]));
  out.monotone = true;
  for (size_t i = 0; i + 1 < out.distances.size(); ++i)
    if (out.distances[i + 1] >= out.distances[i]) out.monotone = false;
  out.rt_positive_throughout = rt_ok_all;
  return out;
}

} // namespace capeuler
