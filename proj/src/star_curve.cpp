#include "capeuler/star_curve.hpp"

#include <cmath>
#include <stdexcept>

namespace capeuler {

namespace {

void check_same_grid(const StarCurve& curve, const BoundaryScalar& f) {
  if (f.size() != curve.n_theta())
    throw std::invalid_argument("boundary data grid size does not match curve");
}

} // namespace

StarCurve::StarCurve(const Eigen::Vector2d& center, const CVec& rho_modes)
    : center_(center), rho_modes_(rho_modes) {
  n_ = static_cast<int>(rho_modes.size());
  if (!fourier::is_power_of_two(n_))
    throw std::invalid_argument("n_theta must be a power of two");
  // enforce conjugate symmetry (rho is real)
  for (int i = 1; i < n_ / 2; ++i) {
    Complex avg = 0.5 * (rho_modes_[i] + std::conj(rho_modes_[n_ - i]));
    rho_modes_[i] = avg;
    rho_modes_[n_ - i] = std::conj(avg);
  }
  rho_modes_[0] = rho_modes_[0].real();
  rho_modes_[n_ / 2] = rho_modes_[n_ / 2].real();

  theta_ = fourier::theta_grid(n_);
  rho_ = fourier::to_grid(rho_modes_);
  drho_ = fourier::to_grid(fourier::derivative_spectrum(rho_modes_, 1));
  d2rho_ = fourier::to_grid(fourier::derivative_spectrum(rho_modes_, 2));
  if (rho_.minCoeff() <= 0.0)
    throw std::invalid_argument("not star-shaped: rho <= 0 on the grid");

  w_ = (rho_.array().square() + drho_.array().square()).sqrt();
  length_ = w_.sum() * (2.0 * M_PI / n_);
  resolved_ = fourier::high_mode_mass_fraction(rho_modes_) < 1e-10;
}

struct StarCurve::ArcCache {
  std::once_flag once;
  Vec theta_sigma; // theta values of arclength-equispaced nodes
};

const StarCurve::ArcCache& StarCurve::arc() const {
  if (!arc_) arc_ = std::make_shared<ArcCache>();
  std::call_once(arc_->once, [&]() {
    // arclength-equispaced parameter values: solve sigma(theta_m) = m L / N
    // with sigma the spectral antiderivative of w
    CVec wspec = fourier::to_spectrum(w_);
    double wbar = wspec[0].real();
    auto sigma = [&](double th) {
      Complex acc(0.0, 0.0);
      for (int i = 1; i < n_; ++i) {
        int k = fourier::wavenumber(i, n_);
        if (i == n_ / 2 || k == 0) continue; // Nyquist has no odd antiderivative
        Complex ik(0.0, static_cast<double>(k));
        acc += wspec[i] / ik * (std::exp(ik * th) - 1.0);
      }
      return wbar * th + acc.real();
    };
    arc_->theta_sigma.resize(n_);
    double th = 0.0;
    for (int m = 0; m < n_; ++m) {
      double target = length_ * m / n_;
      if (m > 0) th += (length_ / n_) / fourier::eval(wspec, th); // warm start
      for (int it = 0; it < 60; ++it) {
        double g = sigma(th) - target;
        double wth = fourier::eval(wspec, th);
        double step = g / wth;
        th -= step;
        if (std::abs(step) < 1e-14) break;
      }
      arc_->theta_sigma[m] = th;
    }
  });
  return *arc_;
}

const Vec& StarCurve::arclength_nodes() const { return arc().theta_sigma; }

Vec StarCurve::x() const {
  return (center_.x() + rho_.array() * theta_.array().cos()).matrix();
}

Vec StarCurve::y() const {
  return (center_.y() + rho_.array() * theta_.array().sin()).matrix();
}

StarCurve StarCurve::rotated(double alpha) const {
  CVec modes(n_);
  for (int i = 0; i < n_; ++i) {
    int k = fourier::wavenumber(i, n_);
    modes[i] = rho_modes_[i] * std::exp(Complex(0.0, k * alpha));
  }
  return StarCurve(center_, modes);
}

Vec StarCurve::to_arclength_grid(const Vec& f_theta) const {
  const Vec& ts = arc().theta_sigma;
  CVec spec = fourier::to_spectrum(f_theta);
  Vec out(n_);
  for (int m = 0; m < n_; ++m) out[m] = fourier::eval(spec, ts[m]);
  return out;
}

Vec StarCurve::from_arclength_grid(const Vec& f_sigma) const {
  // invert the resampling: interpolate on the sigma grid at the sigma values
  // of the theta nodes. sigma(theta_j) recovered by inverting theta_sigma_.
  // Use that sigma -> theta is the monotone map sampled at equispaced sigma:
  // build the trig interpolant of f as a function of sigma index and evaluate
  // at sigma(theta_j) * N / L.
  CVec spec = fourier::to_spectrum(f_sigma);
  // sigma(theta_j): spectral antiderivative of w at the theta nodes
  CVec wspec = fourier::to_spectrum(w_);
  double wbar = wspec[0].real();
  Vec out(n_);
  for (int j = 0; j < n_; ++j) {
    double th = theta_[j];
    Complex acc(0.0, 0.0);
    for (int i = 1; i < n_; ++i) {
      int k = fourier::wavenumber(i, n_);
      if (i == n_ / 2 || k == 0) continue;
      Complex ik(0.0, static_cast<double>(k));
      acc += wspec[i] / ik * (std::exp(ik * th) - 1.0);
    }
    double sg = wbar * th + acc.real();
    out[j] = fourier::eval(spec, 2.0 * M_PI * sg / length_);
  }
  return out;
}

AnnulusShape::AnnulusShape(StarCurve in, StarCurve out)
    : inner(std::move(in)), outer(std::move(out)) {
  if (inner.n_theta() != outer.n_theta())
    throw std::invalid_argument("annulus boundaries must share the theta grid");
  if ((inner.center() - outer.center()).norm() > 1e-14)
    throw std::invalid_argument("annulus boundaries must share the center");
  if (inner.rho().maxCoeff() >= outer.rho().minCoeff())
    throw std::invalid_argument("annulus boundaries intersect (no positive gap)");
}

StarCurve make_star_curve(const std::vector<std::pair<int, double>>& mode_list,
                          double base_radius, int n_theta,
                          const Eigen::Vector2d& center) {
  if (base_radius <= 0.0) throw std::invalid_argument("base_radius must be positive");
  if (!fourier::is_power_of_two(n_theta))
    throw std::invalid_argument("n_theta must be a power of two");
  CVec modes = CVec::Zero(n_theta);
  modes[0] = base_radius;
  for (const auto& [k, a] : mode_list) {
    if (k <= 0 || k >= n_theta / 2)
      throw std::invalid_argument("perturbation wavenumber out of range");
    modes[k] += 0.5 * a;
    modes[n_theta - k] += 0.5 * a;
  }
  return StarCurve(center, modes);
}

StarCurve make_ellipse(double a, double b, int n_theta) {
  // polar graph of x^2/a^2 + y^2/b^2 = 1
  Vec th = fourier::theta_grid(n_theta);
  Vec rho(n_theta);
  for (int j = 0; j < n_theta; ++j) {
    double c = std::cos(th[j]), s = std::sin(th[j]);
    rho[j] = a * b / std::sqrt(b * b * c * c + a * a * s * s);
  }
  return StarCurve(Eigen::Vector2d::Zero(), fourier::to_spectrum(rho));
}

GeometryReport geometry(const StarCurve& curve) {
  const int n = curve.n_theta();
  const Vec& rho = curve.rho();
  const Vec& dr = curve.drho();
  const Vec& d2r = curve.d2rho();
  const Vec& th = curve.theta();
  GeometryReport g;
  g.nx.resize(n); g.ny.resize(n); g.tx.resize(n); g.ty.resize(n);
  g.kappa.resize(n);
  g.measure = curve.measure();
  for (int j = 0; j < n; ++j) {
    double c = std::cos(th[j]), s = std::sin(th[j]);
    double w = g.measure[j];
    double w2 = w * w;
    if (w2 < 1e-12) throw std::runtime_error("degenerate boundary metric");
    // T ~ rho' e_r + rho e_th ; N ~ rho e_r - rho' e_th
    g.tx[j] = (dr[j] * c - rho[j] * s) / w;
    g.ty[j] = (dr[j] * s + rho[j] * c) / w;
    g.nx[j] = (rho[j] * c + dr[j] * s) / w;
    g.ny[j] = (rho[j] * s - dr[j] * c) / w;
    g.kappa[j] = (rho[j] * rho[j] + 2.0 * dr[j] * dr[j] - rho[j] * d2r[j]) / (w2 * w);
  }
  g.second_form = g.kappa;
  g.arclength = curve.arclength();
  g.resolved = curve.resolved();
  return g;
}

GeometryReport fluid_geometry(const StarCurve& curve, BoundaryTag tag) {
  GeometryReport g = geometry(curve);
  if (tag == BoundaryTag::inner) {
    g.nx = -g.nx; g.ny = -g.ny;
    g.kappa = -g.kappa;
    g.second_form = g.kappa;
  }
  return g;
}

BoundaryScalar surface_derivative(const StarCurve& curve, const BoundaryScalar& f) {
  check_same_grid(curve, f);
  Vec ft = fourier::derivative(f.values, 1);
  return BoundaryScalar(ft.cwiseQuotient(curve.measure()), f.tag);
}

BoundaryScalar surface_laplacian(const StarCurve& curve, const BoundaryScalar& f) {
  check_same_grid(curve, f);
  Vec fs = fourier::derivative(f.values, 1).cwiseQuotient(curve.measure());
  Vec fss = fourier::derivative(fs, 1).cwiseQuotient(curve.measure());
  return BoundaryScalar(fss, f.tag);
}

double integrate_boundary(const StarCurve& curve, const Vec& f) {
  if (f.size() != curve.n_theta())
    throw std::invalid_argument("boundary data grid size does not match curve");
  return f.cwiseProduct(curve.measure()).sum() * (2.0 * M_PI / curve.n_theta());
}

double integrate_boundary(const StarCurve& curve, const BoundaryScalar& f) {
  return integrate_boundary(curve, f.values);
}

double boundary_norm(const StarCurve& curve, const BoundaryScalar& f, double r) {
  check_same_grid(curve, f);
  if (r < -4.0 || r > 4.0)
    throw std::invalid_argument("boundary_norm: order r outside [-4, 4]");
  const int n = curve.n_theta();
  Vec fs = curve.to_arclength_grid(f.values);
  CVec spec = fourier::to_spectrum(fs);
  double L = curve.arclength();
  double norm2 = 0.0;
  for (int i = 0; i < n; ++i) {
    int k = fourier::wavenumber(i, n);
    double lam = std::pow(2.0 * M_PI * k / L, 2);
    norm2 += std::pow(1.0 + lam, r) * std::norm(spec[i]);
  }
  return std::sqrt(L * norm2);
}

BoundaryScalar sqrt_minus_laplacian(const StarCurve& curve, const BoundaryScalar& f) {
  check_same_grid(curve, f);
  const int n = curve.n_theta();
  Vec fs = curve.to_arclength_grid(f.values);
  CVec spec = fourier::to_spectrum(fs);
  double L = curve.arclength();
  for (int i = 0; i < n; ++i) {
    int k = fourier::wavenumber(i, n);
    spec[i] *= std::abs(2.0 * M_PI * k / L);
  }
  return BoundaryScalar(curve.from_arclength_grid(fourier::to_grid(spec)), f.tag);
}

} // namespace capeuler
