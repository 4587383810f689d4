#include "capeuler/spectral_domain.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace capeuler {

namespace {

constexpr double kSolveTol = 1e-11;
constexpr int kMaxGmres = 250;

bool curve_is_circle(const StarCurve& c) {
  const CVec& m = c.rho_modes();
  double r0 = std::abs(m[0]);
  double off = 0.0;
  for (int i = 1; i < c.n_theta(); ++i) off = std::max(off, std::abs(m[i]));
  return off < 1e-13 * std::max(r0, 1.0);
}

using LuVec = std::vector<Eigen::PartialPivLU<Mat>>;

// per-mode operator on radial nodes: diag(qb^2/h^2) D2 + diag(qb/h) D - k^2 I
// with Dirichlet rows at the boundary nodes. For the disk map qb = s, h = 1.
std::shared_ptr<const LuVec> build_mode_lus(const Vec& qb, double h, const Mat& D,
                                            const Mat& D2, int n_modes,
                                            bool two_boundaries) {
  auto lus = std::make_shared<LuVec>();
  const int nr = static_cast<int>(qb.size());
  Mat base = (qb.array().square() / (h * h)).matrix().asDiagonal() * D2 +
             (qb.array() / h).matrix().asDiagonal() * D;
  for (int k = 0; k <= n_modes; ++k) {
    Mat A = base;
    A.diagonal().array() -= static_cast<double>(k) * k;
    A.row(0).setZero();
    A(0, 0) = 1.0;
    if (two_boundaries) {
      A.row(nr - 1).setZero();
      A(nr - 1, nr - 1) = 1.0;
    }
    lus->emplace_back(A);
  }
  return lus;
}

// disk preconditioner is shape independent; cache it per grid size
std::shared_ptr<const LuVec> disk_mode_lus(const Vec& s, const Mat& D, const Mat& D2,
                                           int n_theta) {
  static std::map<std::pair<int, int>, std::shared_ptr<const LuVec>> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto key = std::make_pair(static_cast<int>(s.size()), n_theta);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto lus = build_mode_lus(s, 1.0, D, D2, n_theta / 2, false);
  cache[key] = lus;
  return lus;
}

} // namespace

DomainPtr SpectralDomain::make_disk(const StarCurve& curve, int n_r) {
  if (n_r < 4) throw std::invalid_argument("n_r too small");
  auto d = std::shared_ptr<SpectralDomain>(new SpectralDomain());
  d->outer_ = curve;
  d->n_theta_ = curve.n_theta();
  d->n_r_ = n_r;
  Vec s_full = chebyshev::lobatto01(n_r); // n_r+1 nodes incl 0
  d->s_ = s_full.head(n_r);               // drop the center node
  d->Ds_ = chebyshev::differentiation_matrix(d->s_);
  d->Ds2_ = d->Ds_ * d->Ds_;
  d->wq_ = chebyshev::quadrature_weights01(d->s_);
  d->mode_lu_ = disk_mode_lus(d->s_, d->Ds_, d->Ds2_, d->n_theta_);
  d->decoupled_ = curve_is_circle(curve);

  const Vec& rho = curve.rho();
  const Vec& drho = curve.drho();
  d->q_ = d->s_ * rho.transpose();
  d->qs_ = Vec::Ones(n_r) * rho.transpose();
  d->qth_ = d->s_ * drho.transpose();
  d->init_common();
  return d;
}

DomainPtr SpectralDomain::make_annulus(const AnnulusShape& shape, int n_r) {
  if (n_r < 4) throw std::invalid_argument("n_r too small");
  auto d = std::shared_ptr<SpectralDomain>(new SpectralDomain());
  d->outer_ = shape.outer;
  d->inner_ = shape.inner;
  d->n_theta_ = shape.outer.n_theta();
  d->n_r_ = n_r;
  d->s_ = chebyshev::lobatto01(n_r - 1); // n_r nodes incl both boundaries
  d->Ds_ = chebyshev::differentiation_matrix(d->s_);
  d->Ds2_ = d->Ds_ * d->Ds_;
  d->wq_ = chebyshev::quadrature_weights01(d->s_);

  const Vec& r1 = shape.inner.rho();
  const Vec& r2 = shape.outer.rho();
  double r1b = r1.mean(), r2b = r2.mean();
  Vec qb = (r1b + (r2b - r1b) * d->s_.array()).matrix();
  d->mode_lu_ = build_mode_lus(qb, r2b - r1b, d->Ds_, d->Ds2_, d->n_theta_ / 2, true);
  d->decoupled_ = curve_is_circle(shape.inner) && curve_is_circle(shape.outer);

  Vec gap = r2 - r1;
  d->q_ = Vec::Ones(n_r) * r1.transpose() + d->s_ * gap.transpose();
  d->qs_ = Vec::Ones(n_r) * gap.transpose();
  d->qth_ = Vec::Ones(n_r) * shape.inner.drho().transpose() +
            d->s_ * (shape.outer.drho() - shape.inner.drho()).transpose();
  d->init_common();
  return d;
}

void SpectralDomain::init_common() {
  if (q_.minCoeff() <= 0.0 || qs_.minCoeff() <= 0.0)
    throw std::runtime_error("degenerate radial map (non-positive Jacobian)");
  beta_ = qth_.cwiseQuotient(qs_);
  jac_ = q_.cwiseProduct(qs_);
  geom_outer_ = fluid_geometry(outer_, BoundaryTag::outer);
  if (inner_) geom_inner_ = fluid_geometry(*inner_, BoundaryTag::inner);

  const Vec& th = outer_.theta();
  er_x_.resize(n_r_, n_theta_);
  er_y_.resize(n_r_, n_theta_);
  et_x_.resize(n_r_, n_theta_);
  et_y_.resize(n_r_, n_theta_);
  X_.resize(n_r_, n_theta_);
  Y_.resize(n_r_, n_theta_);
  const Eigen::Vector2d c = outer_.center();
  for (int j = 0; j < n_theta_; ++j) {
    double cth = std::cos(th[j]), sth = std::sin(th[j]);
    for (int i = 0; i < n_r_; ++i) {
      er_x_(i, j) = cth;
      er_y_(i, j) = sth;
      et_x_(i, j) = -sth;
      et_y_(i, j) = cth;
      X_(i, j) = c.x() + q_(i, j) * cth;
      Y_(i, j) = c.y() + q_(i, j) * sth;
    }
  }
}

const StarCurve& SpectralDomain::inner_curve() const {
  if (!inner_) throw std::logic_error("disk domain has no inner boundary");
  return *inner_;
}

const GeometryReport& SpectralDomain::inner_geometry() const {
  if (!inner_) throw std::logic_error("disk domain has no inner boundary");
  return geom_inner_;
}

InteriorField SpectralDomain::zero_field() const {
  return InteriorField(shared_from_this(), Mat::Zero(n_r_, n_theta_));
}

InteriorField SpectralDomain::constant_field(double c) const {
  return InteriorField(shared_from_this(), Mat::Constant(n_r_, n_theta_, c));
}

InteriorField SpectralDomain::sample(const std::function<double(double, double)>& f) const {
  Mat v(n_r_, n_theta_);
  for (int j = 0; j < n_theta_; ++j)
    for (int i = 0; i < n_r_; ++i) v(i, j) = f(X_(i, j), Y_(i, j));
  return InteriorField(shared_from_this(), std::move(v));
}

Vec SpectralDomain::grid_x(int row) const { return X_.row(row).transpose(); }
Vec SpectralDomain::grid_y(int row) const { return Y_.row(row).transpose(); }

void SpectralDomain::check_field(const InteriorField& u) const {
  if (u.domain.get() != this)
    throw std::invalid_argument("field belongs to a different domain");
  if (u.values.rows() != n_r_ || u.values.cols() != n_theta_)
    throw std::invalid_argument("field grid size mismatch");
}

// ---------- core operators ----------

namespace {

Mat theta_derivative(const Mat& U) {
  Mat out;
  fourier::derivative_rows(U, out, 1);
  return out;
}

} // namespace

Mat SpectralDomain::apply_scaled_laplacian(const Mat& u) const {
  Mat us = Ds_ * u;
  Mat uss = Ds2_ * u;
  Mat t12 = q_.cwiseProduct(q_).cwiseQuotient(qs_.cwiseProduct(qs_)).cwiseProduct(uss) +
            q_.cwiseQuotient(qs_).cwiseProduct(us);
  Mat w = theta_derivative(u) - beta_.cwiseProduct(us);
  Mat t3 = theta_derivative(w) - beta_.cwiseProduct(Ds_ * w);
  return t12 + t3;
}

Mat SpectralDomain::apply_mode_preconditioner(const Mat& r) const {
  const int n = n_theta_;
  CMat rh;
  fourier::spectrum_rows(r, rh);
  CMat uh(n_r_, n);
  const LuVec& lus = *mode_lu_;
  Mat rhs2(n_r_, 2), sol2(n_r_, 2);
  // real input: negative modes are conjugates of positive ones
  for (int col = 0; col <= n / 2; ++col) {
    int k = std::abs(fourier::wavenumber(col, n));
    rhs2.col(0) = rh.col(col).real();
    rhs2.col(1) = rh.col(col).imag();
    sol2.noalias() = lus[k].solve(rhs2);
    for (int i = 0; i < n_r_; ++i) uh(i, col) = Complex(sol2(i, 0), sol2(i, 1));
    if (col != 0 && col != n / 2) {
      for (int i = 0; i < n_r_; ++i)
        uh(i, n - col) = Complex(sol2(i, 0), -sol2(i, 1));
    }
  }
  Mat out;
  fourier::grid_rows(uh, out);
  return out;
}

Mat SpectralDomain::solve_dirichlet(const Mat* rhs, const Vec* bc_outer,
                                    const Vec* bc_inner, SolveReport* rep) const {
  const bool annulus = is_annulus();
  if (annulus && bc_inner == nullptr)
    throw std::invalid_argument("annulus solve needs data on both boundaries");
  if (!annulus && bc_inner != nullptr)
    throw std::invalid_argument("disk solve takes a single boundary trace");

  Mat b = Mat::Zero(n_r_, n_theta_);
  if (rhs) b = q_.cwiseProduct(q_).cwiseProduct(*rhs);
  if (bc_outer) b.row(0) = bc_outer->transpose();
  else b.row(0).setZero();
  if (annulus) {
    if (bc_inner) b.row(n_r_ - 1) = bc_inner->transpose();
    else b.row(n_r_ - 1).setZero();
  }

  auto apply_a = [&](const Mat& u) {
    Mat r = apply_scaled_laplacian(u);
    r.row(0) = u.row(0);
    if (annulus) r.row(n_r_ - 1) = u.row(n_r_ - 1);
    return r;
  };

  Mat x = apply_mode_preconditioner(b);
  if (decoupled_) {
    if (rep) { rep->iterations = 0; rep->rel_residual = 0.0; }
    return x;
  }

  double bnorm = x.norm();
  if (bnorm == 0.0) {
    if (rep) { rep->iterations = 0; rep->rel_residual = 0.0; }
    return x;
  }
  Mat r0 = apply_mode_preconditioner(b - apply_a(x));
  double beta0 = r0.norm();
  if (beta0 / bnorm < kSolveTol) {
    if (rep) { rep->iterations = 0; rep->rel_residual = beta0 / bnorm; }
    return x;
  }

  // GMRES on the preconditioned system
  std::vector<Mat> basis;
  basis.push_back(r0 / beta0);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(kMaxGmres + 1, kMaxGmres);
  Eigen::VectorXd y;
  double relres = beta0 / bnorm;
  int j = 0;
  for (; j < kMaxGmres; ++j) {
    Mat w = apply_mode_preconditioner(apply_a(basis[j]));
    for (int i = 0; i <= j; ++i) {
      H(i, j) = (basis[i].array() * w.array()).sum();
      w -= H(i, j) * basis[i];
    }
    H(j + 1, j) = w.norm();
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(j + 2);
    e1[0] = beta0;
    y = H.block(0, 0, j + 2, j + 1).colPivHouseholderQr().solve(e1);
    relres = (H.block(0, 0, j + 2, j + 1) * y - e1).norm() / bnorm;
    if (relres < kSolveTol || H(j + 1, j) < 1e-300) { ++j; break; }
    basis.push_back(w / H(j + 1, j));
  }
  for (int i = 0; i < std::min<int>(j, static_cast<int>(y.size())); ++i)
    x += y[i] * basis[i];
  if (rep) { rep->iterations = j; rep->rel_residual = relres; }
  if (relres > 1e-8)
    throw std::runtime_error("elliptic solve failed to converge (rel residual " +
                             std::to_string(relres) + ")");
  return x;
}

InteriorField SpectralDomain::harmonic_extension(const BoundaryScalar& f,
                                                 SolveReport* rep) const {
  if (is_annulus())
    throw std::invalid_argument("annulus harmonic extension needs both traces");
  if (f.size() != n_theta_) throw std::invalid_argument("trace grid mismatch");
  Mat u = solve_dirichlet(nullptr, &f.values, nullptr, rep);
  return InteriorField(shared_from_this(), std::move(u));
}

InteriorField SpectralDomain::harmonic_extension2(const BoundaryScalar& f_outer,
                                                  const BoundaryScalar& f_inner,
                                                  SolveReport* rep) const {
  if (!is_annulus()) throw std::invalid_argument("disk takes a single trace");
  if (f_outer.size() != n_theta_ || f_inner.size() != n_theta_)
    throw std::invalid_argument("trace grid mismatch");
  Mat u = solve_dirichlet(nullptr, &f_outer.values, &f_inner.values, rep);
  return InteriorField(shared_from_this(), std::move(u));
}

InteriorField SpectralDomain::poisson_zero_dirichlet(const InteriorField& g,
                                                     SolveReport* rep) const {
  check_field(g);
  Vec zero = Vec::Zero(n_theta_);
  Mat u = is_annulus() ? solve_dirichlet(&g.values, &zero, &zero, rep)
                       : solve_dirichlet(&g.values, &zero, nullptr, rep);
  return InteriorField(shared_from_this(), std::move(u));
}

BoundaryScalar SpectralDomain::dirichlet_neumann(const BoundaryScalar& f,
                                                 SolveReport* rep) const {
  InteriorField u = harmonic_extension(f, rep);
  return normal_derivative(u, BoundaryTag::outer);
}

std::pair<BoundaryScalar, BoundaryScalar>
SpectralDomain::dirichlet_neumann2(const BoundaryScalar& f_outer,
                                   const BoundaryScalar& f_inner,
                                   SolveReport* rep) const {
  InteriorField u = harmonic_extension2(f_outer, f_inner, rep);
  return {normal_derivative(u, BoundaryTag::outer),
          normal_derivative(u, BoundaryTag::inner)};
}

BoundaryScalar SpectralDomain::dn_inverse(const BoundaryScalar& g,
                                          SolveReport* rep) const {
  if (is_annulus())
    throw std::invalid_argument("dn_inverse implemented for single curves");
  if (g.size() != n_theta_) throw std::invalid_argument("trace grid mismatch");
  double mean = integrate_boundary(outer_, g);
  double gnorm = std::sqrt(integrate_boundary(outer_, Vec(g.values.array().square().matrix())));
  if (std::abs(mean) > 1e-8 * std::max(gnorm, 1e-300))
    throw std::invalid_argument("not in the range of N: trace has nonzero mean");

  double rbar = outer_.rho().mean();
  auto precond = [&](const Vec& r) {
    CVec spec = fourier::to_spectrum(r);
    for (int i = 0; i < n_theta_; ++i) {
      int k = std::abs(fourier::wavenumber(i, n_theta_));
      spec[i] = (k == 0) ? Complex(0.0) : spec[i] * (rbar / k);
    }
    return fourier::to_grid(spec);
  };
  auto apply = [&](const Vec& phi) {
    BoundaryScalar b(phi, BoundaryTag::single);
    return dirichlet_neumann(b).values;
  };

  // boundary-space GMRES on the preconditioned normal equation-free system
  Vec b = precond(g.values);
  double bnorm = b.norm();
  Vec x = b;
  Vec r0 = precond(g.values - apply(x));
  double beta0 = r0.norm();
  int iters = 0;
  if (beta0 > 1e-13 * std::max(bnorm, 1e-300)) {
    const int m = 120;
    std::vector<Vec> basis{r0 / beta0};
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
    Eigen::VectorXd y;
    int j = 0;
    for (; j < m; ++j) {
      Vec w = precond(apply(basis[j]));
      for (int i = 0; i <= j; ++i) {
        H(i, j) = basis[i].dot(w);
        w -= H(i, j) * basis[i];
      }
      H(j + 1, j) = w.norm();
      Eigen::VectorXd e1 = Eigen::VectorXd::Zero(j + 2);
      e1[0] = beta0;
      y = H.block(0, 0, j + 2, j + 1).colPivHouseholderQr().solve(e1);
      double relres = (H.block(0, 0, j + 2, j + 1) * y - e1).norm() /
                      std::max(bnorm, 1e-300);
      if (relres < 1e-12 || H(j + 1, j) < 1e-300) { ++j; break; }
      basis.push_back(w / H(j + 1, j));
    }
    for (int i = 0; i < std::min<int>(j, static_cast<int>(y.size())); ++i)
      x += y[i] * basis[i];
    iters = j;
  }
  if (rep) { rep->iterations = iters; rep->rel_residual = 0.0; }
  // gauge: zero boundary mean
  double c = integrate_boundary(outer_, x) / outer_.arclength();
  return BoundaryScalar((x.array() - c).matrix(), BoundaryTag::single);
}

// ---------- calculus ----------

InteriorField SpectralDomain::dtheta(const InteriorField& u) const {
  check_field(u);
  return InteriorField(shared_from_this(), theta_derivative(u.values));
}

InteriorField SpectralDomain::ds(const InteriorField& u) const {
  check_field(u);
  return InteriorField(shared_from_this(), Ds_ * u.values);
}

std::pair<InteriorField, InteriorField>
SpectralDomain::gradient(const InteriorField& u) const {
  check_field(u);
  Mat us = Ds_ * u.values;
  Mat uq = us.cwiseQuotient(qs_);
  Mat uthp = theta_derivative(u.values) - beta_.cwiseProduct(us);
  Mat ang = uthp.cwiseQuotient(q_);
  Mat gx = uq.cwiseProduct(er_x_) + ang.cwiseProduct(et_x_);
  Mat gy = uq.cwiseProduct(er_y_) + ang.cwiseProduct(et_y_);
  return {InteriorField(shared_from_this(), std::move(gx)),
          InteriorField(shared_from_this(), std::move(gy))};
}

InteriorField SpectralDomain::dx(const InteriorField& u) const {
  return gradient(u).first;
}

InteriorField SpectralDomain::dy(const InteriorField& u) const {
  return gradient(u).second;
}

InteriorField SpectralDomain::laplacian(const InteriorField& u) const {
  check_field(u);
  Mat s = apply_scaled_laplacian(u.values);
  return InteriorField(shared_from_this(),
                       s.cwiseQuotient(q_.cwiseProduct(q_)));
}

// ---------- traces ----------

BoundaryScalar SpectralDomain::trace_outer(const InteriorField& u) const {
  check_field(u);
  return BoundaryScalar(u.values.row(0).transpose(),
                        is_annulus() ? BoundaryTag::outer : BoundaryTag::single);
}

BoundaryScalar SpectralDomain::trace_inner(const InteriorField& u) const {
  check_field(u);
  if (!is_annulus()) throw std::logic_error("disk domain has no inner boundary");
  return BoundaryScalar(u.values.row(n_r_ - 1).transpose(), BoundaryTag::inner);
}

BoundaryScalar SpectralDomain::normal_derivative(const InteriorField& u,
                                                 BoundaryTag which) const {
  check_field(u);
  auto [gx, gy] = gradient(u);
  if (which == BoundaryTag::inner) {
    if (!is_annulus()) throw std::logic_error("disk domain has no inner boundary");
    const GeometryReport& g = geom_inner_;
    Vec out = gx.values.row(n_r_ - 1).transpose().cwiseProduct(g.nx) +
              gy.values.row(n_r_ - 1).transpose().cwiseProduct(g.ny);
    return BoundaryScalar(out, BoundaryTag::inner);
  }
  const GeometryReport& g = geom_outer_;
  Vec out = gx.values.row(0).transpose().cwiseProduct(g.nx) +
            gy.values.row(0).transpose().cwiseProduct(g.ny);
  return BoundaryScalar(out, is_annulus() ? BoundaryTag::outer : BoundaryTag::single);
}

// ---------- quadrature ----------

double SpectralDomain::integrate(const InteriorField& u) const {
  check_field(u);
  double acc = 0.0;
  for (int j = 0; j < n_theta_; ++j)
    acc += wq_.dot(jac_.col(j).cwiseProduct(u.values.col(j)));
  return acc * (2.0 * M_PI / n_theta_);
}

double SpectralDomain::inner_product(const InteriorField& u, const InteriorField& v) const {
  check_field(u);
  check_field(v);
  InteriorField p(u.domain, u.values.cwiseProduct(v.values));
  return integrate(p);
}

double SpectralDomain::l2_norm(const InteriorField& u) const {
  return std::sqrt(std::max(0.0, inner_product(u, u)));
}

double SpectralDomain::hm_norm(const InteriorField& u, int m) const {
  check_field(u);
  double acc = 0.0;
  std::vector<InteriorField> level{u};
  for (int l = 0; l <= m; ++l) {
    for (const auto& f : level) acc += inner_product(f, f);
    if (l == m) break;
    std::vector<InteriorField> next;
    next.reserve(level.size() * 2);
    for (const auto& f : level) {
      auto [fx, fy] = gradient(f);
      next.push_back(std::move(fx));
      next.push_back(std::move(fy));
    }
    level = std::move(next);
  }
  return std::sqrt(acc);
}

double SpectralDomain::area() const {
  double acc = 0.0;
  for (int j = 0; j < n_theta_; ++j) acc += wq_.dot(jac_.col(j));
  return acc * (2.0 * M_PI / n_theta_);
}

double SpectralDomain::eval_field(const InteriorField& u, double x, double y) const {
  check_field(u);
  const Eigen::Vector2d c = outer_.center();
  double dxp = x - c.x(), dyp = y - c.y();
  double th = std::atan2(dyp, dxp);
  if (th < 0) th += 2.0 * M_PI;
  double q = std::hypot(dxp, dyp);
  double ro = fourier::eval(outer_.rho_modes(), th);
  double s;
  if (is_annulus()) {
    double ri = fourier::eval(inner_->rho_modes(), th);
    s = (q - ri) / (ro - ri);
  } else {
    s = q / ro;
  }
  if (s < -1e-9 || s > 1.0 + 1e-9)
    throw std::invalid_argument("eval_field: point outside the domain");
  s = std::clamp(s, 0.0, 1.0);
  // Fourier interpolation of every radial row at th, then radial barycentric
  Vec col(n_r_);
  for (int i = 0; i < n_r_; ++i) {
    Vec row = u.values.row(i).transpose();
    col[i] = fourier::eval(fourier::to_spectrum(row), th);
  }
  Vec bw = chebyshev::barycentric_weights(s_);
  return chebyshev::barycentric_eval(s_, bw, col, s);
}

std::pair<BoundaryScalar, BoundaryScalar>
SpectralDomain::dn_inverse2(const BoundaryScalar& g_outer,
                            const BoundaryScalar& g_inner, SolveReport* rep) const {
  if (!is_annulus()) throw std::invalid_argument("dn_inverse2 needs an annulus");
  if (g_outer.size() != n_theta_ || g_inner.size() != n_theta_)
    throw std::invalid_argument("trace grid mismatch");
  double flux_out = integrate_boundary(outer_, g_outer);
  double flux_in = integrate_boundary(*inner_, g_inner);
  double gsz = g_outer.values.norm() + g_inner.values.norm();
  if (std::abs(flux_out + flux_in) > 1e-7 * std::max(gsz, 1e-300))
    throw std::invalid_argument("not in the range of N: net flux mismatch");

  const double r1 = inner_->rho().mean(), r2 = outer_.rho().mean();
  // per-mode 2x2 circle-annulus DN symbol (fluid-outward normals)
  auto precond = [&](const Vec& go, const Vec& gi) {
    CVec so = fourier::to_spectrum(go), si = fourier::to_spectrum(gi);
    CVec fo = CVec::Zero(n_theta_), fi = CVec::Zero(n_theta_);
    for (int idx = 0; idx < n_theta_; ++idx) {
      int k = std::abs(fourier::wavenumber(idx, n_theta_));
      if (k == 0) {
        Complex b = 0.5 * (r2 * so[idx] - r1 * si[idx]); // log-mode coefficient
        fo[idx] = b * std::log(r2);
        fi[idx] = b * std::log(r1);
        continue;
      }
      // traces (f2,f1) = T (a,b), normal derivs (g2,g1) = G (a,b)
      Eigen::Matrix2d T, G;
      double p2 = std::pow(r2, k), m2 = std::pow(r2, -k);
      double p1 = std::pow(r1, k), m1 = std::pow(r1, -k);
      T << p2, m2, p1, m1;
      G << k * p2 / r2, -k * m2 / r2, -k * p1 / r1, k * m1 / r1;
      Eigen::Matrix2d M = T * G.inverse(); // maps (g2,g1) -> (f2,f1)
      Eigen::Vector2cd gv(so[idx], si[idx]);
      Eigen::Vector2cd fv = M.cast<Complex>() * gv;
      fo[idx] = fv[0];
      fi[idx] = fv[1];
    }
    return std::make_pair(fourier::to_grid(fo), fourier::to_grid(fi));
  };
  auto apply = [&](const Vec& po, const Vec& pi) {
    auto [no, ni] = dirichlet_neumann2(BoundaryScalar(po, BoundaryTag::outer),
                                       BoundaryScalar(pi, BoundaryTag::inner));
    return std::make_pair(no.values, ni.values);
  };

  // GMRES on the stacked boundary vector
  auto pack = [&](const Vec& a, const Vec& b) {
    Vec v(2 * n_theta_);
    v << a, b;
    return v;
  };
  auto unpack = [&](const Vec& v) {
    return std::make_pair(Vec(v.head(n_theta_)), Vec(v.tail(n_theta_)));
  };
  auto op = [&](const Vec& v) {
    auto [po, pi] = unpack(v);
    auto [ao, ai] = apply(po, pi);
    auto [mo, mi] = precond(ao, ai);
    return pack(mo, mi);
  };
  auto [b0o, b0i] = precond(g_outer.values, g_inner.values);
  Vec b = pack(b0o, b0i);
  Vec x = b;
  Vec r0 = b - op(x);
  double beta0 = r0.norm(), bnorm = std::max(b.norm(), 1e-300);
  int its = 0;
  if (beta0 / bnorm > 1e-13) {
    const int m = 150;
    std::vector<Vec> basis{r0 / beta0};
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
    Eigen::VectorXd y;
    int j = 0;
    for (; j < m; ++j) {
      Vec w = op(basis[j]);
      for (int i = 0; i <= j; ++i) {
        H(i, j) = basis[i].dot(w);
        w -= H(i, j) * basis[i];
      }
      H(j + 1, j) = w.norm();
      Eigen::VectorXd e1 = Eigen::VectorXd::Zero(j + 2);
      e1[0] = beta0;
      y = H.block(0, 0, j + 2, j + 1).colPivHouseholderQr().solve(e1);
      double relres = (H.block(0, 0, j + 2, j + 1) * y - e1).norm() / bnorm;
      if (relres < 1e-12 || H(j + 1, j) < 1e-300) { ++j; break; }
      basis.push_back(w / H(j + 1, j));
    }
    for (int i = 0; i < std::min<int>(j, static_cast<int>(y.size())); ++i)
      x += y[i] * basis[i];
    its = j;
  }
  if (rep) { rep->iterations = its; rep->rel_residual = 0.0; }
  auto [xo, xi] = unpack(x);
  double mean = (integrate_boundary(outer_, xo) + integrate_boundary(*inner_, xi)) /
                (outer_.arclength() + inner_->arclength());
  return {BoundaryScalar((xo.array() - mean).matrix(), BoundaryTag::outer),
          BoundaryScalar((xi.array() - mean).matrix(), BoundaryTag::inner)};
}

} // namespace capeuler
