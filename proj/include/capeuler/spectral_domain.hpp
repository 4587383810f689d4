#pragma once

#include "capeuler/chebyshev.hpp"
#include "capeuler/star_curve.hpp"

#include <functional>
#include <memory>
#include <optional>

// Collocation discretization of star-shaped disks and annuli on a mapped
// Fourier(theta) x Chebyshev(s) grid, with the Laplace solvers behind the
// harmonic extension, zero-Dirichlet inverse Laplacian and Dirichlet-Neumann
// operators.
//
// Disk map:    x = c + s rho(theta) e_r(theta),  s on (0,1] (no center node)
// Annulus map: x = c + [rho1 + s (rho2 - rho1)] e_r(theta),  s on [0,1]
//
// Row 0 of interior fields is the outer boundary (s = 1); for annuli the last
// row is the inner boundary (s = 0). Solves collocate the scaled equation
// q^2 Lap u = q^2 f; circular maps decouple per angular mode and are solved
// directly, general maps run GMRES preconditioned by the mean-radius circle
// operator.

namespace capeuler {

class SpectralDomain;
using DomainPtr = std::shared_ptr<const SpectralDomain>;

struct InteriorField {
  DomainPtr domain;
  Mat values; // n_r x n_theta

  InteriorField() = default;
  InteriorField(DomainPtr d, Mat v) : domain(std::move(d)), values(std::move(v)) {}
};

struct SolveReport {
  int iterations = 0;
  double rel_residual = 0.0;
};

class SpectralDomain : public std::enable_shared_from_this<SpectralDomain> {
 public:
  static DomainPtr make_disk(const StarCurve& curve, int n_r);
  static DomainPtr make_annulus(const AnnulusShape& shape, int n_r);

  bool is_annulus() const { return inner_.has_value(); }
  int n_r() const { return n_r_; }
  int n_theta() const { return n_theta_; }
  const StarCurve& outer_curve() const { return outer_; }
  const StarCurve& inner_curve() const;
  const GeometryReport& outer_geometry() const { return geom_outer_; }
  const GeometryReport& inner_geometry() const; // fluid-side convention

  const Vec& s_nodes() const { return s_; }
  const Mat& map_radius() const { return q_; } // q(s,theta), distance to center
  const Vec& theta() const { return outer_.theta(); }

  InteriorField zero_field() const;
  InteriorField constant_field(double c) const;
  // sample a closure f(x, y) on the collocation grid
  InteriorField sample(const std::function<double(double, double)>& f) const;
  Vec grid_x(int row) const; // physical coordinates of one radial row
  Vec grid_y(int row) const;
  const Mat& X() const { return X_; }
  const Mat& Y() const { return Y_; }

  // --- solvers ---
  InteriorField harmonic_extension(const BoundaryScalar& f,
                                   SolveReport* rep = nullptr) const;
  InteriorField harmonic_extension2(const BoundaryScalar& f_outer,
                                    const BoundaryScalar& f_inner,
                                    SolveReport* rep = nullptr) const;
  InteriorField poisson_zero_dirichlet(const InteriorField& g,
                                       SolveReport* rep = nullptr) const;
  BoundaryScalar dirichlet_neumann(const BoundaryScalar& f,
                                   SolveReport* rep = nullptr) const;
  // annulus: traces on both boundaries -> normal derivatives on both,
  // fluid-outward convention
  std::pair<BoundaryScalar, BoundaryScalar>
  dirichlet_neumann2(const BoundaryScalar& f_outer, const BoundaryScalar& f_inner,
                     SolveReport* rep = nullptr) const;
  // zero-mean g -> zero-mean trace with N(result) = g (single curve only)
  BoundaryScalar dn_inverse(const BoundaryScalar& g, SolveReport* rep = nullptr) const;

  // --- calculus on fields ---
  InteriorField dtheta(const InteriorField& u) const;
  InteriorField ds(const InteriorField& u) const;
  std::pair<InteriorField, InteriorField> gradient(const InteriorField& u) const;
  InteriorField dx(const InteriorField& u) const;
  InteriorField dy(const InteriorField& u) const;
  InteriorField laplacian(const InteriorField& u) const;

  // --- traces ---
  BoundaryScalar trace_outer(const InteriorField& u) const;
  BoundaryScalar trace_inner(const InteriorField& u) const;
  // normal derivative with fluid-outward normal on the given boundary
  BoundaryScalar normal_derivative(const InteriorField& u,
                                   BoundaryTag which = BoundaryTag::outer) const;

  // --- quadrature and norms ---
  double integrate(const InteriorField& u) const;
  double inner_product(const InteriorField& u, const InteriorField& v) const;
  double l2_norm(const InteriorField& u) const;
  // integer-order Sobolev norm via repeated spectral gradients
  double hm_norm(const InteriorField& u, int m) const;
  double area() const;

  void check_field(const InteriorField& u) const;

  // interpolate a field at an arbitrary interior point
  double eval_field(const InteriorField& u, double x, double y) const;

  // two-boundary inverse of the annulus Dirichlet-Neumann map; data must
  // satisfy the total-flux solvability condition. Gauge: zero combined mean.
  std::pair<BoundaryScalar, BoundaryScalar>
  dn_inverse2(const BoundaryScalar& g_outer, const BoundaryScalar& g_inner,
              SolveReport* rep = nullptr) const;

  // raw Dirichlet solve of Lap u = rhs (rhs may be empty for harmonic)
  Mat solve_dirichlet(const Mat* rhs, const Vec* bc_outer, const Vec* bc_inner,
                      SolveReport* rep) const;

 private:
  SpectralDomain() = default;
  void init_common();
  Mat apply_scaled_laplacian(const Mat& u) const;
  Mat apply_mode_preconditioner(const Mat& r) const;

  StarCurve outer_{Eigen::Vector2d::Zero(), CVec::Unit(4, 0)};
  std::optional<StarCurve> inner_;
  GeometryReport geom_outer_, geom_inner_;
  int n_r_ = 0, n_theta_ = 0;

  Vec s_;            // radial nodes, s[0] = 1
  Mat Ds_, Ds2_;     // radial differentiation
  Vec wq_;           // radial quadrature weights on [0,1]
  Mat q_, qs_, qth_, beta_;
  Mat X_, Y_;        // physical coordinates
  Mat er_x_, er_y_, et_x_, et_y_; // polar frame per column (broadcast rows)
  Mat jac_;          // area element q * q_s

  // per-mode circle-preconditioner factorizations, k = 0..n/2
  std::shared_ptr<const std::vector<Eigen::PartialPivLU<Mat>>> mode_lu_;
  bool decoupled_ = false; // map is theta-independent: preconditioner is exact
};

} // namespace capeuler
