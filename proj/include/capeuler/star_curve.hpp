#pragma once

#include "capeuler/fourier.hpp"

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

// Moving boundaries as spectral star-shaped curves and their intrinsic
// geometry: normal, tangent, curvature, surface measure, surface Laplacian,
// boundary Sobolev norms, boundary integration.

namespace capeuler {

enum class BoundaryTag { single, inner, outer };

struct BoundaryScalar {
  Vec values;                        // samples on the owning curve's theta grid
  BoundaryTag tag = BoundaryTag::single;

  BoundaryScalar() = default;
  explicit BoundaryScalar(Vec v, BoundaryTag t = BoundaryTag::single)
      : values(std::move(v)), tag(t) {}
  int size() const { return static_cast<int>(values.size()); }
  CVec spectrum() const { return fourier::to_spectrum(values); }
};

// Geometry of one closed curve, oriented with N pointing away from the
// enclosed region (kappa = +1/R on a circle of radius R).
struct GeometryReport {
  Vec nx, ny;          // outward unit normal
  Vec tx, ty;          // unit tangent (counterclockwise)
  Vec kappa;           // signed curvature
  Vec second_form;     // Pi; equals kappa in 2D
  Vec measure;         // dS/dtheta = sqrt(rho^2 + rho'^2)
  double arclength = 0.0;
  bool resolved = true;
};

class StarCurve {
 public:
  // mode_list entries (k, a) contribute a*cos(k theta) to rho
  StarCurve(const Eigen::Vector2d& center, const CVec& rho_modes);

  const Eigen::Vector2d& center() const { return center_; }
  const CVec& rho_modes() const { return rho_modes_; }
  int n_theta() const { return n_; }

  const Vec& theta() const { return theta_; }
  const Vec& rho() const { return rho_; }
  const Vec& drho() const { return drho_; }
  const Vec& d2rho() const { return d2rho_; }
  const Vec& measure() const { return w_; }       // sqrt(rho^2 + rho'^2)
  double arclength() const { return length_; }
  bool resolved() const { return resolved_; }

  // boundary points in the plane
  Vec x() const;
  Vec y() const;

  // curve with the theta origin shifted by alpha: rho_new(t) = rho(t + alpha)
  StarCurve rotated(double alpha) const;

  // uniform-arclength resampling of boundary data (trig interpolation at the
  // N arclength-equispaced parameter values); the resampling map is computed
  // lazily since only the norm machinery needs it
  const Vec& arclength_nodes() const;
  Vec to_arclength_grid(const Vec& f_theta) const;
  Vec from_arclength_grid(const Vec& f_sigma) const;

 private:
  struct ArcCache;
  const ArcCache& arc() const;

  Eigen::Vector2d center_;
  CVec rho_modes_;
  int n_ = 0;
  Vec theta_, rho_, drho_, d2rho_, w_;
  double length_ = 0.0;
  bool resolved_ = true;
  mutable std::shared_ptr<ArcCache> arc_; // shared across copies
};

struct AnnulusShape {
  StarCurve inner;
  StarCurve outer;
  AnnulusShape(StarCurve in, StarCurve out);
};

StarCurve make_star_curve(const std::vector<std::pair<int, double>>& mode_list,
                          double base_radius, int n_theta,
                          const Eigen::Vector2d& center = Eigen::Vector2d::Zero());

StarCurve make_ellipse(double a, double b, int n_theta);

// geometry with N pointing away from the enclosed region
GeometryReport geometry(const StarCurve& curve);

// fluid-side geometry: for the inner boundary of an annulus the fluid's
// outward normal points toward the center and kappa flips sign
GeometryReport fluid_geometry(const StarCurve& curve, BoundaryTag tag);

// Beltrami-Laplace on the curve: second derivative in arclength
BoundaryScalar surface_laplacian(const StarCurve& curve, const BoundaryScalar& f);

// d/ds in arclength along the curve
BoundaryScalar surface_derivative(const StarCurve& curve, const BoundaryScalar& f);

// spectral quadrature of f dS
double integrate_boundary(const StarCurve& curve, const BoundaryScalar& f);
double integrate_boundary(const StarCurve& curve, const Vec& f);

// |f|_{H^r} via (I - Delta_boundary)^{r/2} realized in the arclength basis
double boundary_norm(const StarCurve& curve, const BoundaryScalar& f, double r);

// (-Delta_boundary)^{1/2} f in the same arclength realization
BoundaryScalar sqrt_minus_laplacian(const StarCurve& curve, const BoundaryScalar& f);

} // namespace capeuler
