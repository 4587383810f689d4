#pragma once

#include "capeuler/spectral_domain.hpp"

// Vector-field operators on the moving domain: the pressure bilinear form
// p_{v,w}, the surface-tension force J = grad of the harmonic curvature
// extension, the operators A and R0 of the linearized flow, vorticity, and
// the Hodge / rotational-irrotational decompositions.

namespace capeuler {

struct VectorField2 {
  InteriorField x, y;

  VectorField2() = default;
  VectorField2(InteriorField fx, InteriorField fy)
      : x(std::move(fx)), y(std::move(fy)) {}
  const DomainPtr& domain() const { return x.domain; }
};

struct NormalTrace {
  BoundaryScalar outer;
  std::optional<BoundaryScalar> inner;
};

VectorField2 sample_vector(const DomainPtr& d,
                           const std::function<Eigen::Vector2d(double, double)>& v);

// v . N on each fluid boundary (fluid-outward normals)
NormalTrace normal_trace(const VectorField2& v);

// weak divergence residual |<v, grad phi> - boundary term| scaled by |v|,
// maximized over low-mode test functions; the H^-1-style check used by tests
double divergence_residual(const VectorField2& v);

InteriorField divergence(const VectorField2& v);

// p_{v,w}: -Lap p = tr(Dv Dw), zero trace
InteriorField pressure_bilinear(const VectorField2& v, const VectorField2& w);

// J = grad H(kappa)
VectorField2 curvature_force_J(const DomainPtr& d);

// A(w) = -grad H(Delta_boundary w_perp)
VectorField2 op_A(const NormalTrace& wperp, const DomainPtr& d);

// R0(v)(w) = grad H((-grad_N p_{v,v}) w_perp)
VectorField2 op_R0(const VectorField2& v, const NormalTrace& wperp);

// -grad_N p_{v,v} on the fluid boundaries
NormalTrace rt_pressure_gradient(const VectorField2& v);

// scalar curl in 2D
InteriorField vorticity(const VectorField2& v);

// u = v - grad p with div v = 0, p zero trace; returns (v, p)
std::pair<VectorField2, InteriorField> hodge_decompose(const VectorField2& u);

// divergence-free v -> (v_rot, v_irr) with v_irr = grad H(Ninv v_perp)
std::pair<VectorField2, VectorField2> rotational_split(const VectorField2& v);

// pointwise algebra helpers
VectorField2 operator+(const VectorField2& a, const VectorField2& b);
VectorField2 operator-(const VectorField2& a, const VectorField2& b);
VectorField2 operator*(double c, const VectorField2& a);
double l2_norm(const VectorField2& v);
double inner_product(const VectorField2& a, const VectorField2& b);

} // namespace capeuler
