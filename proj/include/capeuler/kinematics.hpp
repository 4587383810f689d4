#pragma once

#include "capeuler/field_ops.hpp"

#include <string>
#include <vector>

// Material-derivative and commutator formulas for a boundary moving with a
// smooth velocity field, evaluated from instantaneous data, plus the
// flow-based finite-difference oracle that validates each formula by actually
// evolving the domain.

namespace capeuler {

// space-time scalar and velocity closures
using ScalarClosure = std::function<double(double t, double x, double y)>;
using VelocityClosure = std::function<Eigen::Vector2d(double t, double x, double y)>;

struct FlowSnapshot {
  DomainPtr domain;
  VectorField2 v;
  std::optional<VectorField2> dt_v; // material acceleration, when supplied
};

// A moving-domain family: an initial curve transported by a velocity closure.
// Shapes at other times are obtained by integrating the fixed-theta radial
// evolution d rho/dt = (v.N) sqrt(rho^2+rho'^2)/rho with RK4.
class FlowFamily {
 public:
  FlowFamily(StarCurve initial, VelocityClosure v, double t0 = 0.0);

  const VelocityClosure& velocity() const { return v_; }
  double t0() const { return t0_; }
  StarCurve shape_at(double t, int n_steps = 32) const;
  FlowSnapshot snapshot_at(double t, int n_r, bool with_acceleration_fd = false,
                           double fd_dt = 1e-4) const;
  // consistency check: boundary normal speed equals v.N (FD order)
  double consistency_residual(double t, double dt) const;

 private:
  StarCurve initial_;
  VelocityClosure v_;
  double t0_;
};

// ---- instantaneous evaluators (outer boundary of the snapshot domain) ----

// D_t N = -(grad_T v . N) T; returns the two components on the grid
std::pair<Vec, Vec> dt_normal(const FlowSnapshot& snap);

// factor in D_t dS = (v.N kappa + div_T v^T) dS
BoundaryScalar dt_surface_measure(const FlowSnapshot& snap);

struct DtCurvature {
  BoundaryScalar via_velocity_laplacian; // -Lap_b v . N - 2 Pi . D^T v
  BoundaryScalar via_normal_speed;       // -Lap_b v_n - v_n |Pi|^2 + ds kappa v_t
};
DtCurvature dt_curvature(const FlowSnapshot& snap);

// D_t^2 kappa assembled from the second-variation formulas; requires dt_v.
// leading: -N . Lap_b(D_t v); surface_tension_part: 2 eps^2 Pi . D^T J when
// the snapshot is Euler-consistent with parameter eps; remainder: the rest.
struct Dt2Curvature {
  BoundaryScalar total;
  BoundaryScalar leading;
  BoundaryScalar remainder;
};
Dt2Curvature dt2_curvature(const FlowSnapshot& snap);

// D_t J from instantaneous data
VectorField2 dt_J(const FlowSnapshot& snap);
// covariant derivative: D_t J + grad p_{v,J}
VectorField2 covariant_dt_J(const FlowSnapshot& snap);

enum class CommutatorKind { harmonic, dirichlet_neumann, inverse_laplacian, surface_laplacian };

// closed-form commutator [D_t, Op] f evaluated from instantaneous data;
// boundary ops return boundary values, interior ops interior fields
BoundaryScalar commutator_dn(const FlowSnapshot& snap, const BoundaryScalar& f);
BoundaryScalar commutator_surface_laplacian(const FlowSnapshot& snap,
                                            const BoundaryScalar& f);
InteriorField commutator_harmonic(const FlowSnapshot& snap, const BoundaryScalar& f);
InteriorField commutator_inverse_laplacian(const FlowSnapshot& snap,
                                           const InteriorField& g);

// ---- the flow finite-difference oracle ----

struct FdReport {
  double value_norm = 0.0;     // size of the checked quantity
  double residual = 0.0;       // |FD - evaluator| at the base dt
  double residual_half = 0.0;  // same at dt/2
  double observed_order = 0.0; // log2(residual / residual_half)
};

// centered material-derivative estimate of a boundary scalar given by a
// closure q(t, theta_index) evaluated on the family's shape at time t
struct FormulaCheck {
  std::string id;
  double residual = 0.0;
  double observed_order = 0.0;
  double terminal_rel_err = 0.0;
  bool pass = false;
};

// run the full formula-validation table on one family
std::vector<FormulaCheck> verify_kinematics(const FlowFamily& family, double t,
                                            double dt, int n_r,
                                            double tol_rel = 1e-5);

// named standard families for the CLI and tests
FlowFamily standard_family(const std::string& name, int n_theta);

} // namespace capeuler
