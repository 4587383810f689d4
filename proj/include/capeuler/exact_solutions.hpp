#pragma once

#include "capeuler/field_ops.hpp"

#include <vector>

// The two explicit solutions: the rotating-disk stationary solution and the
// expanding/rotating annulus reduced to an ODE system, used both as oracles
// for the general solver and as standalone simulations.

namespace capeuler {

// v = Theta(r) d/dtheta on the unit disk (angular velocity Theta), stationary
// for eps = 1. Theta must be supported away from r = 0 and r = 1.
class RotatingDiskSolution {
 public:
  RotatingDiskSolution(std::function<double(double)> angular_velocity,
                       double support_lo, double support_hi);

  double theta_profile(double r) const;
  // p(r) with p(1) = 0; dp/dr = r Theta^2 (centripetal balance)
  double pressure(double r) const;
  // Lagrangian map: (r0, th0) -> (r0, th0 + t Theta(r0))
  double lagrangian_angle(double t, double r0, double th0) const;

  struct Report {
    double div_residual = 0.0;     // weak divergence residual of v
    double euler_residual = 0.0;   // max |grad_v v + grad p|
    double pressure_split = 0.0;   // max |p_quadrature - p_vv| (zero-trace gauge)
    double boundary_const = 0.0;   // variation of p - eps^2 kappa on the boundary
    double stationary = 0.0;       // max |D_t kappa|, |D_t N| from the evaluators
  };
  Report verify(int n_theta, int n_r) const;

 private:
  std::function<double(double)> theta_;
  double lo_, hi_;
};

// state of the annulus ODE system: area coordinate A (r^2 = r0^2 + 2A),
// its rate a1, and the accumulated angular displacement theta1(r0)
struct AnnulusODEState {
  double t = 0.0;
  double A = 0.0;
  double a1 = 0.0;         // A' = a1; r_i' = a1 / r_i
  Vec theta1;              // on the r0 Chebyshev grid
  Vec r0_nodes;            // Chebyshev nodes on [r10, r20]
  Vec r0_weights;          // quadrature weights on [r10, r20]
  Vec theta0_profile;      // Theta(0, r0) samples on the same grid
  std::function<double(double)> theta0_fn;
  double r10 = 1.0, r20 = 2.0;

  double r1() const;
  double r2() const;
  // Theta(t, r) via the transport closed form
  double theta_at(double r) const;
};

AnnulusODEState make_annulus_state(double r10, double r20, double a1_0,
                                   const std::function<double(double)>& theta0,
                                   int n_r0 = 64);

struct AnnulusRates {
  double dA;
  double da1;
  Vec dtheta1;
};

// right-hand side of the reduced system; eps adds the surface-tension
// boundary-pressure difference -eps^2 (kappa_2 - kappa_1) to the a1 equation
AnnulusRates annulus_ode_rhs(const AnnulusODEState& s, double eps = 0.0);

struct AnnulusSample {
  double t, A, a1, r1, r2, E0;
  double pr_inner, pr_outer; // radial pressure gradient at the boundaries
  bool rt_ok;
};

struct AnnulusTrajectory {
  std::vector<AnnulusSample> samples;
  AnnulusODEState final_state;
};

AnnulusTrajectory annulus_integrate(const AnnulusODEState& initial, double t_final,
                                    double dt, double eps = 0.0,
                                    int sample_every = 1);

struct AnnulusRtSigns {
  double pr_inner;  // > 0 when the sign condition holds there
  double pr_outer;  // < 0 when the sign condition holds there
  double margin;    // min fluid-side -grad_N p over both boundaries
  bool satisfied;
};

AnnulusRtSigns annulus_rt_signs(const AnnulusODEState& s);

// E0 for the pure radial flow (Theta = 0, eps = 0): pi a1^2 log(r2/r1)
double annulus_radial_energy(const AnnulusODEState& s);

// kinetic + swirl energy by quadrature (eps = 0)
double annulus_kinetic_energy(const AnnulusODEState& s);

} // namespace capeuler
