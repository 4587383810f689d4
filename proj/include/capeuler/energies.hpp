#pragma once

#include "capeuler/kinematics.hpp"

// The conserved energy E0, the higher-order energies built on the linearized
// flow (k = 1), the Rayleigh-Taylor margin, the monitor ratios tied to the
// velocity/curvature bounds, and the linearized-equation residual along
// trajectories.

namespace capeuler {

struct EnergyReport {
  double E0 = 0.0;       // kinetic + eps^2 * surface area
  double E_dtJ = 0.0;    // 1/2 |covariant D_t J|^2 over the domain
  double E_eps = 0.0;    // eps^2/2 oint |ds Jperp|^2 dS
  double E_vort = 0.0;   // |omega|^2_{H^2}
  double E_total = 0.0;  // E_dtJ + E_eps + E_vort
  double E_RT = 0.0;     // 1/2 oint (-grad_N p_vv) |Jperp|^2 dS
  double script_E = 0.0; // E_total + E_RT
  double rt_margin = 0.0;
  bool rt_warning = false; // margin strongly negative: E_RT may be negative
  // monitor ratios (paper constants are not quantitative; only boundedness
  // along runs is asserted)
  double mon_kappa_h2 = 0.0; // eps^2 |kappa|^2_{H^2} / (3 E_total + eps^2)
  double mon_v_h3 = 0.0;     // |v|^2_{H^3} / (E_total + E0 + 1)
  double mon_kappa_h1 = 0.0; // |kappa|^2_{H^1} / (E_RT + 1), when margin > 0
  double max_kappa = 0.0;
  double area = 0.0;
};

double conserved_energy(const DomainPtr& d, const VectorField2& v, double eps);

double rt_margin(const DomainPtr& d, const VectorField2& v);

EnergyReport higher_energy(const DomainPtr& d, const VectorField2& v, double eps);

struct MonitorRow {
  std::string name;
  double value;
};
std::vector<MonitorRow> energy_monitors(const EnergyReport& rep);

struct LinearizedResidual {
  double residual_norm = 0.0; // |Dt^2 J + R0 J + eps^2 A J| on the boundary
  double leading_norm = 0.0;  // |eps^2 A J|
  double ratio = 0.0;
};

// three Euler-consistent snapshots at t-dt, t, t+dt
LinearizedResidual linearized_residual(const FlowSnapshot& prev,
                                       const FlowSnapshot& mid,
                                       const FlowSnapshot& next, double dt,
                                       double eps);

} // namespace capeuler
