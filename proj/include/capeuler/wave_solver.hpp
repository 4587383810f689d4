#pragma once

#include "capeuler/energies.hpp"

#include <string>
#include <vector>

// Time stepping for the irrotational free-boundary flow with surface tension
// in the boundary-potential form: fixed-theta radial shape rho plus the
// velocity-potential trace phi per boundary, advanced with explicit RK4.

namespace capeuler {

struct SimConfig {
  enum class Geometry { circle, annulus };
  Geometry geometry = Geometry::circle;
  double radius = 1.0;
  double inner_radius = 0.0, outer_radius = 0.0;
  std::vector<std::pair<int, double>> shape_modes;       // outer boundary
  std::vector<std::pair<int, double>> shape_modes_inner;
  std::vector<std::pair<int, double>> phi_modes;         // outer boundary
  double flux = 0.0;  // initial radial flux rate a1 (annulus)
  double eps = 0.0;
  double dt = 0.0;  // 0: derived from the stability rule
  double t_final = 1.0;
  int n_theta = 256;
  int n_r = 64;
  int output_every = 20;
  double cfl = 0.5;
  bool exp_filter = false;
  bool write_checkpoints = true;
  std::string checkpoint_format = "text"; // text | binary
  std::string out_dir;
};

struct WaveState {
  StarCurve outer;
  std::optional<StarCurve> inner;
  Vec phi_outer;
  Vec phi_inner;            // empty unless annulus
  double t = 0.0;
  double eps = 0.0;
  double bernoulli_offset = 0.0; // accumulated gauge constant absorbed from phi
  double flux = 0.0;             // net outward flux diagnostic (annulus)

  bool is_annulus() const { return inner.has_value(); }
  double enclosed_area() const;
  WaveState() : outer(make_star_curve({}, 1.0, 8)) {}
  explicit WaveState(StarCurve out) : outer(std::move(out)) {}
};

struct SnapshotDiag {
  double t;
  EnergyReport energy;
  double flux;
  CVec outer_spectrum;
  CVec inner_spectrum; // empty for drops
};

struct DiagnosticsSeries {
  std::vector<SnapshotDiag> rows;
  double e0_initial = 0.0;
  double e0_max_drift = 0.0;   // relative
  double area_initial = 0.0;
  double area_max_drift = 0.0; // relative
  bool rt_all_positive = true;
};

WaveState init_state(const SimConfig& cfg);

// largest stable dt under the stiffness rule
double stability_dt(const WaveState& s, double cfl);

WaveState step(const WaveState& s, double dt, int n_r);

// assemble the interior data of a state: domain, velocity field and potential
struct StateFields {
  DomainPtr domain;
  VectorField2 v;
  InteriorField potential;
};
StateFields state_fields(const WaveState& s, int n_r);

using SnapshotSink = std::function<void(const WaveState&, const SnapshotDiag&)>;

DiagnosticsSeries simulate(const SimConfig& cfg,
                           const SnapshotSink& sink = SnapshotSink());

struct DispersionResult {
  int k = 0;
  double eps = 0.0;
  double measured_frequency = 0.0;
  double predicted_frequency = 0.0; // sqrt(eps^2 k (k^2-1) / R^3)
  double deviation = 0.0;           // relative
  double harmonic_content = 0.0;    // fit residual / amplitude
  bool oscillation_detected = false;
  bool contaminated = false;
};

DispersionResult dispersion_probe(int k, double amplitude, double eps,
                                  const SimConfig& base);

struct DispersionSweep {
  std::vector<DispersionResult> results;
  double loglog_slope = 0.0; // frequency vs k
};

DispersionSweep dispersion_sweep(const std::vector<int>& ks, double amplitude,
                                 double eps, const SimConfig& base);

struct EpsSweepResult {
  std::vector<double> eps_values;
  std::vector<double> distances;   // L2 boundary distance to the eps = 0 run
  std::vector<double> pair_cauchy; // |rho_{e_i} - rho_{e_{i+1}}|
  bool monotone = false;
  bool rt_positive_throughout = false;
  bool refused = false; // scenario failed the sign condition at t = 0
};

// the sign-condition gate used by eps_sweep: initial data must have a
// strictly positive Rayleigh-Taylor margin
bool eps_sweep_admissible(const DomainPtr& d, const VectorField2& v);

EpsSweepResult eps_sweep(const SimConfig& scenario, std::vector<double> eps_list);

} // namespace capeuler
