// capeuler: free-boundary Euler toolkit driver.
//
// Subcommands: geom, ops-verify, simulate, annulus-ode, dispersion,
// eps-sweep, energy-report, checkpoint-info. Exit codes: 0 pass, 1 check
// failure, 2 usage error.

#include <CLI11.hpp>

#include "capeuler/checkpoint.hpp"
#include "capeuler/config.hpp"
#include "capeuler/exact_solutions.hpp"
#include "capeuler/run_io.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

namespace fs = std::filesystem;
using namespace capeuler;

namespace {

struct GlobalOpts {
  std::string config_path;
  std::string out_dir;
  bool quiet = false;
  unsigned seed = 1;
  ConfigOverrides overrides;
};

std::ostream& info(const GlobalOpts& g) {
  static std::ofstream devnull;
  if (g.quiet) {
    if (!devnull.is_open()) devnull.open("/dev/null");
    return devnull;
  }
  return std::cout;
}

std::string resolve_out(const GlobalOpts& g, const std::string& fallback) {
  std::string dir = !g.out_dir.empty()
                        ? g.out_dir
                        : (output_root() + "/" + fallback);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::pair<int, double>> parse_mode_arg(const std::string& arg) {
  std::vector<std::pair<int, double>> out;
  std::stringstream ss(arg);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t colon = item.find(':');
    if (colon == std::string::npos)
      throw CLI::ValidationError("modes", "expected k:amplitude pairs");
    out.emplace_back(std::stoi(item.substr(0, colon)),
                     std::stod(item.substr(colon + 1)));
  }
  return out;
}

int run_geom(const GlobalOpts& g, int n_theta, double radius,
             const std::string& modes, const std::string& ellipse) {
  StarCurve curve = make_star_curve({}, radius, n_theta);
  if (!ellipse.empty()) {
    size_t comma = ellipse.find(',');
    if (comma == std::string::npos)
      throw CLI::ValidationError("--ellipse", "expected a,b");
    curve = make_ellipse(std::stod(ellipse.substr(0, comma)),
                         std::stod(ellipse.substr(comma + 1)), n_theta);
  } else if (!modes.empty()) {
    curve = make_star_curve(parse_mode_arg(modes), radius, n_theta);
  }
  GeometryReport rep = geometry(curve);
  double gauss = integrate_boundary(curve, rep.kappa) - 2.0 * M_PI;
  double nrm = 0.0, orth = 0.0;
  for (int j = 0; j < n_theta; ++j) {
    nrm = std::max(nrm, std::abs(std::hypot(rep.nx[j], rep.ny[j]) - 1.0));
    orth = std::max(orth, std::abs(rep.nx[j] * rep.tx[j] + rep.ny[j] * rep.ty[j]));
  }
  std::ostream& os = info(g);
  os << "n_theta          " << n_theta << "\n"
     << "arclength        " << std::setprecision(15) << rep.arclength << "\n"
     << "kappa range      [" << rep.kappa.minCoeff() << ", " << rep.kappa.maxCoeff()
     << "]\n"
     << "gauss-bonnet     " << gauss << "\n"
     << "|N|-1 max        " << nrm << "\n"
     << "N.T max          " << orth << "\n"
     << "resolved         " << (rep.resolved ? "yes" : "no") << "\n";
  bool pass = std::abs(gauss) < 1e-10 && nrm < 1e-12 && orth < 1e-12 && rep.resolved;
  os << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? 0 : 1;
}

int run_ops_verify(const GlobalOpts& g, const std::string& family, double t,
                   double dt, int n_theta, int n_r, double tol) {
  FlowFamily fam = standard_family(family, n_theta);
  auto table = verify_kinematics(fam, t, dt, n_r, tol);
  std::ostream& os = info(g);
  os << std::left << std::setw(18) << "formula" << std::setw(14) << "residual"
     << std::setw(14) << "order" << std::setw(14) << "terminal" << "status\n";
  bool all = true;
  for (const auto& row : table) {
    os << std::left << std::setw(18) << row.id << std::setw(14)
       << std::scientific << std::setprecision(3) << row.residual << std::setw(14)
       << std::fixed << std::setprecision(2) << row.observed_order << std::setw(14)
       << std::scientific << std::setprecision(3) << row.terminal_rel_err
       << (row.pass ? "pass" : "FAIL") << "\n";
    all = all && row.pass;
  }
  return all ? 0 : 1;
}

int run_simulate(const GlobalOpts& g) {
  if (g.config_path.empty())
    throw CLI::ValidationError("--config", "simulate needs a config file");
  std::ifstream cf(g.config_path);
  if (!cf) throw ConfigError("cannot open config file: " + g.config_path);
  std::stringstream buf;
  buf << cf.rdbuf();
  SimConfig cfg = parse_config_text(buf.str(), g.config_path);
  apply_overrides(cfg, g.overrides);
  validate_dt(cfg);
  std::string dir = resolve_out(g, "simulate");

  RunManifest man;
  man.subcommand = "simulate";
  man.config_hash = hash_text(buf.str());
  man.started_utc = timestamp_utc();

  int ckpt_idx = 0;
  SnapshotSink sink = [&](const WaveState& s, const SnapshotDiag&) {
    if (!cfg.write_checkpoints) return;
    std::ostringstream name;
    name << dir << "/ckpt_" << std::setw(5) << std::setfill('0') << ckpt_idx++
         << (cfg.checkpoint_format == "binary" ? ".bin" : ".json");
    if (cfg.checkpoint_format == "binary")
      write_checkpoint_binary(name.str(), s);
    else
      write_checkpoint_text(name.str(), s);
    man.outputs.push_back(name.str());
  };
  info(g) << "simulate: " << config_summary(cfg) << "\n";
  DiagnosticsSeries series = simulate(cfg, sink);
  std::string csv = dir + "/timeseries.csv";
  write_timeseries(csv, series);
  man.outputs.push_back(csv);
  man.finished_utc = timestamp_utc();
  std::ostringstream sum;
  sum << "E0 drift " << series.e0_max_drift << ", area drift "
      << series.area_max_drift << ", rt_all_positive " << series.rt_all_positive;
  man.summary = sum.str();
  man.passed = series.e0_max_drift < 1e-5;
  write_manifest(dir + "/manifest.json", man);
  info(g) << sum.str() << "\nwrote " << csv << "\n";
  return man.passed ? 0 : 1;
}

int run_annulus_ode(const GlobalOpts& g, double r1, double r2, double a1,
                    double theta_amp, double theta_lo, double theta_hi,
                    double t_final, double dt, double eps) {
  auto theta0 = [=](double r) {
    if (theta_amp == 0.0 || r <= theta_lo || r >= theta_hi) return 0.0;
    double z = (2.0 * r - (theta_lo + theta_hi)) / (theta_hi - theta_lo);
    if (std::abs(z) >= 1.0) return 0.0;
    return theta_amp * std::exp(1.0 - 1.0 / (1.0 - z * z));
  };
  AnnulusODEState s0 = make_annulus_state(r1, r2, a1, theta0);
  AnnulusTrajectory traj = annulus_integrate(s0, t_final, dt, eps, 10);
  std::string dir = resolve_out(g, "annulus_ode");
  std::string csv = dir + "/trajectory.csv";
  std::ofstream out(csv);
  out << "t,r1,r2,A,a1,E0,pr_inner,pr_outer,rt_ok\n";
  out.precision(17);
  for (const auto& s : traj.samples)
    out << s.t << ',' << s.r1 << ',' << s.r2 << ',' << s.A << ',' << s.a1 << ','
        << s.E0 << ',' << s.pr_inner << ',' << s.pr_outer << ','
        << (s.rt_ok ? 1 : 0) << "\n";
  std::string prof = dir + "/theta1_final.csv";
  std::ofstream pf(prof);
  pf << "r0,theta1\n";
  pf.precision(17);
  for (int i = 0; i < traj.final_state.r0_nodes.size(); ++i)
    pf << traj.final_state.r0_nodes[i] << ',' << traj.final_state.theta1[i] << "\n";

  RunManifest man;
  man.subcommand = "annulus-ode";
  man.config_hash = hash_text(csv);
  man.started_utc = man.finished_utc = timestamp_utc();
  man.outputs = {csv, prof};
  const auto& last = traj.samples.back();
  std::ostringstream sum;
  sum << "final r1 " << last.r1 << " r2 " << last.r2 << " rt_ok " << last.rt_ok;
  man.summary = sum.str();
  write_manifest(dir + "/manifest.json", man);
  info(g) << sum.str() << "\nwrote " << csv << "\n";
  return 0;
}

int run_dispersion(const GlobalOpts& g, const std::string& klist, double amplitude,
                   double eps, int n_theta, int n_r) {
  std::vector<int> ks;
  std::stringstream ss(klist);
  std::string item;
  while (std::getline(ss, item, ',')) ks.push_back(std::stoi(item));
  SimConfig base;
  base.n_theta = n_theta;
  base.n_r = n_r;
  base.cfl = 0.3;
  DispersionSweep sweep = dispersion_sweep(ks, amplitude, eps, base);
  std::ostream& os = info(g);
  os << std::left << std::setw(6) << "k" << std::setw(16) << "measured"
     << std::setw(16) << "predicted" << std::setw(12) << "deviation"
     << "flags\n";
  bool ok = true;
  for (const auto& r : sweep.results) {
    os << std::left << std::setw(6) << r.k << std::setw(16) << std::setprecision(8)
       << r.measured_frequency << std::setw(16) << r.predicted_frequency
       << std::setw(12) << std::setprecision(3) << r.deviation
       << (r.oscillation_detected ? "" : "no-oscillation ")
       << (r.contaminated ? "nonlinear" : "") << "\n";
    ok = ok && r.oscillation_detected && !r.contaminated;
  }
  os << "log-log slope: " << std::setprecision(6) << sweep.loglog_slope << "\n";
  return ok ? 0 : 1;
}

int run_eps_sweep(const GlobalOpts& g, const std::string& epslist) {
  SimConfig scenario;
  if (!g.config_path.empty()) {
    scenario = parse_config_file(g.config_path);
  } else {
    // default scenario: perturbed expanding annulus
    scenario.geometry = SimConfig::Geometry::annulus;
    scenario.inner_radius = 1.0;
    scenario.outer_radius = 1.5;
    scenario.flux = 0.5;
    scenario.shape_modes = {{3, 1e-3}};
    scenario.n_theta = 128;
    scenario.n_r = 40;
    scenario.t_final = 0.25;
  }
  apply_overrides(scenario, g.overrides);
  std::vector<double> eps;
  std::stringstream ss(epslist);
  std::string item;
  while (std::getline(ss, item, ',')) eps.push_back(std::stod(item));
  EpsSweepResult res = eps_sweep(scenario, eps);
  std::ostream& os = info(g);
  if (res.refused) {
    os << "REFUSED: scenario violates the sign condition at t = 0\n";
    return 1;
  }
  os << std::left << std::setw(10) << "eps" << "d(eps)\n";
  for (size_t i = 0; i < res.eps_values.size(); ++i)
    os << std::left << std::setw(10) << res.eps_values[i] << std::scientific
       << std::setprecision(6) << res.distances[i] << "\n" << std::defaultfloat;
  os << "monotone decreasing: " << (res.monotone ? "yes" : "NO") << "\n"
     << "rt positive throughout: " << (res.rt_positive_throughout ? "yes" : "NO")
     << "\n";
  return (res.monotone && res.rt_positive_throughout) ? 0 : 1;
}

int run_energy_report(const GlobalOpts&, const std::vector<std::string>& ckpts,
                      int n_r) {
  std::cout << timeseries_header() << "\n";
  for (const auto& path : ckpts) {
    WaveState s = read_checkpoint(path);
    StateFields f = state_fields(s, n_r);
    EnergyReport rep = higher_energy(f.domain, f.v, s.eps);
    std::cout << timeseries_row(s.t, rep) << "\n";
  }
  return 0;
}

int run_checkpoint_info(const std::vector<std::string>& paths) {
  for (const auto& p : paths) {
    CheckpointInfo ci = checkpoint_info(p);
    std::cout << p << ": format=" << ci.format << " version=" << ci.version
              << " kind=" << (ci.annulus ? "annulus" : "disk") << " t=" << ci.t
              << " eps=" << ci.eps << " n_theta=" << ci.n_theta << "\n";
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"capeuler: 2D free-boundary Euler toolkit"};
  app.require_subcommand(1);
  GlobalOpts g;
  app.add_option("--config", g.config_path, "config file path");
  app.add_option("--out", g.out_dir, "output directory");
  app.add_flag("--quiet", g.quiet, "suppress progress output");
  app.add_option("--seed", g.seed, "seed for randomized test fields");
  app.add_option("--n-theta", g.overrides.n_theta, "override n_theta");
  app.add_option("--n-r", g.overrides.n_r, "override n_r");
  app.add_option("--dt", g.overrides.dt, "override dt");
  app.add_option("--eps", g.overrides.eps, "override eps");

  auto* geom = app.add_subcommand("geom", "geometry report for a curve");
  int geom_n = 256;
  double geom_radius = 1.0;
  std::string geom_modes, geom_ellipse;
  geom->add_option("--n", geom_n, "grid size");
  geom->add_option("--radius", geom_radius, "base radius");
  geom->add_option("--modes", geom_modes, "k:amp,k:amp perturbation list");
  geom->add_option("--ellipse", geom_ellipse, "a,b semi-axes");

  auto* ops = app.add_subcommand("ops-verify", "formula suite vs the flow oracle");
  std::string ops_family = "ellipse-shear";
  double ops_t = 0.0, ops_dt = 1e-3, ops_tol = 1e-5;
  int ops_n = 256, ops_nr = 48;
  ops->add_option("--family", ops_family,
                  "ellipse-shear | ellipse-swirl | expanding-circle | "
                  "rigid-rotation | stationary");
  ops->add_option("--t", ops_t, "evaluation time");
  ops->add_option("--dt", ops_dt, "base FD step");
  ops->add_option("--tol", ops_tol, "terminal relative tolerance");
  ops->add_option("--n-theta", ops_n, "grid size");
  ops->add_option("--n-r", ops_nr, "radial nodes");

  auto* sim = app.add_subcommand("simulate", "run the wave solver from a config");

  auto* ode = app.add_subcommand("annulus-ode", "integrate the exact annulus system");
  double ode_r1 = 1.0, ode_r2 = 2.0, ode_a1 = 0.5, ode_tamp = 0.0, ode_tlo = 1.1,
         ode_thi = 1.9, ode_T = 1.0, ode_dt = 1e-3, ode_eps = 0.0;
  ode->add_option("--r1", ode_r1, "initial inner radius");
  ode->add_option("--r2", ode_r2, "initial outer radius");
  ode->add_option("--a1", ode_a1, "initial flux rate");
  ode->add_option("--theta-amp", ode_tamp, "swirl bump amplitude");
  ode->add_option("--theta-lo", ode_tlo, "swirl support start");
  ode->add_option("--theta-hi", ode_thi, "swirl support end");
  ode->add_option("--t-final", ode_T, "final time");
  ode->add_option("--ode-dt", ode_dt, "integrator step");
  ode->add_option("--ode-eps", ode_eps, "surface-tension strength");

  auto* disp = app.add_subcommand("dispersion", "capillary drop frequency probe");
  std::string disp_ks = "2,3,4,5,6";
  double disp_amp = 1e-3, disp_eps = 0.5;
  int disp_n = 128, disp_nr = 32;
  disp->add_option("--k-list", disp_ks, "comma-separated mode numbers");
  disp->add_option("--amplitude", disp_amp, "initial mode amplitude");
  disp->add_option("--eps", disp_eps, "surface-tension strength");
  disp->add_option("--n-theta", disp_n, "grid size");
  disp->add_option("--n-r", disp_nr, "radial nodes");

  auto* sweep = app.add_subcommand("eps-sweep", "vanishing surface tension sweep");
  std::string sweep_eps = "0.4,0.2,0.1,0.05";
  sweep->add_option("--eps-list", sweep_eps, "descending eps values");

  auto* erep = app.add_subcommand("energy-report", "CSV energy rows for checkpoints");
  std::vector<std::string> erep_files;
  int erep_nr = 64;
  erep->add_option("--checkpoint", erep_files, "checkpoint files")->required();
  erep->add_option("--report-n-r", erep_nr, "radial nodes");

  auto* cinfo = app.add_subcommand("checkpoint-info", "describe checkpoint files");
  std::vector<std::string> cinfo_files;
  cinfo->add_option("files", cinfo_files, "checkpoint files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2; // usage errors exit 2
  }

  try {
    if (*geom) return run_geom(g, geom_n, geom_radius, geom_modes, geom_ellipse);
    if (*ops) return run_ops_verify(g, ops_family, ops_t, ops_dt, ops_n, ops_nr, ops_tol);
    if (*sim) return run_simulate(g);
    if (*ode)
      return run_annulus_ode(g, ode_r1, ode_r2, ode_a1, ode_tamp, ode_tlo, ode_thi,
                             ode_T, ode_dt, ode_eps);
    if (*disp) return run_dispersion(g, disp_ks, disp_amp, disp_eps, disp_n, disp_nr);
    if (*sweep) return run_eps_sweep(g, sweep_eps);
    if (*erep) return run_energy_report(g, erep_files, erep_nr);
    if (*cinfo) return run_checkpoint_info(cinfo_files);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
