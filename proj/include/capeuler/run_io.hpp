#pragma once

#include "capeuler/wave_solver.hpp"

#include <string>
#include <vector>

// Time-series emission and the per-run manifest.

namespace capeuler {

// fixed CSV column order:
// t, E0, E_dtJ, E_eps, E_vort, E_RT, rt_margin, max_kappa, area,
// mon_kappa_h2, mon_v_h3, mon_kappa_h1
std::string timeseries_header();
std::string timeseries_row(double t, const EnergyReport& rep);
void write_timeseries(const std::string& path, const DiagnosticsSeries& series);

struct RunManifest {
  std::string subcommand;
  std::string config_hash;
  std::string version = "0.1.0";
  std::string started_utc, finished_utc;
  std::vector<std::string> outputs;
  bool passed = true;
  std::string summary;
};

std::string hash_text(const std::string& text); // FNV-1a 64, hex
void write_manifest(const std::string& path, const RunManifest& m);

// default output root: CAPEULER_OUT env var, else "runs"
std::string output_root();
std::string timestamp_utc();

} // namespace capeuler
