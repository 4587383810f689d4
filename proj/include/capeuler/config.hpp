#pragma once

#include "capeuler/wave_solver.hpp"

#include <map>
#include <string>

// Flat key-value configuration with [section] headers. Unknown keys are
// rejected; misspelled simulation settings should fail loudly, not silently.

namespace capeuler {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

SimConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");
SimConfig parse_config_file(const std::string& path);

// apply command-line overrides after parsing (0/empty means keep)
struct ConfigOverrides {
  int n_theta = 0;
  int n_r = 0;
  double dt = -1.0;
  double eps = -1.0;
  std::string out_dir;
};
void apply_overrides(SimConfig& cfg, const ConfigOverrides& o);

// stability validation; throws ConfigError naming the bound when dt exceeds it
void validate_dt(const SimConfig& cfg);

std::string config_summary(const SimConfig& cfg);

} // namespace capeuler
