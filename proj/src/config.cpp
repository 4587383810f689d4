#include "capeuler/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace capeuler {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& v, const std::string& where) {
  try {
    size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    throw ConfigError(where + ": expected a number, got '" + v + "'");
  }
}

int parse_int(const std::string& v, const std::string& where) {
  try {
    size_t pos = 0;
    int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    throw ConfigError(where + ": expected an integer, got '" + v + "'");
  }
}

bool parse_bool(const std::string& v, const std::string& where) {
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw ConfigError(where + ": expected a boolean, got '" + v + "'");
}

// "k:amp, k:amp" pairs
std::vector<std::pair<int, double>> parse_modes(const std::string& v,
                                                const std::string& where) {
  std::vector<std::pair<int, double>> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    size_t colon = item.find(':');
    if (colon == std::string::npos)
      throw ConfigError(where + ": mode entries use k:amplitude, got '" + item + "'");
    out.emplace_back(parse_int(trim(item.substr(0, colon)), where),
                     parse_double(trim(item.substr(colon + 1)), where));
  }
  return out;
}

} // namespace

SimConfig parse_config_text(const std::string& text, const std::string& origin) {
  SimConfig cfg;
  bool saw_geometry = false, saw_inner = false, saw_dt = false;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string where = origin + ":" + std::to_string(lineno);
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "geometry" && section != "perturbation" && section != "flow" &&
          section != "sim" && section != "output")
        throw ConfigError(where + ": unknown section [" + section + "]");
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    std::string qual = section.empty() ? key : section + "." + key;

    if (qual == "geometry.type") {
      if (val == "circle") cfg.geometry = SimConfig::Geometry::circle;
      else if (val == "annulus") cfg.geometry = SimConfig::Geometry::annulus;
      else throw ConfigError(where + ": geometry type must be circle or annulus");
      saw_geometry = true;
    } else if (qual == "geometry.radius") {
      cfg.radius = parse_double(val, where);
    } else if (qual == "geometry.inner_radius") {
      cfg.inner_radius = parse_double(val, where);
      saw_inner = true;
    } else if (qual == "geometry.outer_radius") {
      cfg.outer_radius = parse_double(val, where);
    } else if (qual == "perturbation.modes") {
      cfg.shape_modes = parse_modes(val, where);
    } else if (qual == "perturbation.inner_modes") {
      cfg.shape_modes_inner = parse_modes(val, where);
    } else if (qual == "perturbation.phi_modes") {
      cfg.phi_modes = parse_modes(val, where);
    } else if (qual == "flow.flux") {
      cfg.flux = parse_double(val, where);
    } else if (qual == "sim.eps") {
      cfg.eps = parse_double(val, where);
    } else if (qual == "sim.dt") {
      if (val != "auto") {
        cfg.dt = parse_double(val, where);
        saw_dt = true;
      }
    } else if (qual == "sim.t_final") {
      cfg.t_final = parse_double(val, where);
    } else if (qual == "sim.n_theta") {
      cfg.n_theta = parse_int(val, where);
    } else if (qual == "sim.n_r") {
      cfg.n_r = parse_int(val, where);
    } else if (qual == "sim.output_every") {
      cfg.output_every = parse_int(val, where);
    } else if (qual == "sim.cfl") {
      cfg.cfl = parse_double(val, where);
    } else if (qual == "sim.filter") {
      if (val == "none") cfg.exp_filter = false;
      else if (val == "exp") cfg.exp_filter = true;
      else throw ConfigError(where + ": filter must be none or exp");
    } else if (qual == "output.dir") {
      cfg.out_dir = val;
    } else if (qual == "output.checkpoints") {
      cfg.write_checkpoints = parse_bool(val, where);
    } else if (qual == "output.checkpoint_format") {
      if (val != "text" && val != "binary")
        throw ConfigError(where + ": checkpoint_format must be text or binary");
      cfg.checkpoint_format = val;
    } else {
      throw ConfigError(where + ": unknown key '" + qual + "'");
    }
  }
  if (!saw_geometry) throw ConfigError(origin + ": missing geometry.type");
  if (cfg.geometry == SimConfig::Geometry::annulus) {
    if (!saw_inner) throw ConfigError(origin + ": annulus config missing inner_radius");
    if (cfg.outer_radius <= cfg.inner_radius)
      throw ConfigError(origin + ": need outer_radius > inner_radius");
  }
  if (cfg.eps < 0.0 || cfg.eps > 1.0)
    throw ConfigError(origin + ": eps must lie in [0, 1]");
  if (!fourier::is_power_of_two(cfg.n_theta))
    throw ConfigError(origin + ": n_theta must be a power of two");
  if (saw_dt) validate_dt(cfg);
  return cfg;
}

SimConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

void apply_overrides(SimConfig& cfg, const ConfigOverrides& o) {
  if (o.n_theta > 0) cfg.n_theta = o.n_theta;
  if (o.n_r > 0) cfg.n_r = o.n_r;
  if (o.dt >= 0.0) cfg.dt = o.dt;
  if (o.eps >= 0.0) cfg.eps = o.eps;
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
}

void validate_dt(const SimConfig& cfg) {
  if (cfg.dt <= 0.0) return;
  WaveState s = init_state(cfg);
  double bound = stability_dt(s, cfg.cfl);
  if (cfg.dt > bound) {
    std::ostringstream msg;
    msg << "dt = " << cfg.dt << " exceeds the stability bound " << bound
        << " (cfl " << cfg.cfl << ", n_theta " << cfg.n_theta << ", eps " << cfg.eps
        << ")";
    throw ConfigError(msg.str());
  }
}

std::string config_summary(const SimConfig& cfg) {
  std::ostringstream os;
  os << "geometry="
     << (cfg.geometry == SimConfig::Geometry::circle ? "circle" : "annulus");
  if (cfg.geometry == SimConfig::Geometry::circle) {
    os << " radius=" << cfg.radius;
  } else {
    os << " r=[" << cfg.inner_radius << "," << cfg.outer_radius << "]"
       << " flux=" << cfg.flux;
  }
  os << " eps=" << cfg.eps << " n_theta=" << cfg.n_theta << " n_r=" << cfg.n_r
     << " dt=" << (cfg.dt > 0 ? std::to_string(cfg.dt) : std::string("auto"))
     << " T=" << cfg.t_final;
  return os.str();
}

} // namespace capeuler
