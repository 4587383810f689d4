#include "capeuler/run_io.hpp"

#include <json.hpp>

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

namespace capeuler {

namespace {

std::string fmt17(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

} // namespace

std::string timeseries_header() {
  return "t,E0,E_dtJ,E_eps,E_vort,E_RT,rt_margin,max_kappa,area,"
         "mon_kappa_h2,mon_v_h3,mon_kappa_h1";
}

std::string timeseries_row(double t, const EnergyReport& r) {
  std::ostringstream os;
  os << fmt17(t) << ',' << fmt17(r.E0) << ',' << fmt17(r.E_dtJ) << ','
     << fmt17(r.E_eps) << ',' << fmt17(r.E_vort) << ',' << fmt17(r.E_RT) << ','
     << fmt17(r.rt_margin) << ',' << fmt17(r.max_kappa) << ',' << fmt17(r.area)
     << ',' << fmt17(r.mon_kappa_h2) << ',' << fmt17(r.mon_v_h3) << ','
     << fmt17(r.mon_kappa_h1);
  return os.str();
}

void write_timeseries(const std::string& path, const DiagnosticsSeries& series) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write timeseries: " + path);
  out << timeseries_header() << "\n";
  for (const auto& row : series.rows) out << timeseries_row(row.t, row.energy) << "\n";
}

std::string hash_text(const std::string& text) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

void write_manifest(const std::string& path, const RunManifest& m) {
  nlohmann::json j;
  j["subcommand"] = m.subcommand;
  j["config_hash"] = m.config_hash;
  j["version"] = m.version;
  j["started_utc"] = m.started_utc;
  j["finished_utc"] = m.finished_utc;
  j["outputs"] = m.outputs;
  j["passed"] = m.passed;
  j["summary"] = m.summary;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  out << j.dump(1) << "\n";
}

std::string output_root() {
  const char* env = std::getenv("CAPEULER_OUT");
  return env && *env ? std::string(env) : std::string("runs");
}

std::string timestamp_utc() {
  std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

} // namespace capeuler
