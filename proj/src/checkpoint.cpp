#include "capeuler/checkpoint.hpp"

#include <json.hpp>

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace capeuler {

namespace {

using nlohmann::json;

constexpr char kBinaryMagic[8] = {'C', 'A', 'P', 'E', 'U', 'L', 'R', '\n'};

json spectrum_to_json(const CVec& spec) {
  json arr = json::array();
  for (int i = 0; i < spec.size(); ++i) {
    arr.push_back(spec[i].real());
    arr.push_back(spec[i].imag());
  }
  return arr;
}

CVec spectrum_from_json(const json& arr) {
  if (!arr.is_array() || arr.size() % 2 != 0)
    throw std::runtime_error("checkpoint: malformed spectrum array");
  const size_t m = arr.size();
  CVec out(m / 2);
  for (size_t i = 0; i < m; i += 2)
    out[i / 2] = Complex(arr[i].get<double>(), arr[i + 1].get<double>());
  return out;
}

json grid_to_json(const Vec& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vec grid_from_json(const json& arr) {
  Vec out(arr.size());
  for (size_t i = 0; i < arr.size(); ++i) out[i] = arr[i].get<double>();
  return out;
}

void write_doubles_le(std::ofstream& out, const double* p, size_t count) {
  // assumes a little-endian host (x86/arm64); format is defined little-endian
  out.write(reinterpret_cast<const char*>(p), count * sizeof(double));
}

void read_doubles_le(std::ifstream& in, double* p, size_t count) {
  in.read(reinterpret_cast<char*>(p), count * sizeof(double));
  if (!in) throw std::runtime_error("checkpoint: truncated binary payload");
}

} // namespace

void write_checkpoint_text(const std::string& path, const WaveState& s) {
  json j;
  j["format_version"] = kCheckpointVersion;
  j["kind"] = s.is_annulus() ? "annulus" : "disk";
  j["t"] = s.t;
  j["eps"] = s.eps;
  j["bernoulli_offset"] = s.bernoulli_offset;
  j["flux"] = s.flux;
  j["n_theta"] = s.outer.n_theta();
  j["center"] = {s.outer.center().x(), s.outer.center().y()};
  j["outer_rho_spectrum"] = spectrum_to_json(s.outer.rho_modes());
  j["phi_outer"] = grid_to_json(s.phi_outer);
  if (s.is_annulus()) {
    j["inner_rho_spectrum"] = spectrum_to_json(s.inner->rho_modes());
    j["phi_inner"] = grid_to_json(s.phi_inner);
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << j.dump(1) << "\n";
}

void write_checkpoint_binary(const std::string& path, const WaveState& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out.write(kBinaryMagic, sizeof(kBinaryMagic));
  int32_t header[3] = {kCheckpointVersion, s.is_annulus() ? 1 : 0,
                       s.outer.n_theta()};
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  double meta[6] = {s.t, s.eps, s.bernoulli_offset, s.flux,
                    s.outer.center().x(), s.outer.center().y()};
  write_doubles_le(out, meta, 6);
  const int n = s.outer.n_theta();
  std::vector<double> buf(2 * n);
  auto dump_spec = [&](const CVec& spec) {
    for (int i = 0; i < n; ++i) {
      buf[2 * i] = spec[i].real();
      buf[2 * i + 1] = spec[i].imag();
    }
    write_doubles_le(out, buf.data(), 2 * n);
  };
  dump_spec(s.outer.rho_modes());
  write_doubles_le(out, s.phi_outer.data(), n);
  if (s.is_annulus()) {
    dump_spec(s.inner->rho_modes());
    write_doubles_le(out, s.phi_inner.data(), n);
  }
}

namespace {

bool looks_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[8] = {};
  in.read(magic, 8);
  return in && std::memcmp(magic, kBinaryMagic, 8) == 0;
}

WaveState read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  json j = json::parse(in);
  int version = j.at("format_version").get<int>();
  if (version != kCheckpointVersion)
    throw std::runtime_error("checkpoint version " + std::to_string(version) +
                             " unsupported (expected " +
                             std::to_string(kCheckpointVersion) + ")");
  Eigen::Vector2d c(j.at("center")[0].get<double>(), j.at("center")[1].get<double>());
  WaveState s(StarCurve(c, spectrum_from_json(j.at("outer_rho_spectrum"))));
  s.t = j.at("t").get<double>();
  s.eps = j.at("eps").get<double>();
  s.bernoulli_offset = j.at("bernoulli_offset").get<double>();
  s.flux = j.at("flux").get<double>();
  s.phi_outer = grid_from_json(j.at("phi_outer"));
  if (j.at("kind") == "annulus") {
    s.inner = StarCurve(c, spectrum_from_json(j.at("inner_rho_spectrum")));
    s.phi_inner = grid_from_json(j.at("phi_inner"));
  }
  return s;
}

WaveState read_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[8];
  in.read(magic, 8);
  int32_t header[3];
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!in) throw std::runtime_error("checkpoint: truncated header");
  if (header[0] != kCheckpointVersion)
    throw std::runtime_error("checkpoint version " + std::to_string(header[0]) +
                             " unsupported (expected " +
                             std::to_string(kCheckpointVersion) + ")");
  bool annulus = header[1] != 0;
  int n = header[2];
  double meta[6];
  read_doubles_le(in, meta, 6);
  std::vector<double> buf(2 * n);
  auto load_spec = [&]() {
    read_doubles_le(in, buf.data(), 2 * n);
    CVec spec(n);
    for (int i = 0; i < n; ++i) spec[i] = Complex(buf[2 * i], buf[2 * i + 1]);
    return spec;
  };
  Eigen::Vector2d c(meta[4], meta[5]);
  WaveState s(StarCurve(c, load_spec()));
  s.t = meta[0];
  s.eps = meta[1];
  s.bernoulli_offset = meta[2];
  s.flux = meta[3];
  s.phi_outer.resize(n);
  read_doubles_le(in, s.phi_outer.data(), n);
  if (annulus) {
    s.inner = StarCurve(c, load_spec());
    s.phi_inner.resize(n);
    read_doubles_le(in, s.phi_inner.data(), n);
  }
  return s;
}

} // namespace

WaveState read_checkpoint(const std::string& path) {
  return looks_binary(path) ? read_binary(path) : read_text(path);
}

CheckpointInfo checkpoint_info(const std::string& path) {
  CheckpointInfo info;
  info.format = looks_binary(path) ? "binary" : "text";
  WaveState s = read_checkpoint(path);
  info.version = kCheckpointVersion;
  info.t = s.t;
  info.eps = s.eps;
  info.annulus = s.is_annulus();
  info.n_theta = s.outer.n_theta();
  return info;
}

} // namespace capeuler
