#pragma once

#include "capeuler/wave_solver.hpp"

#include <string>

// Versioned state checkpointing. Text checkpoints are JSON and round-trip
// bit-exactly (shortest round-trip float serialization); binary checkpoints
// carry the spectra as little-endian float64 (re, im) pairs.

namespace capeuler {

inline constexpr int kCheckpointVersion = 1;

struct CheckpointInfo {
  int version = 0;
  double t = 0.0;
  double eps = 0.0;
  bool annulus = false;
  int n_theta = 0;
  std::string format; // "text" | "binary"
};

void write_checkpoint_text(const std::string& path, const WaveState& s);
void write_checkpoint_binary(const std::string& path, const WaveState& s);
WaveState read_checkpoint(const std::string& path);
CheckpointInfo checkpoint_info(const std::string& path);

} // namespace capeuler
