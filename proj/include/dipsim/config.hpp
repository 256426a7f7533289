#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dipsim/exact.hpp"
#include "dipsim/gates.hpp"

namespace dipsim {

enum class EngineKind { exact, particle_filter };

// One run's full parameter set. The file format is a flat INI-style
// key-value schema with strict unknown-key rejection; every key is optional
// and falls back to the defaults below.
struct RunConfig {
  // [lattice]
  int dim = 1;
  int Lx = 10;
  int Ly = 1;
  // [gates]
  GateFamily family = GateFamily::full_mixing;
  // [measure]
  double gamma = 0.1;
  MeasurementKind kind = MeasurementKind::projective;
  double gamma_w = 1.0;
  // [run]
  InitialStateKind initial = InitialStateKind::charge_band;
  int horizon = 100;
  int trajectories = 10;
  EngineKind engine = EngineKind::exact;
  std::size_t particles = 1000;  // used when engine == particle_filter
  std::uint64_t seed = 1;
  std::string out_dir = "runs/out";
  bool stop_when_sharp = false;
  double sharp_eps = 0.01;
  // [observables]
  bool correlators = false;  // final-layer connected density correlators
  bool renyi2 = false;       // final-layer Renyi-2 profiles
  // [sweep]
  std::vector<int> sweep_L;
  std::vector<double> sweep_gamma;
};

bool operator==(const RunConfig& a, const RunConfig& b);
inline bool operator!=(const RunConfig& a, const RunConfig& b) {
  return !(a == b);
}

// Strict parse: unknown sections, unknown keys, duplicate keys, and
// malformed values all throw ConfigError. parse(serialize(c)) == c.
RunConfig parse_config(const std::string& text);
std::string serialize_config(const RunConfig& cfg);

// Cross-field validation: throws ConfigError for invalid physics parameters
// and EngineOverflow when the lattice exceeds the chosen engine's reach.
void validate_config(const RunConfig& cfg);

LatticeGeometry config_geometry(const RunConfig& cfg);

}  // namespace dipsim
