#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dipsim/config.hpp"
#include "dipsim/fitting.hpp"
#include "dipsim/theory.hpp"

namespace dipsim {

// Per-trajectory time series. Row 0 describes the initial state; row t the
// state after t layers, so sharpening times are layer counts directly.
struct TrajectoryResult {
  std::uint64_t seed = 0;
  int layers_run = 0;
  std::vector<double> var_q;
  std::vector<std::array<double, 2>> var_p;
  std::vector<double> entropy;
  std::vector<int> n_meas;
  std::vector<double> var_q_err;  // jackknife width; zero for exact engine
  std::optional<int> t_sharp_charge;  // absent = censored at the horizon
  std::optional<int> t_sharp_dipole;
  // Particle-filter bookkeeping (n_particles == 0 for the exact engine).
  std::size_t n_particles = 0;
  double ess_min = 0.0;
  int resample_count = 0;
  int degeneracy_count = 0;
  std::vector<double> ess_min_series;
  std::vector<int> resample_series;
  std::vector<int> degeneracy_series;
  // Final-state profiles by separation (index 0 <-> separation 1), averaged
  // over central site pairs; filled when the config requests them.
  std::vector<double> corr_charge;
  std::vector<double> corr_dipole;
  std::vector<double> renyi2_c;
  std::vector<double> renyi2_d;
};

TrajectoryResult simulate_trajectory(const RunConfig& cfg,
                                     std::uint64_t stream_seed);

// Runs all trajectories with per-index derived seeds; results are identical
// for any worker count.
std::vector<TrajectoryResult> simulate_ensemble(const RunConfig& cfg,
                                                int jobs);

struct AggregateStat {
  MedianCI ci;
  int n = 0;        // uncensored trajectories entering the statistic
  int censored = 0;
};

struct EnsembleSummary {
  std::optional<AggregateStat> t_sharp_charge;  // absent if all censored
  std::optional<AggregateStat> t_sharp_dipole;
  int censored_charge = 0;
  int censored_dipole = 0;
  int degeneracy_total = 0;
  std::vector<double> corr_charge;  // ensemble means by separation
  std::vector<double> corr_dipole;
  std::vector<double> renyi2_c;
  std::vector<double> renyi2_d;
};

EnsembleSummary summarize(const RunConfig& cfg,
                          const std::vector<TrajectoryResult>& trajs);

// Data-file renderers (exposed so tests can pin the formats).
std::string trajectory_csv(const RunConfig& cfg, const TrajectoryResult& tr);
std::string correlators_csv(const RunConfig& cfg, const EnsembleSummary& s);
std::string summary_json_text(const RunConfig& cfg,
                              const std::vector<TrajectoryResult>& trajs,
                              const EnsembleSummary& s);

struct RunManifest {
  nlohmann::ordered_json json;
  std::filesystem::path directory;
};

// Executes one config and writes trajectory CSVs, optional correlators.csv,
// summary.json, and manifest.json (all atomically). Identical config + seed
// reproduce identical data files; only the manifest's wall-clock differs.
RunManifest run(const RunConfig& cfg, int jobs);

// Cartesian sweep over the config's L/gamma axes; each point runs into its
// own subdirectory with a derived master seed, plus a sweep_summary.csv.
std::vector<RunManifest> sweep(const RunConfig& cfg, int jobs);

struct CompareReport {
  nlohmann::ordered_json json;
  bool pass = false;
};

// Fits simulated correlator profiles (correlators.csv content) and the
// theory correlator on [r_lo, r_hi], then compares decay forms and
// exponents per observable within the given tolerances.
CompareReport compare_theory_report(const std::string& sim_csv,
                                    const TheoryParams& tp, double r_lo,
                                    double r_hi, int points,
                                    double tol_charge, double tol_dipole);

}  // namespace dipsim
