#include "dipsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "dipsim/errors.hpp"
#include "dipsim/exact.hpp"
#include "dipsim/io.hpp"
#include "dipsim/particle_filter.hpp"
#include "dipsim/rng.hpp"

#ifndef DIPSIM_VERSION
#define DIPSIM_VERSION "0.1.0"
#endif

namespace dipsim {
namespace {

using nlohmann::ordered_json;

// Fixed stream labels so every derived RNG use has its own lane.
constexpr std::uint64_t kBootstrapStream = 0x626f6f74;   // run-level bootstrap
constexpr std::uint64_t kSweepStreamBase = 0x73770000;   // + point index
constexpr int kBootstrapResamples = 1000;

const char* family_name(GateFamily f) {
  return f == GateFamily::minimal_pair ? "minimal_pair" : "full_mixing";
}

const char* kind_name(MeasurementKind k) {
  return k == MeasurementKind::projective ? "projective" : "weak";
}

const char* initial_name(InitialStateKind k) {
  return k == InitialStateKind::charge_band ? "charge_band" : "dipole_band";
}

std::string engine_name(const RunConfig& cfg) {
  if (cfg.engine == EngineKind::exact) return "exact";
  return "pf:" + std::to_string(cfg.particles);
}

double dipole_axis_max(const std::array<double, 2>& v) {
  return std::max(v[0], v[1]);
}

void finalize_sharpening(const RunConfig& cfg, TrajectoryResult& tr) {
  tr.t_sharp_charge = sharpening_time(tr.var_q, cfg.sharp_eps);
  std::vector<double> dip(tr.var_p.size());
  for (std::size_t i = 0; i < dip.size(); ++i) dip[i] = dipole_axis_max(tr.var_p[i]);
  tr.t_sharp_dipole = sharpening_time(dip, cfg.sharp_eps);
}

// Correlator profiles live on one line of sites: the whole chain in 1D, the
// central row in 2D. Site index = base + x.
struct LineSpec {
  int len = 0;
  int base = 0;
};

LineSpec profile_line(const RunConfig& cfg) {
  if (cfg.dim == 1) return {cfg.Lx, 0};
  return {cfg.Lx, (cfg.Ly / 2) * cfg.Lx};
}

// Mean of f(x, x + d) over the central window x in [len/4, 3 len/4 - d],
// additionally clipped so x + d <= hi_cap (bond observables stop one short).
template <typename F>
double pair_average(const LineSpec& line, int d, int hi_cap, F&& f) {
  const int lo = line.len / 4;
  const int hi = std::min(3 * line.len / 4 - d, hi_cap - d);
  double sum = 0.0;
  int count = 0;
  for (int x = lo; x <= hi; ++x) {
    sum += f(x, x + d);
    ++count;
  }
  if (count == 0) return std::numeric_limits<double>::quiet_NaN();
  return sum / count;
}

void exact_profiles(const RunConfig& cfg, const ProbState& st,
                    TrajectoryResult& tr) {
  const LineSpec line = profile_line(cfg);
  for (int d = 1; d <= line.len / 2; ++d) {
    if (cfg.correlators) {
      tr.corr_charge.push_back(
          pair_average(line, d, line.len - 1, [&](int x, int y) {
            const int sx = line.base + x;
            const int sy = line.base + y;
            return density_pair(st, sx, sy) -
                   density_mean(st, sx) * density_mean(st, sy);
          }));
      if (cfg.dim == 1) {
        tr.corr_dipole.push_back(
            pair_average(line, d, line.len - 2, [&](int x, int y) {
              return cumulative_charge_pair(st, x, y) -
                     cumulative_charge_mean(st, x) *
                         cumulative_charge_mean(st, y);
            }));
      }
    }
    if (cfg.renyi2) {
      tr.renyi2_c.push_back(
          pair_average(line, d, line.len - 1, [&](int x, int y) {
            return renyi2_charge(st, line.base + x, line.base + y);
          }));
      if (cfg.dim == 1) {
        tr.renyi2_d.push_back(
            pair_average(line, d, line.len - 2, [&](int x, int y) {
              return renyi2_dipole(st, x, y);
            }));
      }
    }
  }
}

void pf_profiles(const RunConfig& cfg, const ParticleEnsemble& ens,
                 TrajectoryResult& tr) {
  const LineSpec line = profile_line(cfg);
  for (int d = 1; d <= line.len / 2; ++d) {
    tr.corr_charge.push_back(
        pair_average(line, d, line.len - 1, [&](int x, int y) {
          return pf_connected_density(ens, line.base + x, line.base + y);
        }));
    if (cfg.dim == 1) {
      tr.corr_dipole.push_back(
          pair_average(line, d, line.len - 2, [&](int x, int y) {
            return pf_connected_dipole(ens, x, y);
          }));
    }
  }
}

TrajectoryResult run_exact(const RunConfig& cfg, std::uint64_t seed) {
  const LatticeGeometry geom = config_geometry(cfg);
  const WindowKernel kernel = connected_components(cfg.family);
  Rng rng(seed);
  ProbState st = initial_state(geom, cfg.initial);
  MeasurementRecord rec;
  TrajectoryResult tr;
  tr.seed = seed;
  std::size_t prev_events = 0;
  const auto push_row = [&](int measured) {
    tr.var_q.push_back(charge_variance(st));
    tr.var_p.push_back(dipole_variance(st));
    tr.entropy.push_back(sector_entropy(st));
    tr.n_meas.push_back(measured);
    tr.var_q_err.push_back(0.0);
  };
  push_row(0);
  bool sharp_c = false;
  bool sharp_d = false;
  for (int layer = 0; layer < cfg.horizon; ++layer) {
    step_layer(st, layer, cfg.gamma, cfg.kind, cfg.gamma_w, kernel, rng, rec);
    push_row(static_cast<int>(rec.events.size() - prev_events));
    prev_events = rec.events.size();
    tr.layers_run = layer + 1;
    sharp_c = sharp_c || tr.var_q.back() < cfg.sharp_eps;
    sharp_d = sharp_d || dipole_axis_max(tr.var_p.back()) < cfg.sharp_eps;
    if (cfg.stop_when_sharp && sharp_c && sharp_d) break;
  }
  finalize_sharpening(cfg, tr);
  if (cfg.correlators || cfg.renyi2) exact_profiles(cfg, st, tr);
  return tr;
}

TrajectoryResult run_pf(const RunConfig& cfg, std::uint64_t seed) {
  const LatticeGeometry geom = config_geometry(cfg);
  const WindowKernel kernel = connected_components(cfg.family);
  Rng rng(seed);
  ParticleEnsemble ens = make_ensemble(geom, cfg.initial, cfg.particles, rng);
  TrajectoryResult tr;
  tr.seed = seed;
  tr.n_particles = cfg.particles;
  const auto push_row = [&](int measured) {
    const PfEstimates est = pf_estimates(ens);
    tr.var_q.push_back(est.var_q);
    tr.var_p.push_back(est.var_p);
    tr.entropy.push_back(pf_sector_entropy(ens));
    tr.n_meas.push_back(measured);
    tr.var_q_err.push_back(est.var_q_err);
    tr.ess_min_series.push_back(ens.ess_min);
    tr.resample_series.push_back(ens.resample_count);
    tr.degeneracy_series.push_back(ens.degeneracy_count);
  };
  push_row(0);
  bool sharp_c = false;
  bool sharp_d = false;
  for (int layer = 0; layer < cfg.horizon; ++layer) {
    pf_step_unitary(ens, layer, kernel, rng);
    int measured = 0;
    for (int site = 0; site < geom.sites(); ++site) {
      if (!rng.bernoulli(cfg.gamma)) continue;
      pf_measure(ens, layer, site, cfg.kind, cfg.gamma_w, rng);
      ++measured;
    }
    push_row(measured);
    tr.layers_run = layer + 1;
    sharp_c = sharp_c || tr.var_q.back() < cfg.sharp_eps;
    sharp_d = sharp_d || dipole_axis_max(tr.var_p.back()) < cfg.sharp_eps;
    if (cfg.stop_when_sharp && sharp_c && sharp_d) break;
  }
  finalize_sharpening(cfg, tr);
  tr.ess_min = ens.ess_min;
  tr.resample_count = ens.resample_count;
  tr.degeneracy_count = ens.degeneracy_count;
  if (cfg.correlators) pf_profiles(cfg, ens, tr);
  return tr;
}

std::vector<double> mean_profile(const std::vector<TrajectoryResult>& trajs,
                                 std::vector<double> TrajectoryResult::*member) {
  if (trajs.empty() || (trajs.front().*member).empty()) return {};
  const std::size_t n = (trajs.front().*member).size();
  std::vector<double> mean(n, 0.0);
  for (const auto& tr : trajs)
    for (std::size_t i = 0; i < n; ++i) mean[i] += (tr.*member)[i];
  for (auto& v : mean) v /= static_cast<double>(trajs.size());
  return mean;
}

ordered_json config_json(const RunConfig& cfg) {
  ordered_json j;
  j["dim"] = cfg.dim;
  j["Lx"] = cfg.Lx;
  j["Ly"] = cfg.Ly;
  j["gates"] = family_name(cfg.family);
  j["gamma"] = cfg.gamma;
  j["measurement"] = kind_name(cfg.kind);
  j["gamma_w"] = cfg.gamma_w;
  j["initial"] = initial_name(cfg.initial);
  j["horizon"] = cfg.horizon;
  j["trajectories"] = cfg.trajectories;
  j["engine"] = engine_name(cfg);
  j["seed"] = io::format_u64(cfg.seed);
  j["out"] = cfg.out_dir;
  j["stop_when_sharp"] = cfg.stop_when_sharp;
  j["sharp_eps"] = cfg.sharp_eps;
  j["correlators"] = cfg.correlators;
  j["renyi2"] = cfg.renyi2;
  if (!cfg.sweep_L.empty()) j["sweep_L"] = cfg.sweep_L;
  if (!cfg.sweep_gamma.empty()) j["sweep_gamma"] = cfg.sweep_gamma;
  return j;
}

ordered_json aggregate_json(const std::optional<AggregateStat>& a,
                            int censored) {
  ordered_json j;
  if (a) {
    j["median"] = a->ci.median;
    j["ci_lo"] = a->ci.lo;
    j["ci_hi"] = a->ci.hi;
    j["n_uncensored"] = a->n;
  } else {
    j["median"] = nullptr;
    j["ci_lo"] = nullptr;
    j["ci_hi"] = nullptr;
    j["n_uncensored"] = 0;
  }
  j["censored"] = censored;
  return j;
}

ordered_json profiles_json(const RunConfig& cfg, const EnsembleSummary& s) {
  ordered_json j;
  ordered_json sep = ordered_json::array();
  const std::size_t n = std::max(s.corr_charge.size(), s.renyi2_c.size());
  for (std::size_t d = 1; d <= n; ++d) sep.push_back(d);
  j["separation"] = sep;
  if (cfg.correlators) {
    j["corr_charge"] = s.corr_charge;
    if (cfg.dim == 1) j["corr_dipole"] = s.corr_dipole;
  }
  if (cfg.renyi2) {
    j["renyi2_charge"] = s.renyi2_c;
    if (cfg.dim == 1) j["renyi2_dipole"] = s.renyi2_d;
  }
  return j;
}

std::string fnv_hex(std::string_view data) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(io::fnv1a64(data)));
  return buf;
}

std::string trajectory_file_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "trajectory_%04d.csv", index);
  return buf;
}

RunManifest run_impl(const RunConfig& cfg, int jobs,
                     EnsembleSummary* summary_out) {
  validate_config(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<TrajectoryResult> trajs = simulate_ensemble(cfg, jobs);
  const EnsembleSummary s = summarize(cfg, trajs);
  if (summary_out) *summary_out = s;

  struct FileEntry {
    std::string name;
    std::string content;
  };
  std::vector<FileEntry> files;
  for (int i = 0; i < cfg.trajectories; ++i)
    files.push_back({trajectory_file_name(i), trajectory_csv(cfg, trajs[i])});
  if (cfg.correlators || cfg.renyi2)
    files.push_back({"correlators.csv", correlators_csv(cfg, s)});
  files.push_back({"summary.json", summary_json_text(cfg, trajs, s)});

  const std::filesystem::path dir(cfg.out_dir);
  for (const auto& f : files) io::atomic_write(dir / f.name, f.content);

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  ordered_json m;
  m["schema_version"] = 1;
  m["kind"] = "run_manifest";
  m["generator"] = "dipsim " DIPSIM_VERSION;
  m["config"] = config_json(cfg);
  m["config_text"] = serialize_config(cfg);
  m["jobs"] = jobs;
  m["master_seed"] = io::format_u64(cfg.seed);
  ordered_json seeds = ordered_json::array();
  for (const auto& tr : trajs) seeds.push_back(io::format_u64(tr.seed));
  m["trajectory_seeds"] = seeds;
  m["censored"] = {{"charge", s.censored_charge}, {"dipole", s.censored_dipole}};
  m["degeneracy_total"] = s.degeneracy_total;
  m["wall_clock_seconds"] = elapsed;
  ordered_json inventory = ordered_json::array();
  for (const auto& f : files) {
    ordered_json e;
    e["name"] = f.name;
    e["bytes"] = f.content.size();
    e["fnv1a64"] = fnv_hex(f.content);
    inventory.push_back(e);
  }
  m["files"] = inventory;
  io::atomic_write(dir / "manifest.json", m.dump(2) + "\n");
  return RunManifest{m, dir};
}

// --- compare: minimal strict CSV handling -------------------------------

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;  // parallel to header

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }
};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::size_t pos = 0;
  bool first = true;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (first) {
      t.header = cells;
      t.columns.assign(cells.size(), {});
      first = false;
      continue;
    }
    if (cells.size() != t.header.size())
      throw ConfigError("correlator CSV: ragged row '" + line + "'");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      char* endp = nullptr;
      const double v = std::strtod(cells[i].c_str(), &endp);
      if (endp == cells[i].c_str())
        throw ConfigError("correlator CSV: bad number '" + cells[i] + "'");
      t.columns[i].push_back(v);
    }
  }
  if (first) throw ConfigError("correlator CSV: empty input");
  return t;
}

struct SideFit {
  bool ok = false;
  std::string form;
  double exponent = 0.0;
  double err = 0.0;
  int points = 0;
  std::string note;
};

SideFit classify_decay(const std::vector<double>& x,
                       const std::vector<double>& absy) {
  SideFit out;
  out.points = static_cast<int>(x.size());
  try {
    const ScalingFit fit =
        fit_scaling(x, absy, {FitForm::power, FitForm::exponential});
    const FitResult& best = fit.best_fit();
    out.ok = true;
    out.form = fit_form_name(best.form);
    out.exponent = best.b;
    out.err = best.b_err;
  } catch (const std::invalid_argument& e) {
    out.note = e.what();
  }
  return out;
}

ordered_json side_json(const char* prefix, const SideFit& f) {
  ordered_json j;
  j[std::string(prefix) + "_form"] = f.ok ? ordered_json(f.form) : nullptr;
  j[std::string(prefix) + "_exponent"] =
      f.ok ? ordered_json(f.exponent) : nullptr;
  j[std::string(prefix) + "_exponent_err"] =
      f.ok ? ordered_json(f.err) : nullptr;
  j[std::string(prefix) + "_points"] = f.points;
  if (!f.note.empty()) j[std::string(prefix) + "_note"] = f.note;
  return j;
}

}  // namespace

TrajectoryResult simulate_trajectory(const RunConfig& cfg,
                                     std::uint64_t stream_seed) {
  if (cfg.engine == EngineKind::exact) return run_exact(cfg, stream_seed);
  return run_pf(cfg, stream_seed);
}

std::vector<TrajectoryResult> simulate_ensemble(const RunConfig& cfg,
                                                int jobs) {
  validate_config(cfg);
  const int n = cfg.trajectories;
  std::vector<TrajectoryResult> results(n);
  jobs = std::clamp(jobs, 1, n);
  std::atomic<int> next{0};
  std::mutex err_mutex;
  std::exception_ptr error;
  const auto worker = [&] {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        results[i] = simulate_trajectory(cfg, derive_stream_seed(cfg.seed, i));
      } catch (...) {
        const std::lock_guard<std::mutex> lock(err_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  return results;
}

EnsembleSummary summarize(const RunConfig& cfg,
                          const std::vector<TrajectoryResult>& trajs) {
  EnsembleSummary s;
  std::vector<double> tc;
  std::vector<double> td;
  for (const auto& tr : trajs) {
    if (tr.t_sharp_charge)
      tc.push_back(static_cast<double>(*tr.t_sharp_charge));
    else
      ++s.censored_charge;
    if (tr.t_sharp_dipole)
      td.push_back(static_cast<double>(*tr.t_sharp_dipole));
    else
      ++s.censored_dipole;
    s.degeneracy_total += tr.degeneracy_count;
  }
  Rng boot(derive_stream_seed(cfg.seed, kBootstrapStream));
  if (!tc.empty())
    s.t_sharp_charge =
        AggregateStat{bootstrap_median_ci(tc, kBootstrapResamples, boot),
                      static_cast<int>(tc.size()), s.censored_charge};
  if (!td.empty())
    s.t_sharp_dipole =
        AggregateStat{bootstrap_median_ci(td, kBootstrapResamples, boot),
                      static_cast<int>(td.size()), s.censored_dipole};
  s.corr_charge = mean_profile(trajs, &TrajectoryResult::corr_charge);
  s.corr_dipole = mean_profile(trajs, &TrajectoryResult::corr_dipole);
  s.renyi2_c = mean_profile(trajs, &TrajectoryResult::renyi2_c);
  s.renyi2_d = mean_profile(trajs, &TrajectoryResult::renyi2_d);
  return s;
}

std::string trajectory_csv(const RunConfig& cfg, const TrajectoryResult& tr) {
  const bool pf = cfg.engine == EngineKind::particle_filter;
  std::string out = "layer,var_Q,var_P,entropy,n_measurements";
  if (pf) out += ",N_particles,ESS_min,resample_count,degeneracy_flags";
  out += '\n';
  for (std::size_t i = 0; i < tr.var_q.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += io::format_double(tr.var_q[i]);
    out += ',';
    out += io::format_double(tr.var_p[i][0] + tr.var_p[i][1]);
    out += ',';
    out += io::format_double(tr.entropy[i]);
    out += ',';
    out += std::to_string(tr.n_meas[i]);
    if (pf) {
      out += ',';
      out += std::to_string(tr.n_particles);
      out += ',';
      out += io::format_double(tr.ess_min_series[i]);
      out += ',';
      out += std::to_string(tr.resample_series[i]);
      out += ',';
      out += std::to_string(tr.degeneracy_series[i]);
    }
    out += '\n';
  }
  return out;
}

std::string correlators_csv(const RunConfig& cfg, const EnsembleSummary& s) {
  std::vector<std::pair<const char*, const std::vector<double>*>> cols;
  if (cfg.correlators) {
    cols.emplace_back("corr_charge", &s.corr_charge);
    if (cfg.dim == 1) cols.emplace_back("corr_dipole", &s.corr_dipole);
  }
  if (cfg.renyi2) {
    cols.emplace_back("renyi2_charge", &s.renyi2_c);
    if (cfg.dim == 1) cols.emplace_back("renyi2_dipole", &s.renyi2_d);
  }
  std::string out = "separation";
  std::size_t rows = 0;
  for (const auto& [name, vec] : cols) {
    out += ',';
    out += name;
    rows = std::max(rows, vec->size());
  }
  out += '\n';
  for (std::size_t d = 0; d < rows; ++d) {
    out += std::to_string(d + 1);
    for (const auto& [name, vec] : cols) {
      out += ',';
      out += d < vec->size() ? io::format_double((*vec)[d]) : "nan";
    }
    out += '\n';
  }
  return out;
}

std::string summary_json_text(const RunConfig& cfg,
                              const std::vector<TrajectoryResult>& trajs,
                              const EnsembleSummary& s) {
  const bool pf = cfg.engine == EngineKind::particle_filter;
  ordered_json j;
  j["schema_version"] = 1;
  j["kind"] = "run_summary";
  j["config"] = config_json(cfg);
  ordered_json agg;
  agg["t_sharp_charge"] = aggregate_json(s.t_sharp_charge, s.censored_charge);
  agg["t_sharp_dipole"] = aggregate_json(s.t_sharp_dipole, s.censored_dipole);
  agg["degeneracy_total"] = s.degeneracy_total;
  j["aggregates"] = agg;
  ordered_json arr = ordered_json::array();
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    const TrajectoryResult& tr = trajs[i];
    ordered_json e;
    e["index"] = i;
    e["seed"] = io::format_u64(tr.seed);
    e["layers_run"] = tr.layers_run;
    e["t_sharp_charge"] =
        tr.t_sharp_charge ? ordered_json(*tr.t_sharp_charge) : nullptr;
    e["t_sharp_dipole"] =
        tr.t_sharp_dipole ? ordered_json(*tr.t_sharp_dipole) : nullptr;
    e["final_var_Q"] = tr.var_q.back();
    e["final_var_P"] = tr.var_p.back()[0] + tr.var_p.back()[1];
    e["final_entropy"] = tr.entropy.back();
    if (pf) {
      e["ess_min"] = tr.ess_min;
      e["resample_count"] = tr.resample_count;
      e["degeneracy_count"] = tr.degeneracy_count;
    }
    arr.push_back(e);
  }
  j["trajectories"] = arr;
  if (cfg.correlators || cfg.renyi2) j["profiles"] = profiles_json(cfg, s);
  return j.dump(2) + "\n";
}

RunManifest run(const RunConfig& cfg, int jobs) {
  return run_impl(cfg, jobs, nullptr);
}

std::vector<RunManifest> sweep(const RunConfig& cfg, int jobs) {
  validate_config(cfg);
  const std::vector<int> Ls =
      cfg.sweep_L.empty() ? std::vector<int>{cfg.Lx} : cfg.sweep_L;
  const std::vector<double> gammas = cfg.sweep_gamma.empty()
                                         ? std::vector<double>{cfg.gamma}
                                         : cfg.sweep_gamma;
  std::vector<RunManifest> manifests;
  std::string csv =
      "L,gamma,trajectories,"
      "median_t_sharp_charge,t_sharp_charge_lo,t_sharp_charge_hi,"
      "censored_charge,"
      "median_t_sharp_dipole,t_sharp_dipole_lo,t_sharp_dipole_hi,"
      "censored_dipole,degeneracy_total\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  int point = 0;
  for (int L : Ls) {
    for (double g : gammas) {
      RunConfig sub = cfg;
      sub.sweep_L.clear();
      sub.sweep_gamma.clear();
      sub.Lx = L;
      if (cfg.dim == 2) sub.Ly = L;
      sub.gamma = g;
      sub.seed = derive_stream_seed(cfg.seed, kSweepStreamBase + point);
      char tag[64];
      std::snprintf(tag, sizeof tag, "L%d_g%g", L, g);
      sub.out_dir = (std::filesystem::path(cfg.out_dir) / tag).string();
      EnsembleSummary s;
      manifests.push_back(run_impl(sub, jobs, &s));
      csv += std::to_string(L);
      csv += ',';
      csv += io::format_double(g);
      csv += ',';
      csv += std::to_string(sub.trajectories);
      const auto stat_cells = [&](const std::optional<AggregateStat>& a,
                                  int censored) {
        csv += ',';
        csv += io::format_double(a ? a->ci.median : nan);
        csv += ',';
        csv += io::format_double(a ? a->ci.lo : nan);
        csv += ',';
        csv += io::format_double(a ? a->ci.hi : nan);
        csv += ',';
        csv += std::to_string(censored);
      };
      stat_cells(s.t_sharp_charge, s.censored_charge);
      stat_cells(s.t_sharp_dipole, s.censored_dipole);
      csv += ',';
      csv += std::to_string(s.degeneracy_total);
      csv += '\n';
      ++point;
    }
  }
  io::atomic_write(std::filesystem::path(cfg.out_dir) / "sweep_summary.csv",
                   csv);
  return manifests;
}

CompareReport compare_theory_report(const std::string& sim_csv,
                                    const TheoryParams& tp, double r_lo,
                                    double r_hi, int points,
                                    double tol_charge, double tol_dipole) {
  if (points < 4) throw ConfigError("compare: need at least 4 theory points");
  if (!(r_lo > 0.0) || !(r_hi > r_lo))
    throw ConfigError("compare: need 0 < r_lo < r_hi");
  const CsvTable table = parse_csv(sim_csv);
  const int sep_col = table.column("separation");
  if (sep_col < 0)
    throw ConfigError("compare: input is missing a 'separation' column");

  CompareReport report;
  report.json["schema_version"] = 1;
  report.json["kind"] = "compare_report";
  ordered_json theory_meta;
  theory_meta["J"] = tp.J;
  theory_meta["gamma"] = tp.gamma;
  theory_meta["lambda1"] = tp.lambda1;
  theory_meta["m_d"] = tp.m_d;
  theory_meta["Lambda"] = tp.Lambda;
  theory_meta["r_lo"] = r_lo;
  theory_meta["r_hi"] = r_hi;
  theory_meta["points"] = points;
  theory_meta["t"] = 0.0;

  bool theory_converged = true;
  bool all_pass = true;
  int present = 0;
  ordered_json observables;
  const struct {
    const char* name;
    const char* column;
    Observable obs;
    double tol;
  } specs[] = {{"charge", "corr_charge", Observable::charge, tol_charge},
               {"dipole", "corr_dipole", Observable::dipole, tol_dipole}};
  for (const auto& spec : specs) {
    const int col = table.column(spec.column);
    if (col < 0) continue;
    ++present;
    // Simulation side: |C(d)| for d >= 2 (d = 1 carries the strongest
    // lattice corrections); zeros and non-finite entries are excluded
    // because both candidate forms are fit in log space.
    std::vector<double> xs;
    std::vector<double> ys;
    const auto& seps = table.columns[sep_col];
    const auto& vals = table.columns[col];
    for (std::size_t i = 0; i < seps.size(); ++i) {
      if (seps[i] < 2.0) continue;
      const double v = std::abs(vals[i]);
      if (!std::isfinite(v) || v == 0.0) continue;
      xs.push_back(seps[i]);
      ys.push_back(v);
    }
    const SideFit sim = classify_decay(xs, ys);

    // Theory side: |C(r)| on a geometric grid.
    std::vector<double> rs;
    std::vector<double> cs;
    for (int i = 0; i < points; ++i) {
      const double u = static_cast<double>(i) / (points - 1);
      const double r = r_lo * std::pow(r_hi / r_lo, u);
      const QuadResult q = density_correlator_theory(r, 0.0, tp, spec.obs);
      theory_converged = theory_converged && q.converged;
      const double v = std::abs(q.value);
      if (!std::isfinite(v) || v == 0.0) continue;
      rs.push_back(r);
      cs.push_back(v);
    }
    const SideFit theory = classify_decay(rs, cs);

    bool pass = sim.ok && theory.ok && sim.form == theory.form;
    double diff = std::numeric_limits<double>::quiet_NaN();
    if (pass && sim.form == fit_form_name(FitForm::power)) {
      diff = std::abs(sim.exponent - theory.exponent);
      pass = diff <= spec.tol;
    }
    ordered_json entry = side_json("sim", sim);
    const ordered_json tj = side_json("theory", theory);
    for (const auto& [k, v] : tj.items()) entry[k] = v;
    entry["tolerance"] = spec.tol;
    entry["exponent_diff"] =
        std::isfinite(diff) ? ordered_json(diff) : nullptr;
    entry["pass"] = pass;
    observables[spec.name] = entry;
    all_pass = all_pass && pass;
  }
  if (present == 0)
    throw ConfigError("compare: input has no correlator columns");
  theory_meta["converged"] = theory_converged;
  report.json["theory"] = theory_meta;
  report.json["observables"] = observables;
  report.pass = all_pass && theory_converged;
  report.json["pass"] = report.pass;
  return report;
}

}  // namespace dipsim
