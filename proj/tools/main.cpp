#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dipsim/errors.hpp"
#include "dipsim/exact.hpp"
#include "dipsim/gates.hpp"
#include "dipsim/harness.hpp"
#include "dipsim/io.hpp"
#include "dipsim/lattice.hpp"
#include "dipsim/theory.hpp"

namespace {

using namespace dipsim;
using nlohmann::ordered_json;

RunConfig load_run_config(const std::string& path) {
  if (path.empty()) return RunConfig{};
  if (!std::filesystem::exists(path))
    throw ConfigError("config file not found: " + path);
  return parse_config(io::read_file(path));
}

void apply_engine_flag(RunConfig& cfg, const std::string& s) {
  if (s == "exact") {
    cfg.engine = EngineKind::exact;
    return;
  }
  if (s.rfind("pf:", 0) == 0) {
    char* end = nullptr;
    const long long n = std::strtoll(s.c_str() + 3, &end, 10);
    if (end != nullptr && *end == '\0' && n > 0) {
      cfg.engine = EngineKind::particle_filter;
      cfg.particles = static_cast<std::size_t>(n);
      return;
    }
  }
  throw ConfigError("--engine expects 'exact' or 'pf:N' (N > 0)");
}

GateFamily family_from_string(const std::string& s) {
  if (s == "minimal_pair") return GateFamily::minimal_pair;
  if (s == "full_mixing") return GateFamily::full_mixing;
  throw ConfigError("--family expects minimal_pair or full_mixing");
}

Observable observable_from_string(const std::string& s) {
  if (s == "charge") return Observable::charge;
  if (s == "dipole") return Observable::dipole;
  throw ConfigError("--observable expects charge or dipole");
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::fwrite(content.data(), 1, content.size(), stdout);
  } else {
    io::atomic_write(out_path, content);
    std::printf("wrote %s\n", out_path.c_str());
  }
}

// Options shared by simulate and sweep; CLI flags override the config file.
struct RunFlags {
  std::string config_path;
  std::string out_override;
  std::string engine_override;
  std::uint64_t seed = 0;
  int jobs = 1;
  CLI::Option* seed_opt = nullptr;
};

void add_run_flags(CLI::App* sub, RunFlags& rf) {
  sub->add_option("--config", rf.config_path,
                  "INI-style config file (defaults apply when omitted)");
  sub->add_option("--out", rf.out_override,
                  "output directory (overrides config)");
  sub->add_option("--engine", rf.engine_override,
                  "exact or pf:N (overrides config)");
  rf.seed_opt =
      sub->add_option("--seed", rf.seed, "master seed (overrides config)");
  sub->add_option("--jobs", rf.jobs, "worker threads")
      ->check(CLI::PositiveNumber);
}

RunConfig resolve_config(const RunFlags& rf) {
  RunConfig cfg = load_run_config(rf.config_path);
  if (rf.seed_opt->count() > 0) cfg.seed = rf.seed;
  if (!rf.out_override.empty()) cfg.out_dir = rf.out_override;
  if (!rf.engine_override.empty()) apply_engine_flag(cfg, rf.engine_override);
  return cfg;
}

// Theory parameter flags shared by the theory and compare subcommands.
void add_theory_flags(CLI::App* sub, TheoryParams& tp) {
  sub->add_option("--J", tp.J, "microscopic coupling J");
  sub->add_option("--gamma", tp.gamma, "measurement rate");
  sub->add_option("--E_b", tp.E_b, "bound vortex-pair core energy");
  sub->add_option("--E_s", tp.E_s, "single vortex core energy");
  sub->add_option("--lambda1", tp.lambda1, "charge-vortex stiffness");
  sub->add_option("--m_d", tp.m_d, "dipole-vortex mass (0 = fuzzy phase)");
  sub->add_option("--Lambda", tp.Lambda, "momentum/frequency cutoff");
  sub->add_option("--order", tp.gl_order, "Gauss-Legendre order per panel")
      ->check(CLI::PositiveNumber);
  sub->add_option("--rel_tol", tp.rel_tol, "quadrature convergence tolerance");
}

std::string window_table_csv(GateFamily fam) {
  const LatticeGeometry w5 = LatticeGeometry::chain(kWindowSize);
  const WindowKernel k = connected_components(fam);
  std::string csv = "window_state,Q,P,component_id,component_size\n";
  for (std::uint32_t s = 0; s < kWindowStates; ++s) {
    csv += std::to_string(s);
    csv += ',';
    csv += std::to_string(charge(w5, s));
    csv += ',';
    csv += std::to_string(dipole(w5, s)[0]);
    csv += ',';
    csv += std::to_string(k.component_of[s]);
    csv += ',';
    csv += std::to_string(k.component(s).size());
    csv += '\n';
  }
  return csv;
}

std::string global_sector_csv(const LatticeGeometry& geom, int q,
                              GateFamily fam) {
  if (geom.sites() > LatticeGeometry::kExactSiteCap)
    throw EngineOverflow("sector enumeration supports at most " +
                         std::to_string(LatticeGeometry::kExactSiteCap) +
                         " sites");
  if (q < 0 || q > geom.sites())
    throw ConfigError("--Q must lie in [0, sites]");
  std::set<SectorKey> keys;
  for (const std::uint64_t c : configs_with_charge(geom, q))
    keys.insert(sector_key(geom, c));
  std::string csv = geom.dim() == 1
                        ? "Q,P,sector_size,n_components,largest_component\n"
                        : "Q,Px,Py,sector_size,n_components,largest_component\n";
  for (const SectorKey& key : keys) {
    const SectorConnectivity conn = global_connectivity(geom, key, fam);
    csv += std::to_string(key.q);
    csv += ',';
    csv += std::to_string(key.p[0]);
    if (geom.dim() == 2) {
      csv += ',';
      csv += std::to_string(key.p[1]);
    }
    csv += ',';
    csv += std::to_string(conn.sector_size);
    csv += ',';
    csv += std::to_string(conn.component_sizes.size());
    csv += ',';
    csv += std::to_string(conn.component_sizes.front());
    csv += '\n';
  }
  return csv;
}

ordered_json law_json(const ScalingLaw& law) {
  ordered_json j;
  j["observable"] = law.observable == Observable::charge ? "charge" : "dipole";
  if (law.has_variance_form) {
    ordered_json v;
    v["ell_exp"] = law.ell_exp;
    v["t_exp"] = law.t_exp;
    v["exp_sqrt_md_decay"] = law.exp_sqrt_md_decay;
    j["variance"] = v;
  } else {
    j["variance"] = nullptr;
  }
  if (law.tau_log)
    j["tau"] = "log";
  else if (law.tau_ell_exp)
    j["tau"] = ordered_json{{"ell_exp", *law.tau_ell_exp}};
  else
    j["tau"] = nullptr;
  if (law.sharpening_log)
    j["sharpening_time"] = "log";
  else if (law.sharpening_ell_exp)
    j["sharpening_time"] = ordered_json{{"L_exp", *law.sharpening_ell_exp}};
  else
    j["sharpening_time"] = nullptr;
  j["dynamical_z"] =
      law.dynamical_z ? ordered_json(*law.dynamical_z) : nullptr;
  switch (law.renyi2_order) {
    case OrderType::none:
      j["renyi2_order"] = "none";
      break;
    case OrderType::quasi_long_range:
      j["renyi2_order"] = "quasi_long_range";
      break;
    case OrderType::long_range:
      j["renyi2_order"] = "long_range";
      break;
  }
  j["density_power"] =
      law.density_power ? ordered_json(*law.density_power) : nullptr;
  return j;
}

Phase phase_from_string(const std::string& s) {
  if (s == "weak_weak") return Phase::weak_weak;
  if (s == "sharp_weak") return Phase::sharp_weak;
  if (s == "sharp_sharp") return Phase::sharp_sharp;
  throw ConfigError("--phase expects weak_weak, sharp_weak or sharp_sharp");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "dipsim: measurement-conditioned dynamics of charge- and "
      "dipole-conserving circuits"};
  app.set_version_flag("--version", std::string("dipsim ") + DIPSIM_VERSION);
  app.require_subcommand(1);

  // --- simulate -----------------------------------------------------------
  auto* simulate = app.add_subcommand(
      "simulate", "run trajectories for one config and write CSV/JSON");
  RunFlags sim_flags;
  add_run_flags(simulate, sim_flags);
  simulate->callback([&] {
    const RunConfig cfg = resolve_config(sim_flags);
    const RunManifest m = run(cfg, sim_flags.jobs);
    std::printf("wrote %s (%d trajectories, censored charge=%d dipole=%d)\n",
                (m.directory / "manifest.json").c_str(), cfg.trajectories,
                m.json["censored"]["charge"].get<int>(),
                m.json["censored"]["dipole"].get<int>());
  });

  // --- sweep --------------------------------------------------------------
  auto* sweep_cmd = app.add_subcommand(
      "sweep", "run the config's L/gamma grid and tabulate sharpening times");
  RunFlags sweep_flags;
  add_run_flags(sweep_cmd, sweep_flags);
  sweep_cmd->callback([&] {
    const RunConfig cfg = resolve_config(sweep_flags);
    const auto manifests = sweep(cfg, sweep_flags.jobs);
    std::printf("wrote %s (%zu points)\n",
                (std::filesystem::path(cfg.out_dir) / "sweep_summary.csv")
                    .c_str(),
                manifests.size());
  });

  // --- sectors ------------------------------------------------------------
  auto* sectors = app.add_subcommand(
      "sectors", "tabulate gate-connected components of (Q, P) sectors");
  std::string sec_family = "full_mixing";
  std::string sec_out;
  bool sec_global = false;
  int sec_L = 10;
  int sec_Ly = 0;
  int sec_Q = -1;
  sectors->add_option("--family", sec_family,
                      "gate family (minimal_pair or full_mixing)");
  sectors->add_option("--out", sec_out, "output CSV file (default: stdout)");
  sectors->add_flag("--global", sec_global,
                    "enumerate whole-lattice sectors instead of one window");
  sectors->add_option("--L", sec_L, "lattice length (with --global)");
  sectors->add_option("--Ly", sec_Ly,
                      "second axis length; 0 = 1D chain (with --global)");
  sectors->add_option("--Q", sec_Q,
                      "charge sector (with --global; default floor(N/2))");
  sectors->callback([&] {
    const GateFamily fam = family_from_string(sec_family);
    if (!sec_global) {
      emit(sec_out, window_table_csv(fam));
      return;
    }
    const LatticeGeometry geom = sec_Ly > 0
                                     ? LatticeGeometry::grid(sec_L, sec_Ly)
                                     : LatticeGeometry::chain(sec_L);
    const int q = sec_Q >= 0 ? sec_Q : geom.sites() / 2;
    emit(sec_out, global_sector_csv(geom, q, fam));
  });

  // --- theory -------------------------------------------------------------
  auto* theory = app.add_subcommand(
      "theory", "evaluate the coarse-grained field-theory predictions");
  theory->require_subcommand(1);

  auto* lutt = theory->add_subcommand(
      "luttinger", "dipole stiffness and Luttinger parameter K(gamma)");
  TheoryParams lutt_params;
  add_theory_flags(lutt, lutt_params);
  lutt->callback([&] {
    std::printf("rho_s = %.12g\n", rho_s(lutt_params.gamma, lutt_params.J));
    std::printf("rho_bar = %.12g\n", rho_bar(lutt_params.J));
    std::printf("K = %.12g\n", luttinger_K(lutt_params));
  });

  auto* gammac = theory->add_subcommand(
      "gammac", "measurement rate where K crosses the BKT value 2");
  TheoryParams gc_params;
  add_theory_flags(gammac, gc_params);
  gammac->callback([&] {
    std::printf("gamma_c = %.12g\n",
                gamma_critical(gc_params.J, gc_params.E_b));
  });

  auto* corr = theory->add_subcommand(
      "correlator", "equal-time density correlator C(r) on a geometric grid");
  TheoryParams corr_params;
  add_theory_flags(corr, corr_params);
  std::string corr_obs = "dipole";
  std::string corr_out;
  double corr_rmin = 10.0;
  double corr_rmax = 100.0;
  double corr_t = 0.0;
  int corr_points = 12;
  bool corr_allow = false;
  corr->add_option("--observable", corr_obs, "charge or dipole");
  corr->add_option("--r_min", corr_rmin, "smallest separation");
  corr->add_option("--r_max", corr_rmax, "largest separation");
  corr->add_option("--t", corr_t, "time argument of the kernel");
  corr->add_option("--points", corr_points, "grid points")
      ->check(CLI::Range(2, 10000));
  corr->add_option("--out", corr_out, "output CSV file (default: stdout)");
  corr->add_flag("--allow_nonconverged", corr_allow,
                 "report non-converged points instead of failing");
  corr->callback([&] {
    if (!(corr_rmin > 0.0) || !(corr_rmax > corr_rmin))
      throw ConfigError("need 0 < r_min < r_max");
    const Observable obs = observable_from_string(corr_obs);
    std::string csv = "r,value,error,converged\n";
    bool all_ok = true;
    for (int i = 0; i < corr_points; ++i) {
      const double u =
          corr_points == 1 ? 0.0
                           : static_cast<double>(i) / (corr_points - 1);
      const double r = corr_rmin * std::pow(corr_rmax / corr_rmin, u);
      const QuadResult qr =
          density_correlator_theory(r, corr_t, corr_params, obs);
      all_ok = all_ok && qr.converged;
      csv += io::format_double(r);
      csv += ',';
      csv += io::format_double(qr.value);
      csv += ',';
      csv += io::format_double(qr.error);
      csv += ',';
      csv += qr.converged ? '1' : '0';
      csv += '\n';
    }
    emit(corr_out, csv);
    if (!all_ok && !corr_allow)
      throw QuadratureError(
          "correlator quadrature did not converge at the requested "
          "tolerance; rerun with --allow_nonconverged to keep the table");
  });

  auto* lnr = theory->add_subcommand(
      "lnrenyi", "ln C_2(x, t) of the reduced-density diagnostic");
  TheoryParams lnr_params;
  add_theory_flags(lnr, lnr_params);
  std::string lnr_obs = "dipole";
  std::string lnr_out;
  double lnr_xmin = 10.0;
  double lnr_xmax = 100.0;
  double lnr_t = 0.0;
  int lnr_points = 12;
  bool lnr_allow = false;
  lnr->add_option("--observable", lnr_obs, "charge or dipole");
  lnr->add_option("--x_min", lnr_xmin, "smallest separation");
  lnr->add_option("--x_max", lnr_xmax, "largest separation");
  lnr->add_option("--t", lnr_t, "time argument of the kernel");
  lnr->add_option("--points", lnr_points, "grid points")
      ->check(CLI::Range(2, 10000));
  lnr->add_option("--out", lnr_out, "output CSV file (default: stdout)");
  lnr->add_flag("--allow_nonconverged", lnr_allow,
                "report non-converged points instead of failing");
  lnr->callback([&] {
    if (!(lnr_xmin > 0.0) || !(lnr_xmax > lnr_xmin))
      throw ConfigError("need 0 < x_min < x_max");
    const Observable obs = observable_from_string(lnr_obs);
    std::string csv = "x,value,error,converged\n";
    bool all_ok = true;
    for (int i = 0; i < lnr_points; ++i) {
      const double u =
          lnr_points == 1 ? 0.0 : static_cast<double>(i) / (lnr_points - 1);
      const double x = lnr_xmin * std::pow(lnr_xmax / lnr_xmin, u);
      const QuadResult qr = ln_renyi2_integral(x, lnr_t, lnr_params, obs);
      all_ok = all_ok && qr.converged;
      csv += io::format_double(x);
      csv += ',';
      csv += io::format_double(qr.value);
      csv += ',';
      csv += io::format_double(qr.error);
      csv += ',';
      csv += qr.converged ? '1' : '0';
      csv += '\n';
    }
    emit(lnr_out, csv);
    if (!all_ok && !lnr_allow)
      throw QuadratureError(
          "ln C_2 quadrature did not converge (the charge observable with "
          "m_d = 0 is infrared divergent); rerun with --allow_nonconverged "
          "to keep the table");
  });

  auto* table = theory->add_subcommand(
      "table", "tabulated asymptotic exponents for a phase");
  std::string table_phase = "sharp_weak";
  int table_dim = 1;
  table->add_option("--phase", table_phase,
                    "weak_weak, sharp_weak or sharp_sharp");
  table->add_option("--dim", table_dim, "dimension (1 or 2)")
      ->check(CLI::Range(1, 2));
  table->callback([&] {
    const PhaseTable t = exponent_table(phase_from_string(table_phase),
                                        table_dim);
    ordered_json j;
    j["phase"] = table_phase;
    j["dim"] = table_dim;
    j["charge"] = law_json(t.charge);
    j["dipole"] = law_json(t.dipole);
    std::printf("%s\n", j.dump(2).c_str());
  });

  // --- compare ------------------------------------------------------------
  auto* compare = app.add_subcommand(
      "compare",
      "fit simulated correlator profiles against the theory prediction");
  TheoryParams cmp_params;
  add_theory_flags(compare, cmp_params);
  std::string cmp_sim;
  std::string cmp_out;
  double cmp_rlo = 10.0;
  double cmp_rhi = 100.0;
  int cmp_points = 12;
  double cmp_tol_charge = 1.0;
  double cmp_tol_dipole = 0.7;
  compare->add_option("--sim", cmp_sim, "correlators.csv from a simulate run")
      ->required();
  compare->add_option("--out", cmp_out,
                      "report JSON file (default: stdout)");
  compare->add_option("--r_lo", cmp_rlo, "theory fit window lower edge");
  compare->add_option("--r_hi", cmp_rhi, "theory fit window upper edge");
  compare->add_option("--points", cmp_points, "theory grid points")
      ->check(CLI::Range(4, 10000));
  compare->add_option("--tol_charge", cmp_tol_charge,
                      "max |sim - theory| power-law exponent gap (charge)");
  compare->add_option("--tol_dipole", cmp_tol_dipole,
                      "max |sim - theory| power-law exponent gap (dipole)");
  compare->callback([&] {
    if (!std::filesystem::exists(cmp_sim))
      throw ConfigError("simulation CSV not found: " + cmp_sim);
    const CompareReport rep =
        compare_theory_report(io::read_file(cmp_sim), cmp_params, cmp_rlo,
                              cmp_rhi, cmp_points, cmp_tol_charge,
                              cmp_tol_dipole);
    emit(cmp_out, rep.json.dump(2) + "\n");
    std::printf("compare: %s\n", rep.pass ? "PASS" : "FAIL");
    if (!rep.json["theory"]["converged"].get<bool>())
      throw QuadratureError(
          "theory correlator quadrature did not converge in the fit window");
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const EngineOverflow& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const QuadratureError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
