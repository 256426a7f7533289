#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dipsim/errors.hpp"
#include "dipsim/exact.hpp"
#include "dipsim/fitting.hpp"
#include "dipsim/gates.hpp"
#include "dipsim/harness.hpp"
#include "dipsim/lattice.hpp"
#include "dipsim/theory.hpp"

namespace py = pybind11;

namespace {

using namespace dipsim;

GateFamily family_arg(const std::string& s) {
  if (s == "minimal_pair") return GateFamily::minimal_pair;
  if (s == "full_mixing") return GateFamily::full_mixing;
  throw ConfigError("family expects minimal_pair or full_mixing");
}

Observable observable_arg(const std::string& s) {
  if (s == "charge") return Observable::charge;
  if (s == "dipole") return Observable::dipole;
  throw ConfigError("observable expects charge or dipole");
}

Phase phase_arg(const std::string& s) {
  if (s == "weak_weak") return Phase::weak_weak;
  if (s == "sharp_weak") return Phase::sharp_weak;
  if (s == "sharp_sharp") return Phase::sharp_sharp;
  throw ConfigError("phase expects weak_weak, sharp_weak or sharp_sharp");
}

FitForm form_arg(const std::string& s) {
  if (s == "power") return FitForm::power;
  if (s == "exponential") return FitForm::exponential;
  if (s == "log") return FitForm::log_form;
  if (s == "linear") return FitForm::linear;
  throw ConfigError("fit form expects power, exponential, log or linear");
}

py::object json_to_py(const std::string& dumped) {
  return py::module_::import("json").attr("loads")(dumped);
}

py::dict quad_dict(const QuadResult& q) {
  py::dict d;
  d["value"] = q.value;
  d["error"] = q.error;
  d["converged"] = q.converged;
  return d;
}

py::dict trajectory_series(const std::string& config_text,
                           std::uint64_t stream_seed) {
  const RunConfig cfg = parse_config(config_text);
  validate_config(cfg);
  const TrajectoryResult tr = simulate_trajectory(cfg, stream_seed);
  py::dict d;
  d["seed"] = tr.seed;
  d["layers_run"] = tr.layers_run;
  d["var_Q"] = tr.var_q;
  py::list vp;
  for (const auto& v : tr.var_p) vp.append(v[0] + v[1]);
  d["var_P"] = vp;
  d["entropy"] = tr.entropy;
  d["n_measurements"] = tr.n_meas;
  d["t_sharp_charge"] =
      tr.t_sharp_charge ? py::cast(*tr.t_sharp_charge) : py::none();
  d["t_sharp_dipole"] =
      tr.t_sharp_dipole ? py::cast(*tr.t_sharp_dipole) : py::none();
  if (cfg.engine == EngineKind::particle_filter) {
    d["n_particles"] = tr.n_particles;
    d["ess_min"] = tr.ess_min;
    d["resample_count"] = tr.resample_count;
    d["degeneracy_count"] = tr.degeneracy_count;
    d["var_Q_err"] = tr.var_q_err;
  }
  if (!tr.corr_charge.empty()) d["corr_charge"] = tr.corr_charge;
  if (!tr.corr_dipole.empty()) d["corr_dipole"] = tr.corr_dipole;
  if (!tr.renyi2_c.empty()) d["renyi2_charge"] = tr.renyi2_c;
  if (!tr.renyi2_d.empty()) d["renyi2_dipole"] = tr.renyi2_d;
  return d;
}

py::object run_simulation(const std::string& config_text, int jobs) {
  const RunConfig cfg = parse_config(config_text);
  const RunManifest m = run(cfg, jobs);
  return json_to_py(m.json.dump());
}

py::object compare_report_py(const std::string& sim_csv,
                             const TheoryParams& tp, double r_lo, double r_hi,
                             int points, double tol_charge,
                             double tol_dipole) {
  const CompareReport rep = compare_theory_report(sim_csv, tp, r_lo, r_hi,
                                                  points, tol_charge,
                                                  tol_dipole);
  return json_to_py(rep.json.dump());
}

py::dict law_dict(const ScalingLaw& law) {
  py::dict j;
  j["observable"] =
      law.observable == Observable::charge ? "charge" : "dipole";
  if (law.has_variance_form) {
    py::dict v;
    v["ell_exp"] = law.ell_exp;
    v["t_exp"] = law.t_exp;
    v["exp_sqrt_md_decay"] = law.exp_sqrt_md_decay;
    j["variance"] = v;
  } else {
    j["variance"] = py::none();
  }
  if (law.tau_log)
    j["tau"] = "log";
  else if (law.tau_ell_exp)
    j["tau"] = py::dict(py::arg("ell_exp") = *law.tau_ell_exp);
  else
    j["tau"] = py::none();
  if (law.sharpening_log)
    j["sharpening_time"] = "log";
  else if (law.sharpening_ell_exp)
    j["sharpening_time"] = py::dict(py::arg("L_exp") = *law.sharpening_ell_exp);
  else
    j["sharpening_time"] = py::none();
  j["dynamical_z"] =
      law.dynamical_z ? py::cast(*law.dynamical_z) : py::none();
  j["renyi2_order"] = law.renyi2_order == OrderType::none
                          ? "none"
                          : (law.renyi2_order == OrderType::quasi_long_range
                                 ? "quasi_long_range"
                                 : "long_range");
  j["density_power"] =
      law.density_power ? py::cast(*law.density_power) : py::none();
  return j;
}

py::dict exponent_table_py(const std::string& phase, int dim) {
  const PhaseTable t = exponent_table(phase_arg(phase), dim);
  py::dict d;
  d["phase"] = phase;
  d["dim"] = dim;
  d["charge"] = law_dict(t.charge);
  d["dipole"] = law_dict(t.dipole);
  return d;
}

py::dict fit_dict(const FitResult& f) {
  py::dict d;
  d["form"] = fit_form_name(f.form);
  d["ok"] = f.ok;
  d["a"] = f.a;
  d["b"] = f.b;
  d["b_err"] = f.b_err;
  d["rss_fit"] = f.rss_fit;
  d["rss_y"] = f.rss_y;
  return d;
}

py::dict fit_scaling_py(const std::vector<double>& x,
                        const std::vector<double>& y,
                        const std::vector<std::string>& forms) {
  std::vector<FitForm> fs;
  fs.reserve(forms.size());
  for (const auto& s : forms) fs.push_back(form_arg(s));
  const ScalingFit fit = fit_scaling(x, y, fs);
  py::dict d;
  d["best"] = fit_dict(fit.best_fit());
  py::list all;
  for (const auto& f : fit.fits) all.append(fit_dict(f));
  d["fits"] = all;
  return d;
}

py::list window_components_py(const std::string& family) {
  const WindowKernel k = connected_components(family_arg(family));
  py::list out;
  for (const auto& comp : k.components) out.append(comp);
  return out;
}

py::list global_sectors_py(int L, int Ly, int Q, const std::string& family) {
  const LatticeGeometry geom =
      Ly > 0 ? LatticeGeometry::grid(L, Ly) : LatticeGeometry::chain(L);
  if (geom.sites() > LatticeGeometry::kExactSiteCap)
    throw EngineOverflow("sector enumeration supports at most 24 sites");
  const GateFamily fam = family_arg(family);
  std::set<SectorKey> keys;
  for (const std::uint64_t c : configs_with_charge(geom, Q))
    keys.insert(sector_key(geom, c));
  py::list rows;
  for (const SectorKey& key : keys) {
    const SectorConnectivity conn = global_connectivity(geom, key, fam);
    py::dict row;
    row["Q"] = key.q;
    row["P"] = geom.dim() == 1
                   ? py::cast(key.p[0])
                   : py::cast(std::make_pair(key.p[0], key.p[1]));
    row["sector_size"] = conn.sector_size;
    row["n_components"] = conn.component_sizes.size();
    row["largest_component"] = conn.component_sizes.front();
    rows.append(row);
  }
  return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Measurement-conditioned classical dynamics of charge- and "
      "dipole-conserving circuits: exact and particle-filter engines plus "
      "field-theory evaluators.";
  m.attr("__version__") = DIPSIM_VERSION;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<EngineOverflow>(m, "EngineOverflow",
                                         PyExc_OverflowError);
  py::register_exception<QuadratureError>(m, "QuadratureError",
                                          PyExc_ArithmeticError);

  py::class_<LatticeGeometry>(m, "LatticeGeometry")
      .def_static("chain", &LatticeGeometry::chain, py::arg("length"))
      .def_static("grid", &LatticeGeometry::grid, py::arg("lx"),
                  py::arg("ly"))
      .def_property_readonly("dim", &LatticeGeometry::dim)
      .def_property_readonly("sites", &LatticeGeometry::sites)
      .def("length", &LatticeGeometry::length, py::arg("axis"));

  m.def(
      "charge",
      [](const LatticeGeometry& g, std::uint64_t bits) {
        return charge(g, bits);
      },
      py::arg("geom"), py::arg("bits"),
      "Total particle number of a packed configuration.");
  m.def(
      "dipole",
      [](const LatticeGeometry& g, std::uint64_t bits) {
        const auto p = dipole(g, bits);
        return std::make_pair(p[0], p[1]);
      },
      py::arg("geom"), py::arg("bits"),
      "Per-axis dipole moment (second entry 0 in 1D).");

  m.def("window_components", &window_components_py, py::arg("family"),
        "Gate-connected components of the 32 five-site window states.");
  m.def("global_sectors", &global_sectors_py, py::arg("L"), py::arg("Ly"),
        py::arg("Q"), py::arg("family"),
        "Connectivity of every (Q, P) sector at fixed charge Q "
        "(Ly = 0 selects a 1D chain).");

  m.def("trajectory_series", &trajectory_series, py::arg("config_text"),
        py::arg("stream_seed"),
        "Run one measurement trajectory; returns the layer-indexed series.");
  m.def("run_simulation", &run_simulation, py::arg("config_text"),
        py::arg("jobs") = 1,
        "Full ensemble run with file outputs; returns the manifest.");
  m.def("compare_report", &compare_report_py, py::arg("sim_csv"),
        py::arg("params"), py::arg("r_lo") = 10.0, py::arg("r_hi") = 100.0,
        py::arg("points") = 12, py::arg("tol_charge") = 1.0,
        py::arg("tol_dipole") = 0.7,
        "Fit simulated correlators against the theory prediction.");

  py::class_<TheoryParams>(m, "TheoryParams")
      .def(py::init<>())
      .def_readwrite("J", &TheoryParams::J)
      .def_readwrite("gamma", &TheoryParams::gamma)
      .def_readwrite("E_b", &TheoryParams::E_b)
      .def_readwrite("E_s", &TheoryParams::E_s)
      .def_readwrite("lambda1", &TheoryParams::lambda1)
      .def_readwrite("m_d", &TheoryParams::m_d)
      .def_readwrite("Lambda", &TheoryParams::Lambda)
      .def_readwrite("gl_order", &TheoryParams::gl_order)
      .def_readwrite("rel_tol", &TheoryParams::rel_tol);

  m.def("rho_s", &rho_s, py::arg("gamma"), py::arg("J"),
        "Dipole stiffness of the coarse-grained action.");
  m.def("rho_bar", &rho_bar, py::arg("J"), "Charge coefficient.");
  m.def("luttinger_K", &luttinger_K, py::arg("params"),
        "Luttinger parameter of the dipole sine-Gordon theory.");
  m.def("gamma_critical", &gamma_critical, py::arg("J"), py::arg("E_b"),
        "Measurement rate where K crosses the BKT value 2.");
  m.def(
      "ln_renyi2",
      [](double x, double t, const TheoryParams& p, const std::string& obs) {
        return quad_dict(ln_renyi2_integral(x, t, p, observable_arg(obs)));
      },
      py::arg("x"), py::arg("t"), py::arg("params"), py::arg("observable"),
      "ln C_2(x, t); converged=False flags the infrared-divergent case.");
  m.def(
      "density_correlator",
      [](double r, double t, const TheoryParams& p, const std::string& obs) {
        return quad_dict(
            density_correlator_theory(r, t, p, observable_arg(obs)));
      },
      py::arg("r"), py::arg("t"), py::arg("params"), py::arg("observable"),
      "Equal-kernel density correlator C(r, t).");

  m.def("exponent_table", &exponent_table_py, py::arg("phase"),
        py::arg("dim"), "Tabulated asymptotic exponents for a phase.");
  m.def("fit_scaling", &fit_scaling_py, py::arg("x"), py::arg("y"),
        py::arg("forms"),
        "Least-squares decay-form classification over the given forms.");
}
