#include "dipsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "dipsim/errors.hpp"
#include "dipsim/io.hpp"

namespace dipsim {

bool operator==(const RunConfig& a, const RunConfig& b) {
  return a.dim == b.dim && a.Lx == b.Lx && a.Ly == b.Ly &&
         a.family == b.family && a.gamma == b.gamma && a.kind == b.kind &&
         a.gamma_w == b.gamma_w && a.initial == b.initial &&
         a.horizon == b.horizon && a.trajectories == b.trajectories &&
         a.engine == b.engine && a.particles == b.particles &&
         a.seed == b.seed && a.out_dir == b.out_dir &&
         a.stop_when_sharp == b.stop_when_sharp &&
         a.sharp_eps == b.sharp_eps && a.correlators == b.correlators &&
         a.renyi2 == b.renyi2 && a.sweep_L == b.sweep_L &&
         a.sweep_gamma == b.sweep_gamma;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long r = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return r;
  } catch (const std::exception&) {
    fail("config key '" + key + "': expected integer, got '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const unsigned long long r = std::stoull(v, &pos);
    if (pos != v.size() || (!v.empty() && v[0] == '-'))
      throw std::invalid_argument(v);
    return r;
  } catch (const std::exception&) {
    fail("config key '" + key + "': expected unsigned integer, got '" + v +
         "'");
  }
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double r = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return r;
  } catch (const std::exception&) {
    fail("config key '" + key + "': expected number, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  fail("config key '" + key + "': expected true or false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct KV {
  std::string section;
  std::string key;
  std::string value;
};

std::vector<KV> tokenize(const std::string& text) {
  std::vector<KV> items;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // Inline comments start at whitespace + '#'; full-line comments may use
    // '#' or ';' in column one.
    if (const auto cut = line.find(" #"); cut != std::string::npos)
      line = line.substr(0, cut);
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        fail("config line " + std::to_string(lineno) + ": malformed section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail("config line " + std::to_string(lineno) + ": expected key = value");
    KV kv;
    kv.section = section;
    kv.key = trim(line.substr(0, eq));
    kv.value = trim(line.substr(eq + 1));
    if (kv.key.empty())
      fail("config line " + std::to_string(lineno) + ": empty key");
    items.push_back(kv);
  }
  return items;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::set<std::string> seen;
  for (const KV& kv : tokenize(text)) {
    const std::string path = kv.section + "." + kv.key;
    if (!seen.insert(path).second) fail("duplicate config key '" + path + "'");
    if (kv.section == "lattice") {
      if (kv.key == "dim")
        cfg.dim = static_cast<int>(parse_int(path, kv.value));
      else if (kv.key == "L" || kv.key == "Lx")
        cfg.Lx = static_cast<int>(parse_int(path, kv.value));
      else if (kv.key == "Ly")
        cfg.Ly = static_cast<int>(parse_int(path, kv.value));
      else
        fail("unknown config key '" + path + "'");
    } else if (kv.section == "gates") {
      if (kv.key == "family") {
        if (kv.value == "full_mixing")
          cfg.family = GateFamily::full_mixing;
        else if (kv.value == "minimal_pair")
          cfg.family = GateFamily::minimal_pair;
        else
          fail("config key '" + path +
               "': expected full_mixing or minimal_pair");
      } else {
        fail("unknown config key '" + path + "'");
      }
    } else if (kv.section == "measure") {
      if (kv.key == "gamma")
        cfg.gamma = parse_real(path, kv.value);
      else if (kv.key == "kind") {
        if (kv.value == "projective")
          cfg.kind = MeasurementKind::projective;
        else if (kv.value == "weak")
          cfg.kind = MeasurementKind::weak;
        else
          fail("config key '" + path + "': expected projective or weak");
      } else if (kv.key == "gamma_w")
        cfg.gamma_w = parse_real(path, kv.value);
      else
        fail("unknown config key '" + path + "'");
    } else if (kv.section == "run") {
      if (kv.key == "initial") {
        if (kv.value == "charge_band")
          cfg.initial = InitialStateKind::charge_band;
        else if (kv.value == "dipole_band")
          cfg.initial = InitialStateKind::dipole_band;
        else
          fail("config key '" + path +
               "': expected charge_band or dipole_band");
      } else if (kv.key == "horizon")
        cfg.horizon = static_cast<int>(parse_int(path, kv.value));
      else if (kv.key == "trajectories")
        cfg.trajectories = static_cast<int>(parse_int(path, kv.value));
      else if (kv.key == "engine") {
        if (kv.value == "exact") {
          cfg.engine = EngineKind::exact;
        } else if (kv.value.rfind("pf:", 0) == 0) {
          cfg.engine = EngineKind::particle_filter;
          const long long n = parse_int(path, kv.value.substr(3));
          if (n <= 0) fail("config key '" + path + "': pf:N needs N > 0");
          cfg.particles = static_cast<std::size_t>(n);
        } else {
          fail("config key '" + path + "': expected exact or pf:N");
        }
      } else if (kv.key == "seed")
        cfg.seed = parse_u64(path, kv.value);
      else if (kv.key == "out")
        cfg.out_dir = kv.value;
      else if (kv.key == "stop_when_sharp")
        cfg.stop_when_sharp = parse_bool(path, kv.value);
      else if (kv.key == "sharp_eps")
        cfg.sharp_eps = parse_real(path, kv.value);
      else
        fail("unknown config key '" + path + "'");
    } else if (kv.section == "observables") {
      if (kv.key == "correlators")
        cfg.correlators = parse_bool(path, kv.value);
      else if (kv.key == "renyi2")
        cfg.renyi2 = parse_bool(path, kv.value);
      else
        fail("unknown config key '" + path + "'");
    } else if (kv.section == "sweep") {
      if (kv.key == "L") {
        cfg.sweep_L.clear();
        for (const std::string& s : split_list(kv.value))
          cfg.sweep_L.push_back(static_cast<int>(parse_int(path, s)));
      } else if (kv.key == "gamma") {
        cfg.sweep_gamma.clear();
        for (const std::string& s : split_list(kv.value))
          cfg.sweep_gamma.push_back(parse_real(path, s));
      } else {
        fail("unknown config key '" + path + "'");
      }
    } else {
      fail("unknown config section '[" + kv.section + "]'");
    }
  }
  return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "[lattice]\n";
  out << "dim = " << cfg.dim << "\n";
  if (cfg.dim == 1) {
    out << "L = " << cfg.Lx << "\n";
  } else {
    out << "Lx = " << cfg.Lx << "\n";
    out << "Ly = " << cfg.Ly << "\n";
  }
  out << "\n[gates]\n";
  out << "family = "
      << (cfg.family == GateFamily::full_mixing ? "full_mixing"
                                                : "minimal_pair")
      << "\n";
  out << "\n[measure]\n";
  out << "gamma = " << io::format_double(cfg.gamma) << "\n";
  out << "kind = "
      << (cfg.kind == MeasurementKind::projective ? "projective" : "weak")
      << "\n";
  out << "gamma_w = " << io::format_double(cfg.gamma_w) << "\n";
  out << "\n[run]\n";
  out << "initial = "
      << (cfg.initial == InitialStateKind::charge_band ? "charge_band"
                                                       : "dipole_band")
      << "\n";
  out << "horizon = " << cfg.horizon << "\n";
  out << "trajectories = " << cfg.trajectories << "\n";
  if (cfg.engine == EngineKind::exact)
    out << "engine = exact\n";
  else
    out << "engine = pf:" << cfg.particles << "\n";
  out << "seed = " << io::format_u64(cfg.seed) << "\n";
  out << "out = " << cfg.out_dir << "\n";
  out << "stop_when_sharp = " << (cfg.stop_when_sharp ? "true" : "false")
      << "\n";
  out << "sharp_eps = " << io::format_double(cfg.sharp_eps) << "\n";
  out << "\n[observables]\n";
  out << "correlators = " << (cfg.correlators ? "true" : "false") << "\n";
  out << "renyi2 = " << (cfg.renyi2 ? "true" : "false") << "\n";
  if (!cfg.sweep_L.empty() || !cfg.sweep_gamma.empty()) {
    out << "\n[sweep]\n";
    if (!cfg.sweep_L.empty()) {
      out << "L = ";
      for (std::size_t i = 0; i < cfg.sweep_L.size(); ++i)
        out << (i ? "," : "") << cfg.sweep_L[i];
      out << "\n";
    }
    if (!cfg.sweep_gamma.empty()) {
      out << "gamma = ";
      for (std::size_t i = 0; i < cfg.sweep_gamma.size(); ++i)
        out << (i ? "," : "") << io::format_double(cfg.sweep_gamma[i]);
      out << "\n";
    }
  }
  return out.str();
}

LatticeGeometry config_geometry(const RunConfig& cfg) {
  return cfg.dim == 1 ? LatticeGeometry::chain(cfg.Lx)
                      : LatticeGeometry::grid(cfg.Lx, cfg.Ly);
}

void validate_config(const RunConfig& cfg) {
  if (cfg.dim != 1 && cfg.dim != 2) fail("dim must be 1 or 2");
  if (cfg.Lx < 5) fail("gated axes need length >= 5");
  if (cfg.dim == 2 && cfg.Ly < 5) fail("gated axes need length >= 5");
  if (cfg.dim == 1 && cfg.Ly != 1) fail("Ly must be 1 for a chain");
  const long long sites =
      static_cast<long long>(cfg.Lx) * (cfg.dim == 2 ? cfg.Ly : 1);
  if (sites > LatticeGeometry::kPackCap)
    fail("lattice exceeds the packed-configuration cap of 64 sites");
  if (!(cfg.gamma >= 0.0 && cfg.gamma <= 1.0)) fail("gamma must be in [0,1]");
  if (cfg.kind == MeasurementKind::weak && !(cfg.gamma_w > 0.0))
    fail("gamma_w must be > 0 for weak measurements");
  if (cfg.horizon <= 0) fail("horizon must be > 0");
  if (cfg.trajectories <= 0) fail("trajectories must be > 0");
  if (!(cfg.sharp_eps > 0.0)) fail("sharp_eps must be > 0");
  if (cfg.out_dir.empty()) fail("out must not be empty");
  if (cfg.engine == EngineKind::particle_filter && cfg.particles == 0)
    fail("pf engine needs at least 1 particle");
  if (cfg.engine == EngineKind::particle_filter && cfg.renyi2)
    fail("renyi2 profiles need posterior probabilities; use engine = exact");
  for (int L : cfg.sweep_L)
    if (L < 5) fail("sweep L values must be >= 5");
  for (double g : cfg.sweep_gamma)
    if (!(g >= 0.0 && g <= 1.0)) fail("sweep gamma values must be in [0,1]");
  if (cfg.engine == EngineKind::exact) {
    long long max_sites = sites;
    for (int L : cfg.sweep_L) {
      const long long s =
          static_cast<long long>(L) * (cfg.dim == 2 ? L : 1);
      max_sites = std::max(max_sites, s);
    }
    if (max_sites > LatticeGeometry::kExactSiteCap)
      throw EngineOverflow(
          "exact engine supports at most " +
          std::to_string(LatticeGeometry::kExactSiteCap) +
          " sites; use engine = pf:N");
  }
}

}  // namespace dipsim
