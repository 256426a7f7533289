#include "dipsim/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace dipsim {

namespace {

// Restrict support to configurations whose `site` occupation equals
// `outcome`, then renormalize.
void restrict_to_outcome(ProbState& state, int site, int outcome) {
  const std::uint64_t mask = 1ull << site;
  const std::uint64_t want = outcome ? mask : 0ull;
  std::vector<ProbState::Entry> kept;
  kept.reserve(state.entries().size());
  for (const auto& e : state.entries())
    if ((e.first & mask) == want) kept.push_back(e);
  state.replace_entries(std::move(kept));
  state.renormalize();
}

double marginal_occupation(const ProbState& state, int site) {
  const std::uint64_t mask = 1ull << site;
  double p1 = 0.0;
  for (const auto& e : state.entries())
    if (e.first & mask) p1 += e.second;
  return p1;
}

void check_site(const ProbState& state, int site) {
  if (site < 0 || site >= state.geometry().sites())
    throw std::invalid_argument("site index out of range");
}

}  // namespace

int measure_projective(ProbState& state, int site, Rng& rng) {
  check_site(state, site);
  const double p1 = marginal_occupation(state, site);
  const int outcome = rng.uniform() < p1 ? 1 : 0;
  restrict_to_outcome(state, site, outcome);
  return outcome;
}

void apply_projective_outcome(ProbState& state, int site, int outcome) {
  check_site(state, site);
  restrict_to_outcome(state, site, outcome);
}

double measure_weak(ProbState& state, int site, double gamma_w, Rng& rng) {
  check_site(state, site);
  if (!(gamma_w > 0.0))
    throw std::invalid_argument("weak measurement strength must be > 0");
  // Sample the configuration whose sigma^z centers the Gaussian readout.
  const double u = rng.uniform();
  double acc = 0.0;
  double sigma = -1.0;
  const std::uint64_t mask = 1ull << site;
  for (const auto& e : state.entries()) {
    acc += e.second;
    if (u < acc || &e == &state.entries().back()) {
      sigma = (e.first & mask) ? 1.0 : -1.0;
      break;
    }
  }
  const double m = sigma + rng.normal() / std::sqrt(gamma_w);
  apply_weak_outcome(state, site, gamma_w, m);
  return m;
}

void apply_weak_outcome(ProbState& state, int site, double gamma_w,
                        double m) {
  check_site(state, site);
  if (!(gamma_w > 0.0))
    throw std::invalid_argument("weak measurement strength must be > 0");
  // Only two likelihood values occur (sigma = +-1); scale by the larger
  // one so extreme strengths cannot underflow the whole support.
  const double lp = -0.5 * gamma_w * (1.0 - m) * (1.0 - m);
  const double lm = -0.5 * gamma_w * (-1.0 - m) * (-1.0 - m);
  const double top = std::max(lp, lm);
  const double wp = std::exp(lp - top);
  const double wm = std::exp(lm - top);
  const std::uint64_t mask = 1ull << site;
  std::vector<ProbState::Entry> next;
  next.reserve(state.entries().size());
  for (const auto& e : state.entries()) {
    const double w = (e.first & mask) ? wp : wm;
    const double q = e.second * w;
    if (q > 0.0) next.emplace_back(e.first, q);
  }
  state.replace_entries(std::move(next));
  state.renormalize();
}

void step_layer(ProbState& state, int layer, double gamma,
                MeasurementKind kind, double gamma_w, const WindowKernel& k,
                Rng& rng, MeasurementRecord& record) {
  if (gamma < 0.0 || gamma > 1.0)
    throw std::invalid_argument("measurement rate must be in [0, 1]");
  for (const Window& w : schedule_windows(layer, state.geometry()))
    kernel_apply(state, w, k);
  const int n = state.geometry().sites();
  for (int site = 0; site < n; ++site) {
    if (!rng.bernoulli(gamma)) continue;
    MeasurementEvent ev;
    ev.layer = layer;
    ev.site = site;
    ev.kind = kind;
    if (kind == MeasurementKind::projective)
      ev.outcome = measure_projective(state, site, rng);
    else
      ev.outcome = measure_weak(state, site, gamma_w, rng);
    record.events.push_back(ev);
  }
}

void step_layer_replay(ProbState& state, int layer, double gamma_w,
                       const WindowKernel& k, const MeasurementRecord& record,
                       std::size_t& cursor) {
  for (const Window& w : schedule_windows(layer, state.geometry()))
    kernel_apply(state, w, k);
  while (cursor < record.events.size() &&
         record.events[cursor].layer == layer) {
    const MeasurementEvent& ev = record.events[cursor];
    if (ev.kind == MeasurementKind::projective)
      apply_projective_outcome(state, ev.site,
                               static_cast<int>(ev.outcome));
    else
      apply_weak_outcome(state, ev.site, gamma_w, ev.outcome);
    ++cursor;
  }
}

double charge_mean(const ProbState& state) {
  double m = 0.0;
  for (const auto& e : state.entries())
    m += e.second * static_cast<double>(std::popcount(e.first));
  return m;
}

double charge_variance(const ProbState& state) {
  double m = 0.0, m2 = 0.0;
  for (const auto& e : state.entries()) {
    const double q = static_cast<double>(std::popcount(e.first));
    m += e.second * q;
    m2 += e.second * q * q;
  }
  return std::max(0.0, m2 - m * m);
}

std::array<double, 2> dipole_mean(const ProbState& state) {
  std::array<double, 2> m{0.0, 0.0};
  for (const auto& e : state.entries()) {
    const auto p = dipole(state.geometry(), e.first);
    m[0] += e.second * static_cast<double>(p[0]);
    m[1] += e.second * static_cast<double>(p[1]);
  }
  return m;
}

std::array<double, 2> dipole_variance(const ProbState& state) {
  std::array<double, 2> m{0.0, 0.0}, m2{0.0, 0.0};
  for (const auto& e : state.entries()) {
    const auto p = dipole(state.geometry(), e.first);
    for (int a = 0; a < 2; ++a) {
      const double v = static_cast<double>(p[a]);
      m[a] += e.second * v;
      m2[a] += e.second * v * v;
    }
  }
  return {std::max(0.0, m2[0] - m[0] * m[0]),
          std::max(0.0, m2[1] - m[1] * m[1])};
}

double sector_entropy(const ProbState& state) {
  std::vector<std::pair<SectorKey, double>> sectors;
  for (const auto& e : state.entries()) {
    const SectorKey key = sector_key(state.geometry(), e.first);
    auto it = std::find_if(sectors.begin(), sectors.end(),
                           [&](const auto& s) { return s.first == key; });
    if (it == sectors.end())
      sectors.emplace_back(key, e.second);
    else
      it->second += e.second;
  }
  double h = 0.0;
  for (const auto& s : sectors)
    if (s.second > 0.0) h -= s.second * std::log(s.second);
  return h;
}

double density_mean(const ProbState& state, int site) {
  check_site(state, site);
  return marginal_occupation(state, site);
}

double density_pair(const ProbState& state, int x, int y) {
  check_site(state, x);
  check_site(state, y);
  const std::uint64_t mask = (1ull << x) | (1ull << y);
  double p = 0.0;
  for (const auto& e : state.entries())
    if ((e.first & mask) == mask) p += e.second;
  return p;
}

double connected_density_correlator(const std::vector<ProbState>& ensemble,
                                    int x, int y) {
  if (ensemble.empty())
    throw std::invalid_argument("empty ensemble");
  double acc = 0.0;
  for (const ProbState& s : ensemble)
    acc += density_pair(s, x, y) - density_mean(s, x) * density_mean(s, y);
  return acc / static_cast<double>(ensemble.size());
}

namespace {

void check_bond(const ProbState& state, int bond) {
  if (state.geometry().dim() != 1)
    throw std::invalid_argument("cumulative charge is defined on chains");
  if (bond < 0 || bond >= state.geometry().sites() - 1)
    throw std::invalid_argument("bond index out of range");
}

int cumulative_bits(std::uint64_t bits, int bond) {
  const std::uint64_t left = (1ull << (bond + 1)) - 1ull;
  return std::popcount(bits & left);
}

}  // namespace

double cumulative_charge_mean(const ProbState& state, int bond) {
  check_bond(state, bond);
  double acc = 0.0;
  for (const auto& e : state.entries())
    acc += e.second * cumulative_bits(e.first, bond);
  return acc;
}

double cumulative_charge_pair(const ProbState& state, int x, int y) {
  check_bond(state, x);
  check_bond(state, y);
  double acc = 0.0;
  for (const auto& e : state.entries())
    acc += e.second * cumulative_bits(e.first, x) * cumulative_bits(e.first, y);
  return acc;
}

double connected_dipole_correlator(const std::vector<ProbState>& ensemble,
                                   int x, int y) {
  if (ensemble.empty())
    throw std::invalid_argument("empty ensemble");
  double acc = 0.0;
  for (const ProbState& s : ensemble)
    acc += cumulative_charge_pair(s, x, y) -
           cumulative_charge_mean(s, x) * cumulative_charge_mean(s, y);
  return acc / static_cast<double>(ensemble.size());
}

namespace {

double purity(const ProbState& state) {
  double s = 0.0;
  for (const auto& e : state.entries()) s += e.second * e.second;
  return s;
}

}  // namespace

double renyi2_charge(const ProbState& state, int x, int y) {
  check_site(state, x);
  check_site(state, y);
  if (x == y) throw std::invalid_argument("renyi2 requires x != y");
  const std::uint64_t mx = 1ull << x, my = 1ull << y;
  double num = 0.0;
  for (const auto& e : state.entries()) {
    if (!(e.first & mx) || (e.first & my)) continue;
    num += e.second * state.prob_of((e.first & ~mx) | my);
  }
  return 2.0 * num / purity(state);
}

double renyi2_dipole(const ProbState& state, int x, int y) {
  const LatticeGeometry& geom = state.geometry();
  if (geom.dim() != 1)
    throw std::invalid_argument("bond dipole correlator is defined on chains");
  if (x == y) throw std::invalid_argument("renyi2 requires x != y");
  if (x < 0 || y < 0 || x + 1 >= geom.sites() || y + 1 >= geom.sites())
    throw std::invalid_argument("bond index out of range");
  double num = 0.0;
  for (const auto& e : state.entries()) {
    std::uint64_t c = e.first;
    // Create a unit dipole at bond y: hop y -> y+1.
    if (!((c >> y) & 1ull) || ((c >> (y + 1)) & 1ull)) continue;
    c = (c & ~(1ull << y)) | (1ull << (y + 1));
    // Annihilate the unit dipole at bond x: hop x+1 -> x.
    if (!((c >> (x + 1)) & 1ull) || ((c >> x) & 1ull)) continue;
    c = (c & ~(1ull << (x + 1))) | (1ull << x);
    num += e.second * state.prob_of(c);
  }
  return 2.0 * num / purity(state);
}

std::optional<int> sharpening_time(const std::vector<double>& variance_series,
                                   double eps) {
  for (std::size_t t = 0; t < variance_series.size(); ++t)
    if (variance_series[t] < eps) return static_cast<int>(t);
  return std::nullopt;
}

std::vector<int> initial_charge_values(const LatticeGeometry& geom,
                                       InitialStateKind kind) {
  const int n = geom.sites();
  const int half = n / 2;
  if (kind == InitialStateKind::dipole_band) return {half};
  std::vector<int> qs;
  for (int q = half - 1; q <= half + 1; ++q)
    if (q >= 0 && q <= n) qs.push_back(q);
  return qs;
}

ProbState initial_state(const LatticeGeometry& geom, InitialStateKind kind) {
  std::vector<std::uint64_t> configs;
  for (int q : initial_charge_values(geom, kind)) {
    const auto block = configs_with_charge(geom, q);
    configs.insert(configs.end(), block.begin(), block.end());
  }
  return ProbState::uniform_over(geom, std::move(configs));
}

}  // namespace dipsim
