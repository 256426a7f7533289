#include "dipsim/particle_filter.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace dipsim {

namespace {

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
         std::lgamma(n - k + 1.0);
}

// Uniform random k-subset of {0..n-1} as occupation bits.
std::uint64_t sample_subset(int n, int k, Rng& rng) {
  std::uint64_t bits = 0;
  int need = k;
  for (int site = 0; site < n && need > 0; ++site) {
    const int remaining = n - site;
    if (rng.uniform() * remaining < need) {
      bits |= 1ull << site;
      --need;
    }
  }
  return bits;
}

void normalize_weights(std::vector<double>& w) {
  double s = 0.0;
  for (double x : w) s += x;
  const double inv = 1.0 / s;
  for (double& x : w) x *= inv;
}

void systematic_resample(ParticleEnsemble& ens, Rng& rng) {
  const std::size_t n = ens.size();
  std::vector<std::uint64_t> next(n);
  const double step = 1.0 / static_cast<double>(n);
  double pos = rng.uniform() * step;
  double cum = ens.weights[0];
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (cum < pos && j + 1 < n) cum += ens.weights[++j];
    next[i] = ens.particles[j];
    pos += step;
  }
  ens.particles = std::move(next);
  std::fill(ens.weights.begin(), ens.weights.end(), step);
  ++ens.resample_count;
}

}  // namespace

std::uint64_t sample_band_config(const LatticeGeometry& geom,
                                 InitialStateKind kind, Rng& rng) {
  const std::vector<int> qs = initial_charge_values(geom, kind);
  const int n = geom.sites();
  int q = qs.front();
  if (qs.size() > 1) {
    // Every configuration in the band is equally likely, so Q is drawn
    // proportionally to its sector count.
    std::vector<double> w;
    double top = -1e300;
    for (int qv : qs) top = std::max(top, log_binomial(n, qv));
    double total = 0.0;
    for (int qv : qs) {
      w.push_back(std::exp(log_binomial(n, qv) - top));
      total += w.back();
    }
    double u = rng.uniform() * total;
    for (std::size_t i = 0; i < qs.size(); ++i) {
      if (u < w[i] || i + 1 == qs.size()) {
        q = qs[i];
        break;
      }
      u -= w[i];
    }
  }
  return sample_subset(n, q, rng);
}

ParticleEnsemble make_ensemble(const LatticeGeometry& geom,
                               InitialStateKind kind, std::size_t n,
                               Rng& rng) {
  if (n == 0) throw std::invalid_argument("need at least one particle");
  ParticleEnsemble ens;
  ens.geom = geom;
  ens.reference = sample_band_config(geom, kind, rng);
  ens.particles.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    ens.particles.push_back(sample_band_config(geom, kind, rng));
  ens.weights.assign(n, 1.0 / static_cast<double>(n));
  ens.ess_min = static_cast<double>(n);
  return ens;
}

double effective_sample_size(const std::vector<double>& weights) {
  double s2 = 0.0;
  for (double w : weights) s2 += w * w;
  return 1.0 / s2;
}

void pf_step_unitary(ParticleEnsemble& ens, int layer, const WindowKernel& k,
                     Rng& rng) {
  const std::vector<Window> windows = schedule_windows(layer, ens.geom);
  const auto move_one = [&](std::uint64_t bits, const Window& w) {
    const std::uint32_t widx = window_pack(ens.geom, bits, w);
    const auto& comp = k.component(widx);
    if (comp.size() == 1) return bits;
    const std::uint32_t m =
        comp[rng.uniform_below(comp.size())];
    return window_unpack(ens.geom, bits, w, m);
  };
  for (const Window& w : windows) {
    ens.reference = move_one(ens.reference, w);
    for (std::uint64_t& p : ens.particles) p = move_one(p, w);
  }
}

void pf_apply_outcome(ParticleEnsemble& ens, const MeasurementEvent& ev,
                      double gamma_w, Rng& rng) {
  const std::uint64_t mask = 1ull << ev.site;
  double max_w = 0.0;
  if (ev.kind == MeasurementKind::projective) {
    const std::uint64_t want = ev.outcome > 0.5 ? mask : 0ull;
    for (std::size_t i = 0; i < ens.size(); ++i) {
      if ((ens.particles[i] & mask) != want) ens.weights[i] = 0.0;
      max_w = std::max(max_w, ens.weights[i]);
    }
    // Keep the reference consistent with the applied record; in generating
    // mode this is a no-op (the outcome came from the reference).
    ens.reference = (ens.reference & ~mask) | want;
  } else {
    if (!(gamma_w > 0.0))
      throw std::invalid_argument("weak measurement strength must be > 0");
    const double m = ev.outcome;
    const double lp = -0.5 * gamma_w * (1.0 - m) * (1.0 - m);
    const double lm = -0.5 * gamma_w * (-1.0 - m) * (-1.0 - m);
    const double top = std::max(lp, lm);
    const double wp = std::exp(lp - top), wm = std::exp(lm - top);
    for (std::size_t i = 0; i < ens.size(); ++i) {
      ens.weights[i] *= (ens.particles[i] & mask) ? wp : wm;
      max_w = std::max(max_w, ens.weights[i]);
    }
  }
  if (max_w <= 0.0) {
    // Impossible outcome under the ensemble: reseed from the (outcome-
    // consistent) reference and flag it. This is a recovery path; runs
    // report the count so affected data can be judged.
    std::fill(ens.particles.begin(), ens.particles.end(), ens.reference);
    std::fill(ens.weights.begin(), ens.weights.end(),
              1.0 / static_cast<double>(ens.size()));
    ++ens.degeneracy_count;
    ens.ess_min = std::min(ens.ess_min, 1.0);
    return;
  }
  normalize_weights(ens.weights);
  const double ess = effective_sample_size(ens.weights);
  ens.ess_min = std::min(ens.ess_min, ess);
  if (ess < static_cast<double>(ens.size()) / 2.0)
    systematic_resample(ens, rng);
}

MeasurementEvent pf_measure(ParticleEnsemble& ens, int layer, int site,
                            MeasurementKind kind, double gamma_w, Rng& rng) {
  if (site < 0 || site >= ens.geom.sites())
    throw std::invalid_argument("site index out of range");
  MeasurementEvent ev;
  ev.layer = layer;
  ev.site = site;
  ev.kind = kind;
  const int ref_bit = static_cast<int>((ens.reference >> site) & 1ull);
  if (kind == MeasurementKind::projective) {
    ev.outcome = ref_bit;
  } else {
    const double sigma = ref_bit ? 1.0 : -1.0;
    ev.outcome = sigma + rng.normal() / std::sqrt(gamma_w);
  }
  pf_apply_outcome(ens, ev, gamma_w, rng);
  return ev;
}

namespace {

struct JackknifeAcc {
  // Sufficient statistics of a weighted variance estimate.
  double s1 = 0.0, s2 = 0.0;
};

double weighted_variance(double s1, double s2) {
  return std::max(0.0, s2 - s1 * s1);
}

// Delete-one-block jackknife standard error of the weighted variance.
// Systematic resampling copies each parent's children into contiguous
// positions, so contiguous blocks absorb the duplication correlation that a
// plain delete-one jackknife would miss.
double jackknife_err(const std::vector<double>& values,
                     const std::vector<double>& weights, double s1,
                     double s2) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  const std::size_t blocks = std::min<std::size_t>(n, 128);
  std::vector<double> loo(blocks);
  double mean_loo = 0.0;
  for (std::size_t g = 0; g < blocks; ++g) {
    const std::size_t lo = g * n / blocks;
    const std::size_t hi = (g + 1) * n / blocks;
    double ws = 0.0, s1g = 0.0, s2g = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      ws += weights[i];
      s1g += weights[i] * values[i];
      s2g += weights[i] * values[i] * values[i];
    }
    const double rem = 1.0 - ws;
    loo[g] = rem > 0.0
                 ? weighted_variance((s1 - s1g) / rem, (s2 - s2g) / rem)
                 : 0.0;
    mean_loo += loo[g];
  }
  mean_loo /= static_cast<double>(blocks);
  double ss = 0.0;
  for (double v : loo) ss += (v - mean_loo) * (v - mean_loo);
  const double nb = static_cast<double>(blocks);
  return std::sqrt((nb - 1.0) / nb * ss);
}

}  // namespace

PfEstimates pf_estimates(const ParticleEnsemble& ens) {
  const std::size_t n = ens.size();
  std::vector<double> qv(n);
  std::array<std::vector<double>, 2> pv{std::vector<double>(n),
                                        std::vector<double>(n)};
  double q1 = 0.0, q2 = 0.0;
  std::array<double, 2> p1{0.0, 0.0}, p2{0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const double w = ens.weights[i];
    qv[i] = static_cast<double>(std::popcount(ens.particles[i]));
    q1 += w * qv[i];
    q2 += w * qv[i] * qv[i];
    const auto p = dipole(ens.geom, ens.particles[i]);
    for (int a = 0; a < 2; ++a) {
      pv[a][i] = static_cast<double>(p[a]);
      p1[a] += w * pv[a][i];
      p2[a] += w * pv[a][i] * pv[a][i];
    }
  }
  PfEstimates est;
  est.var_q = weighted_variance(q1, q2);
  est.var_q_err = jackknife_err(qv, ens.weights, q1, q2);
  for (int a = 0; a < 2; ++a) {
    est.var_p[a] = weighted_variance(p1[a], p2[a]);
    est.var_p_err[a] = jackknife_err(pv[a], ens.weights, p1[a], p2[a]);
  }
  return est;
}

double pf_connected_density(const ParticleEnsemble& ens, int x, int y) {
  const std::uint64_t mx = 1ull << x, my = 1ull << y;
  double nx = 0.0, ny = 0.0, nxy = 0.0;
  for (std::size_t i = 0; i < ens.size(); ++i) {
    const double w = ens.weights[i];
    const double bx = (ens.particles[i] & mx) ? 1.0 : 0.0;
    const double by = (ens.particles[i] & my) ? 1.0 : 0.0;
    nx += w * bx;
    ny += w * by;
    nxy += w * bx * by;
  }
  return nxy - nx * ny;
}

double pf_connected_dipole(const ParticleEnsemble& ens, int x, int y) {
  if (ens.geom.dim() != 1)
    throw std::invalid_argument("cumulative charge is defined on chains");
  const int last = ens.geom.sites() - 1;
  if (x < 0 || y < 0 || x >= last || y >= last)
    throw std::invalid_argument("bond index out of range");
  const std::uint64_t mx = (1ull << (x + 1)) - 1ull;
  const std::uint64_t my = (1ull << (y + 1)) - 1ull;
  double sx = 0.0, sy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < ens.size(); ++i) {
    const double w = ens.weights[i];
    const double cx = std::popcount(ens.particles[i] & mx);
    const double cy = std::popcount(ens.particles[i] & my);
    sx += w * cx;
    sy += w * cy;
    sxy += w * cx * cy;
  }
  return sxy - sx * sy;
}

double pf_sector_entropy(const ParticleEnsemble& ens) {
  std::vector<std::pair<SectorKey, double>> mass;
  for (std::size_t i = 0; i < ens.size(); ++i) {
    const SectorKey key = sector_key(ens.geom, ens.particles[i]);
    auto it = std::find_if(mass.begin(), mass.end(),
                           [&](const auto& e) { return e.first == key; });
    if (it == mass.end())
      mass.emplace_back(key, ens.weights[i]);
    else
      it->second += ens.weights[i];
  }
  double h = 0.0;
  for (const auto& e : mass)
    if (e.second > 0.0) h -= e.second * std::log(e.second);
  return h;
}

}  // namespace dipsim
