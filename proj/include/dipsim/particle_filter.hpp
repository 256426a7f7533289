#pragma once

#include <cstdint>
#include <vector>

#include "dipsim/exact.hpp"
#include "dipsim/gates.hpp"
#include "dipsim/lattice.hpp"
#include "dipsim/rng.hpp"

namespace dipsim {

// Weighted-sample approximation of the conditioned state. The reference
// configuration plays the role of the physical system: it evolves under the
// same kernels and generates the measurement record; the particles estimate
// the posterior given that record.
struct ParticleEnsemble {
  LatticeGeometry geom;
  std::vector<std::uint64_t> particles;
  std::vector<double> weights;  // normalized to 1
  std::uint64_t reference = 0;

  int resample_count = 0;
  int degeneracy_count = 0;
  double ess_min = 0.0;

  std::size_t size() const { return particles.size(); }
};

// Samples a configuration uniformly from the initial band (each
// configuration in the band equally likely).
std::uint64_t sample_band_config(const LatticeGeometry& geom,
                                 InitialStateKind kind, Rng& rng);

// reference + n particles drawn i.i.d. from the initial band.
ParticleEnsemble make_ensemble(const LatticeGeometry& geom,
                               InitialStateKind kind, std::size_t n,
                               Rng& rng);

// Effective sample size 1 / sum w_i^2 of normalized weights.
double effective_sample_size(const std::vector<double>& weights);

// One brickwork layer: every particle (and the reference) resamples each
// scheduled window uniformly within its gate component. Weights unchanged;
// every particle stays in its (Q, P) sector.
void pf_step_unitary(ParticleEnsemble& ens, int layer, const WindowKernel& k,
                     Rng& rng);

// Measurement at `site`: the outcome is generated from the reference
// (projective: its bit; weak: Gaussian around its sigma^z with variance
// 1/gamma_w), weights are multiplied by the outcome likelihood and
// renormalized; systematic resampling restores ESS when it falls below
// size/2. If every weight vanishes the ensemble is reseeded from the
// reference and the degeneracy is counted.
MeasurementEvent pf_measure(ParticleEnsemble& ens, int layer, int site,
                            MeasurementKind kind, double gamma_w, Rng& rng);

// Replay variant: applies a recorded outcome instead of generating one
// (used to condition a filter on an externally generated record).
void pf_apply_outcome(ParticleEnsemble& ens, const MeasurementEvent& ev,
                      double gamma_w, Rng& rng);

// Weighted estimators with block-jackknife standard errors (contiguous
// blocks, so post-resampling duplication is counted as correlation).
struct PfEstimates {
  double var_q = 0.0;
  double var_q_err = 0.0;
  std::array<double, 2> var_p{0.0, 0.0};
  std::array<double, 2> var_p_err{0.0, 0.0};
};

PfEstimates pf_estimates(const ParticleEnsemble& ens);

// Weighted connected pair correlator <n_x n_y> - <n_x><n_y>.
double pf_connected_density(const ParticleEnsemble& ens, int x, int y);

// Weighted connected correlator of the cumulative charge S_b (1D).
double pf_connected_dipole(const ParticleEnsemble& ens, int x, int y);

// Shannon entropy of the weighted (Q,P)-sector posterior estimate.
double pf_sector_entropy(const ParticleEnsemble& ens);

}  // namespace dipsim
