#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "dipsim/gates.hpp"
#include "dipsim/prob_state.hpp"
#include "dipsim/rng.hpp"

namespace dipsim {

enum class MeasurementKind { projective, weak };

// One recorded measurement. outcome is 0/1 for projective events and the
// real-valued readout m for weak events.
struct MeasurementEvent {
  int layer = 0;
  int site = 0;
  MeasurementKind kind = MeasurementKind::projective;
  double outcome = 0.0;
};

// Append-only record; replaying it against the same initial state
// reproduces the same conditioned trajectory.
struct MeasurementRecord {
  std::vector<MeasurementEvent> events;
};

// Born-samples the occupation of `site` and restricts the state to the
// consistent configurations. Returns the outcome.
int measure_projective(ProbState& state, int site, Rng& rng);

// Gaussian weak measurement of sigma^z = 2n-1 with strength gamma_w:
// outcome m ~ mixture of N(sigma, 1/gamma_w) over the posterior; the state
// is reweighted by exp(-gamma_w (sigma - m)^2 / 2) and renormalized.
double measure_weak(ProbState& state, int site, double gamma_w, Rng& rng);

// Replay variants: apply a known outcome instead of sampling one.
void apply_projective_outcome(ProbState& state, int site, int outcome);
void apply_weak_outcome(ProbState& state, int site, double gamma_w, double m);

// One circuit layer: every scheduled window's averaged gate, then one
// Bernoulli(gamma) measurement draw per site (sites in ascending order).
// Sampled events are appended to `record`.
void step_layer(ProbState& state, int layer, double gamma,
                MeasurementKind kind, double gamma_w, const WindowKernel& k,
                Rng& rng, MeasurementRecord& record);

// Replays the recorded events of `layer` (kernels plus recorded outcomes);
// `cursor` advances past the consumed events.
void step_layer_replay(ProbState& state, int layer, double gamma_w,
                       const WindowKernel& k, const MeasurementRecord& record,
                       std::size_t& cursor);

double charge_variance(const ProbState& state);
// Per-axis dipole variance; [var, 0] in 1D.
std::array<double, 2> dipole_variance(const ProbState& state);
double charge_mean(const ProbState& state);
std::array<double, 2> dipole_mean(const ProbState& state);

// Shannon entropy (nats) of the posterior over (Q, P) sectors.
double sector_entropy(const ProbState& state);

// Mean occupation and pair expectation under the posterior.
double density_mean(const ProbState& state, int site);
double density_pair(const ProbState& state, int x, int y);

// Record-averaged connected density correlator over an ensemble of
// conditioned states: avg over states of <n_x n_y> - <n_x><n_y>.
double connected_density_correlator(const std::vector<ProbState>& ensemble,
                                    int x, int y);

// Dipole density at bond b (1D): cumulative charge S_b = sum_{r<=b} n_r.
// The site density is its lattice derivative, so <S S>_c is the dipole
// analogue of the density correlator.
double cumulative_charge_mean(const ProbState& state, int bond);
double cumulative_charge_pair(const ProbState& state, int x, int y);
double connected_dipole_correlator(const std::vector<ProbState>& ensemble,
                                   int x, int y);

// Renyi-2 correlator of the diagonal ensemble for the charge operator pair
// (a particle moved from x to y, both orientations):
//   2 * sum_c p_c p_{c'} / sum_c p_c^2,
// where c' = c with the particle at x moved to y. Lives in [0, 1].
double renyi2_charge(const ProbState& state, int x, int y);

// Same for the bond dipole operator pair: a unit dipole is created at bond
// y (hop y -> y+1) and annihilated at bond x (hop x+1 -> x), applied in
// that order with hardcore checks. Bond b spans sites (b, b+1); 1D only.
double renyi2_dipole(const ProbState& state, int x, int y);

// First index t with series[t] < eps; nullopt if never (censored).
// series[t] is the variance after t layers (series[0] = initial state).
std::optional<int> sharpening_time(const std::vector<double>& variance_series,
                                   double eps);

// Initial-state recipes for sharpening experiments.
// charge_band: uniform over all configurations with Q in
//   {floor(N/2)-1, floor(N/2), floor(N/2)+1} (clamped to [0, N]).
// dipole_band: uniform over all configurations with Q = floor(N/2), all P.
enum class InitialStateKind { charge_band, dipole_band };

std::vector<int> initial_charge_values(const LatticeGeometry& geom,
                                       InitialStateKind kind);
ProbState initial_state(const LatticeGeometry& geom, InitialStateKind kind);

}  // namespace dipsim
