#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "dipsim/lattice.hpp"
#include "dipsim/prob_state.hpp"

namespace dipsim {

// Five-site gate families. MinimalPair applies only the two-configuration
// swap gate pair G / G-dagger: (0,1,g,1,0) <-> (1,0,g,0,1) for g in {0,1}.
// FullMixing mixes uniformly over the full component generated by all
// dipole-conserving pair hops inside the window (one particle hops +1,
// another hops -1, hardcore respected).
enum class GateFamily { minimal_pair, full_mixing };

constexpr int kWindowSize = 5;
constexpr int kWindowStates = 1 << kWindowSize;

// Window states reachable from `state` by one elementary gate move.
// Self-transitions are excluded; an empty result means the state is frozen.
std::vector<std::uint32_t> elementary_moves(std::uint32_t state,
                                            GateFamily family);

// Partition of all 2^5 window states into gate-connected components, with
// uniform mixing inside each component (the circuit- and dephasing-averaged
// transfer block: weight 1/d_s per member). Components are sorted by their
// smallest packed index; members are sorted ascending.
struct WindowKernel {
  GateFamily family;
  std::vector<std::vector<std::uint32_t>> components;
  std::array<std::uint16_t, kWindowStates> component_of;

  const std::vector<std::uint32_t>& component(std::uint32_t state) const {
    return components[component_of[state]];
  }
};

WindowKernel connected_components(GateFamily family);

// One brickwork step on a window: probability mass of every configuration is
// redistributed uniformly over the window component of its window
// restriction; outside-window bits are untouched. Linear and stochastic.
void kernel_apply(ProbState& state, const Window& w, const WindowKernel& k);

// Disjoint windows of the period-5 brickwork at a layer. 1D: starts at
// sites congruent to (layer mod 5), clipped to the open boundary. 2D: even
// layers place x-axis windows, odd layers y-axis windows, with the offset
// cycling as (layer div 2) mod 5.
std::vector<Window> schedule_windows(int layer, const LatticeGeometry& geom);

// All windows the schedule ever uses (the union over one full period).
std::vector<Window> all_schedule_windows(const LatticeGeometry& geom);

// Connectivity of a global (Q, P) sector under all scheduled windows' moves.
struct SectorConnectivity {
  SectorKey sector;
  std::uint64_t sector_size = 0;
  std::vector<std::uint64_t> component_sizes;  // descending
};

// Brute-force BFS over every configuration in the sector. Throws
// std::invalid_argument if the sector is empty.
SectorConnectivity global_connectivity(const LatticeGeometry& geom,
                                       const SectorKey& sector,
                                       GateFamily family);

// All configurations with the given charge (ascending order).
std::vector<std::uint64_t> configs_with_charge(const LatticeGeometry& geom,
                                               int q);

}  // namespace dipsim
