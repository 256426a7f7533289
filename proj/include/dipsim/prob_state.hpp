#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dipsim/lattice.hpp"

namespace dipsim {

// Exact measurement-conditioned diagonal state: a sparse probability
// distribution over configurations. Entries are kept sorted by packed
// configuration, which fixes the iteration order used by renormalization
// and sampling, so trajectories replay bit-identically.
class ProbState {
 public:
  using Entry = std::pair<std::uint64_t, double>;

  // Support cap for exact mode; exceeding it signals "use the particle
  // filter" rather than silently thrashing.
  static constexpr std::size_t kSupportCap = 1u << 22;

  ProbState(LatticeGeometry geom, std::vector<Entry> entries);

  static ProbState delta(const LatticeGeometry& geom, std::uint64_t bits);
  static ProbState uniform_over(const LatticeGeometry& geom,
                                std::vector<std::uint64_t> configs);

  const LatticeGeometry& geometry() const { return geom_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t support_size() const { return entries_.size(); }

  double total_mass() const;
  void renormalize();

  // Probability of an exact configuration (0 if outside the support).
  double prob_of(std::uint64_t bits) const;

  // Replaces the entries; keys must be sorted, unique and probabilities
  // nonnegative (checked in debug only; callers are internal).
  void replace_entries(std::vector<Entry> entries);

 private:
  LatticeGeometry geom_;
  std::vector<Entry> entries_;
};

}  // namespace dipsim
