#include "dipsim/prob_state.hpp"

#include <algorithm>
#include <stdexcept>

#include "dipsim/errors.hpp"

namespace dipsim {

ProbState::ProbState(LatticeGeometry geom, std::vector<Entry> entries)
    : geom_(geom) {
  if (geom_.sites() > LatticeGeometry::kExactSiteCap)
    throw EngineOverflow("exact mode supports at most " +
                         std::to_string(LatticeGeometry::kExactSiteCap) +
                         " sites; use the particle filter");
  if (entries.empty())
    throw std::invalid_argument("ProbState needs a nonempty support");
  std::sort(entries.begin(), entries.end());
  // Merge duplicate keys; summation order is fixed by the sort.
  std::vector<Entry> merged;
  merged.reserve(entries.size());
  for (const auto& e : entries) {
    if (e.second < 0.0)
      throw std::invalid_argument("negative probability in ProbState");
    if (!merged.empty() && merged.back().first == e.first)
      merged.back().second += e.second;
    else
      merged.push_back(e);
  }
  entries_ = std::move(merged);
  renormalize();
}

ProbState ProbState::delta(const LatticeGeometry& geom, std::uint64_t bits) {
  return ProbState(geom, {{bits, 1.0}});
}

ProbState ProbState::uniform_over(const LatticeGeometry& geom,
                                  std::vector<std::uint64_t> configs) {
  std::vector<Entry> entries;
  entries.reserve(configs.size());
  const double w = 1.0 / static_cast<double>(configs.size());
  for (std::uint64_t c : configs) entries.emplace_back(c, w);
  return ProbState(geom, std::move(entries));
}

double ProbState::total_mass() const {
  double s = 0.0;
  for (const auto& e : entries_) s += e.second;
  return s;
}

void ProbState::renormalize() {
  const double s = total_mass();
  if (!(s > 0.0))
    throw std::runtime_error("ProbState has zero total mass");
  const double inv = 1.0 / s;
  for (auto& e : entries_) e.second *= inv;
}

double ProbState::prob_of(std::uint64_t bits) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), bits,
      [](const Entry& e, std::uint64_t key) { return e.first < key; });
  if (it == entries_.end() || it->first != bits) return 0.0;
  return it->second;
}

void ProbState::replace_entries(std::vector<Entry> entries) {
  if (entries.empty())
    throw std::runtime_error("ProbState support became empty");
  if (entries.size() > kSupportCap)
    throw EngineOverflow("exact-mode support exceeded " +
                         std::to_string(kSupportCap) +
                         " configurations; use the particle filter");
  entries_ = std::move(entries);
}

}  // namespace dipsim
