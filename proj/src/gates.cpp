#include "dipsim/gates.hpp"

#include <algorithm>
#include <bit>
#include <queue>
#include <stdexcept>

namespace dipsim {

namespace {

// Packed forms of the MinimalPair gate patterns, window site 0 = LSB:
// (0,1,g,1,0) -> 10 (g=0), 14 (g=1); (1,0,g,0,1) -> 17 (g=0), 21 (g=1).
constexpr std::uint32_t kPatternA0 = 10, kPatternA1 = 14;
constexpr std::uint32_t kPatternB0 = 17, kPatternB1 = 21;

std::vector<std::uint32_t> pair_hop_moves(std::uint32_t state) {
  std::vector<std::uint32_t> out;
  for (int i = 0; i < kWindowSize - 1; ++i) {   // particle at i hops to i+1
    if (!((state >> i) & 1u)) continue;
    for (int j = 1; j < kWindowSize; ++j) {     // particle at j hops to j-1
      if (j == i || !((state >> j) & 1u)) continue;
      const int a = i + 1, b = j - 1;
      if (a == b) continue;  // both particles would land on one site
      const std::uint32_t removed = state & ~(1u << i) & ~(1u << j);
      if ((removed >> a) & 1u) continue;
      if ((removed >> b) & 1u) continue;
      const std::uint32_t next = removed | (1u << a) | (1u << b);
      if (next != state) out.push_back(next);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<std::uint32_t> elementary_moves(std::uint32_t state,
                                            GateFamily family) {
  if (state >= kWindowStates)
    throw std::invalid_argument("window state out of range");
  if (family == GateFamily::minimal_pair) {
    switch (state) {
      case kPatternA0: return {kPatternB0};
      case kPatternA1: return {kPatternB1};
      case kPatternB0: return {kPatternA0};
      case kPatternB1: return {kPatternA1};
      default: return {};
    }
  }
  return pair_hop_moves(state);
}

WindowKernel connected_components(GateFamily family) {
  WindowKernel kernel;
  kernel.family = family;
  kernel.component_of.fill(0xFFFF);
  for (std::uint32_t seed = 0; seed < kWindowStates; ++seed) {
    if (kernel.component_of[seed] != 0xFFFF) continue;
    const auto id = static_cast<std::uint16_t>(kernel.components.size());
    std::vector<std::uint32_t> comp;
    std::queue<std::uint32_t> frontier;
    frontier.push(seed);
    kernel.component_of[seed] = id;
    while (!frontier.empty()) {
      const std::uint32_t s = frontier.front();
      frontier.pop();
      comp.push_back(s);
      for (std::uint32_t t : elementary_moves(s, family)) {
        if (kernel.component_of[t] != 0xFFFF) continue;
        kernel.component_of[t] = id;
        frontier.push(t);
      }
    }
    std::sort(comp.begin(), comp.end());
    kernel.components.push_back(std::move(comp));
  }
  return kernel;
}

void kernel_apply(ProbState& state, const Window& w, const WindowKernel& k) {
  const LatticeGeometry& geom = state.geometry();
  check_window(geom, w);
  if (w.size != kWindowSize)
    throw std::invalid_argument("gate windows have exactly 5 sites");

  std::uint64_t window_mask = 0;
  for (int i = 0; i < w.size; ++i) window_mask |= 1ull << w.site(i);

  const auto spread = [&](std::uint32_t packed) -> std::uint64_t {
    if (w.stride == 1) return static_cast<std::uint64_t>(packed) << w.base;
    std::uint64_t bits = 0;
    for (int i = 0; i < w.size; ++i)
      if ((packed >> i) & 1u) bits |= 1ull << w.site(i);
    return bits;
  };

  const auto& entries = state.entries();
  std::vector<ProbState::Entry> out;
  out.reserve(entries.size() * 2);
  for (const auto& [bits, p] : entries) {
    const std::uint32_t widx = w.stride == 1
        ? static_cast<std::uint32_t>((bits >> w.base) & 31ull)
        : window_pack(geom, bits, w);
    const auto& comp = k.component(widx);
    if (comp.size() == 1) {
      out.emplace_back(bits, p);
      continue;
    }
    const double share = p / static_cast<double>(comp.size());
    const std::uint64_t rest = bits & ~window_mask;
    for (std::uint32_t m : comp) out.emplace_back(rest | spread(m), share);
  }
  std::sort(out.begin(), out.end());
  std::vector<ProbState::Entry> merged;
  merged.reserve(out.size());
  for (const auto& e : out) {
    if (!merged.empty() && merged.back().first == e.first)
      merged.back().second += e.second;
    else
      merged.push_back(e);
  }
  state.replace_entries(std::move(merged));
}

std::vector<Window> schedule_windows(int layer, const LatticeGeometry& geom) {
  if (layer < 0) throw std::invalid_argument("layer index must be >= 0");
  std::vector<Window> windows;
  if (geom.dim() == 1) {
    const int offset = layer % 5;
    for (int s = offset; s + kWindowSize <= geom.length(0); s += 5)
      windows.push_back(Window{s, 1, kWindowSize});
    return windows;
  }
  const int axis = layer % 2;
  const int offset = (layer / 2) % 5;
  const int lx = geom.length(0), ly = geom.length(1);
  if (axis == 0) {
    for (int y = 0; y < ly; ++y)
      for (int x = offset; x + kWindowSize <= lx; x += 5)
        windows.push_back(Window{geom.site_at(x, y), 1, kWindowSize});
  } else {
    for (int x = 0; x < lx; ++x)
      for (int y = offset; y + kWindowSize <= ly; y += 5)
        windows.push_back(Window{geom.site_at(x, y), lx, kWindowSize});
  }
  return windows;
}

std::vector<Window> all_schedule_windows(const LatticeGeometry& geom) {
  std::vector<Window> all;
  const int period = geom.dim() == 1 ? 5 : 10;
  for (int layer = 0; layer < period; ++layer)
    for (const Window& w : schedule_windows(layer, geom)) all.push_back(w);
  std::sort(all.begin(), all.end(), [](const Window& a, const Window& b) {
    if (a.stride != b.stride) return a.stride < b.stride;
    return a.base < b.base;
  });
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

std::vector<std::uint64_t> configs_with_charge(const LatticeGeometry& geom,
                                               int q) {
  const int n = geom.sites();
  if (q < 0 || q > n) throw std::invalid_argument("charge out of range");
  if (n > 28)
    throw EngineOverflow("sector enumeration is limited to 28 sites");
  if (q == 0) return {0};
  std::vector<std::uint64_t> out;
  std::uint64_t v = (1ull << q) - 1;
  const std::uint64_t limit = 1ull << n;
  while (v < limit) {
    out.push_back(v);
    const std::uint64_t t = v | (v - 1);
    v = (t + 1) | (((~t & (t + 1)) - 1) >> (std::countr_zero(v) + 1));
  }
  return out;
}

SectorConnectivity global_connectivity(const LatticeGeometry& geom,
                                       const SectorKey& sector,
                                       GateFamily family) {
  std::vector<std::uint64_t> members;
  for (std::uint64_t c : configs_with_charge(geom, sector.q))
    if (dipole(geom, c) == sector.p) members.push_back(c);
  if (members.empty())
    throw std::invalid_argument("empty (Q, P) sector");

  const WindowKernel kernel = connected_components(family);
  const std::vector<Window> windows = all_schedule_windows(geom);
  const auto index_of = [&](std::uint64_t c) -> std::size_t {
    return static_cast<std::size_t>(
        std::lower_bound(members.begin(), members.end(), c) -
        members.begin());
  };

  SectorConnectivity result;
  result.sector = sector;
  result.sector_size = members.size();
  std::vector<bool> visited(members.size(), false);
  for (std::size_t seed = 0; seed < members.size(); ++seed) {
    if (visited[seed]) continue;
    std::uint64_t count = 0;
    std::queue<std::size_t> frontier;
    frontier.push(seed);
    visited[seed] = true;
    while (!frontier.empty()) {
      const std::uint64_t c = members[frontier.front()];
      frontier.pop();
      ++count;
      for (const Window& w : windows) {
        const std::uint32_t widx = window_pack(geom, c, w);
        for (std::uint32_t m : kernel.component(widx)) {
          if (m == widx) continue;
          const std::size_t idx =
              index_of(window_unpack(geom, c, w, m));
          if (!visited[idx]) {
            visited[idx] = true;
            frontier.push(idx);
          }
        }
      }
    }
    result.component_sizes.push_back(count);
  }
  std::sort(result.component_sizes.rbegin(), result.component_sizes.rend());
  return result;
}

}  // namespace dipsim
