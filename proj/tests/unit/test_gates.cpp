#include "doctest.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <vector>

#include "dipsim/gates.hpp"
#include "dipsim/lattice.hpp"
#include "dipsim/prob_state.hpp"
#include "dipsim/rng.hpp"

using namespace dipsim;

namespace {

// Independent oracle for the elementary window moves, written against the
// definition rather than the production code: choose an ordered pair of
// occupied sites (a, b) with a != b, hop a -> a+1 and b -> b-1 by occupancy
// arithmetic, and accept iff every site count stays in {0, 1} and the window
// actually changed. MinimalPair restricts to the two swap-gate pairs.
std::set<std::uint32_t> oracle_moves(std::uint32_t s, GateFamily family) {
  std::set<std::uint32_t> out;
  if (family == GateFamily::minimal_pair) {
    for (std::uint32_t g = 0; g <= 1; ++g) {
      const std::uint32_t a = 0b01010u | (g << 2);  // (0,1,g,1,0)
      const std::uint32_t b = 0b10001u | (g << 2);  // (1,0,g,0,1)
      if (s == a) out.insert(b);
      if (s == b) out.insert(a);
    }
    return out;
  }
  for (int a = 0; a < kWindowSize - 1; ++a) {
    for (int b = 1; b < kWindowSize; ++b) {
      if (a == b) continue;
      std::array<int, kWindowSize> c{};
      for (int i = 0; i < kWindowSize; ++i) c[i] = (s >> i) & 1u;
      if (!c[a] || !c[b]) continue;
      c[a] -= 1;
      c[a + 1] += 1;
      c[b] -= 1;
      c[b - 1] += 1;
      bool admissible = true;
      std::uint32_t t = 0;
      for (int i = 0; i < kWindowSize; ++i) {
        if (c[i] < 0 || c[i] > 1) {
          admissible = false;
          break;
        }
        t |= static_cast<std::uint32_t>(c[i]) << i;
      }
      if (admissible && t != s) out.insert(t);
    }
  }
  return out;
}

// BFS closure of the oracle moves into a partition of the 32 window states.
std::set<std::set<std::uint32_t>> oracle_partition(GateFamily family) {
  std::set<std::set<std::uint32_t>> partition;
  std::array<bool, kWindowStates> seen{};
  for (std::uint32_t s0 = 0; s0 < kWindowStates; ++s0) {
    if (seen[s0]) continue;
    std::set<std::uint32_t> comp{s0};
    std::vector<std::uint32_t> frontier{s0};
    seen[s0] = true;
    while (!frontier.empty()) {
      const std::uint32_t s = frontier.back();
      frontier.pop_back();
      for (const std::uint32_t t : oracle_moves(s, family)) {
        if (!seen[t]) {
          seen[t] = true;
          comp.insert(t);
          frontier.push_back(t);
        }
      }
    }
    partition.insert(comp);
  }
  return partition;
}

std::set<std::set<std::uint32_t>> kernel_partition(const WindowKernel& k) {
  std::set<std::set<std::uint32_t>> partition;
  for (const auto& comp : k.components)
    partition.insert(std::set<std::uint32_t>(comp.begin(), comp.end()));
  return partition;
}

int window_charge(std::uint32_t s) {
  int q = 0;
  for (int i = 0; i < kWindowSize; ++i) q += (s >> i) & 1u;
  return q;
}

int window_dipole(std::uint32_t s) {
  int p = 0;
  for (int i = 0; i < kWindowSize; ++i) p += i * ((s >> i) & 1u);
  return p;
}

}  // namespace

TEST_SUITE("gates") {

TEST_CASE("elementary moves match the definition on every window state") {
  for (const auto family : {GateFamily::minimal_pair, GateFamily::full_mixing}) {
    for (std::uint32_t s = 0; s < kWindowStates; ++s) {
      const auto got = elementary_moves(s, family);
      const std::set<std::uint32_t> got_set(got.begin(), got.end());
      CHECK(got_set.size() == got.size());  // no duplicates
      CHECK(got_set == oracle_moves(s, family));
    }
  }
}

TEST_CASE("spot checks: swap pair, frozen state, pair-hop image") {
  // (0,1,0,1,0) = 10 swaps with (1,0,0,0,1) = 17 under MinimalPair.
  const auto m = elementary_moves(10, GateFamily::minimal_pair);
  REQUIRE(m.size() == 1);
  CHECK(m[0] == 17);
  // The fully occupied window is frozen in both families.
  CHECK(elementary_moves(31, GateFamily::minimal_pair).empty());
  CHECK(elementary_moves(31, GateFamily::full_mixing).empty());
  CHECK(elementary_moves(0, GateFamily::full_mixing).empty());
  // (0,1,1,0,0) reaches (1,0,0,1,0) under FullMixing (hops 1->0 and 2->3).
  const auto f = elementary_moves(0b00110, GateFamily::full_mixing);
  CHECK(std::count(f.begin(), f.end(), 0b01001u) == 1);
}

TEST_CASE("moves conserve window charge and dipole, and are symmetric") {
  for (const auto family : {GateFamily::minimal_pair, GateFamily::full_mixing}) {
    for (std::uint32_t s = 0; s < kWindowStates; ++s) {
      for (const std::uint32_t t : elementary_moves(s, family)) {
        CHECK(window_charge(t) == window_charge(s));
        CHECK(window_dipole(t) == window_dipole(s));
        const auto back = elementary_moves(t, family);
        CHECK(std::count(back.begin(), back.end(), s) == 1);
      }
    }
  }
}

TEST_CASE("component partitions equal the oracle's BFS closure exactly") {
  for (const auto family : {GateFamily::minimal_pair, GateFamily::full_mixing}) {
    const auto kernel = connected_components(family);
    CHECK(kernel_partition(kernel) == oracle_partition(family));
  }
}

TEST_CASE("kernel bookkeeping is internally consistent") {
  for (const auto family : {GateFamily::minimal_pair, GateFamily::full_mixing}) {
    const auto kernel = connected_components(family);
    std::size_t total = 0;
    std::uint32_t prev_first = 0;
    for (std::size_t i = 0; i < kernel.components.size(); ++i) {
      const auto& comp = kernel.components[i];
      REQUIRE_FALSE(comp.empty());
      CHECK(std::is_sorted(comp.begin(), comp.end()));
      if (i > 0) CHECK(comp.front() > prev_first);
      prev_first = comp.front();
      for (const std::uint32_t s : comp)
        CHECK(kernel.component_of[s] == i);
      total += comp.size();
    }
    CHECK(total == kWindowStates);
    for (std::uint32_t s = 0; s < kWindowStates; ++s) {
      const auto& comp = kernel.component(s);
      CHECK(std::count(comp.begin(), comp.end(), s) == 1);
    }
  }
}

TEST_CASE("MinimalPair has exactly two doublets; FullMixing refines them") {
  const auto minimal = connected_components(GateFamily::minimal_pair);
  // The component containing (0,1,g,1,0) has size 2 for g in {0,1}.
  CHECK(minimal.component(10).size() == 2);
  CHECK(minimal.component(10) == std::vector<std::uint32_t>{10, 17});
  CHECK(minimal.component(14).size() == 2);
  CHECK(minimal.component(14) == std::vector<std::uint32_t>{14, 21});
  int doublets = 0, singletons = 0;
  for (const auto& comp : minimal.components) {
    if (comp.size() == 2)
      ++doublets;
    else if (comp.size() == 1)
      ++singletons;
  }
  CHECK(doublets == 2);
  CHECK(singletons == 28);

  // Every MinimalPair component sits inside one FullMixing component.
  const auto full = connected_components(GateFamily::full_mixing);
  for (const auto& comp : minimal.components) {
    for (const std::uint32_t s : comp)
      CHECK(full.component_of[s] == full.component_of[comp.front()]);
  }
}

TEST_CASE("kernel_apply mixes a delta uniformly over its component") {
  const auto geom = LatticeGeometry::chain(5);
  const Window w{0, 1, 5};
  const auto kernel = connected_components(GateFamily::minimal_pair);
  auto state = ProbState::delta(geom, 10);
  kernel_apply(state, w, kernel);
  REQUIRE(state.support_size() == 2);
  CHECK(state.prob_of(10) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(state.prob_of(17) == doctest::Approx(0.5).epsilon(1e-15));

  // A frozen delta is untouched.
  auto frozen = ProbState::delta(geom, 31);
  kernel_apply(frozen, w, kernel);
  CHECK(frozen.support_size() == 1);
  CHECK(frozen.prob_of(31) == 1.0);
}

TEST_CASE("uniform component weight is a fixed point; apply is idempotent") {
  const auto geom = LatticeGeometry::chain(5);
  const Window w{0, 1, 5};
  for (const auto family : {GateFamily::minimal_pair, GateFamily::full_mixing}) {
    const auto kernel = connected_components(family);
    for (const auto& comp : kernel.components) {
      auto state = ProbState::uniform_over(
          geom, std::vector<std::uint64_t>(comp.begin(), comp.end()));
      kernel_apply(state, w, kernel);
      REQUIRE(state.support_size() == comp.size());
      for (const std::uint32_t s : comp)
        CHECK(state.prob_of(s) ==
              doctest::Approx(1.0 / comp.size()).epsilon(1e-14));
    }
    // Idempotence on a random state: applying twice equals applying once.
    Rng rng(123);
    std::vector<ProbState::Entry> entries;
    for (std::uint64_t b = 0; b < kWindowStates; ++b)
      entries.emplace_back(b, rng.uniform() + 0.01);
    ProbState once(geom, entries);
    once.renormalize();
    ProbState twice = once;
    kernel_apply(once, w, kernel);
    kernel_apply(twice, w, kernel);
    kernel_apply(twice, w, kernel);
    REQUIRE(once.support_size() == twice.support_size());
    for (std::size_t i = 0; i < once.entries().size(); ++i) {
      CHECK(once.entries()[i].first == twice.entries()[i].first);
      CHECK(once.entries()[i].second ==
            doctest::Approx(twice.entries()[i].second).epsilon(1e-13));
    }
  }
}

TEST_CASE("kernel_apply preserves mass and the uniform distribution") {
  const auto geom = LatticeGeometry::chain(5);
  const Window w{0, 1, 5};
  const auto kernel = connected_components(GateFamily::full_mixing);
  // Double stochasticity: the uniform distribution over all 32 states is a
  // fixed point.
  std::vector<std::uint64_t> all;
  for (std::uint64_t b = 0; b < kWindowStates; ++b) all.push_back(b);
  auto state = ProbState::uniform_over(geom, all);
  kernel_apply(state, w, kernel);
  for (std::uint64_t b = 0; b < kWindowStates; ++b)
    CHECK(state.prob_of(b) == doctest::Approx(1.0 / 32).epsilon(1e-14));

  // Mass conservation over many applications of a random state.
  Rng rng(7);
  std::vector<ProbState::Entry> entries;
  for (std::uint64_t b = 0; b < kWindowStates; ++b)
    entries.emplace_back(b, rng.uniform());
  ProbState random_state(geom, entries);
  random_state.renormalize();
  for (int rep = 0; rep < 1000; ++rep) kernel_apply(random_state, w, kernel);
  CHECK(std::abs(random_state.total_mass() - 1.0) <= 1e-12);
}

TEST_CASE("kernel_apply only touches window bits") {
  const auto geom = LatticeGeometry::chain(10);
  const Window w{2, 1, 5};
  const auto kernel = connected_components(GateFamily::full_mixing);
  // Particles outside the window at sites 0 and 9; (0,1,1,0,0) inside.
  const std::uint64_t outside = (1ull << 0) | (1ull << 9);
  const std::uint64_t bits = outside | (0b00110ull << 2);
  auto state = ProbState::delta(geom, bits);
  kernel_apply(state, w, kernel);
  double mass = 0.0;
  for (const auto& [config, p] : state.entries()) {
    CHECK((config & ~(0x1Full << 2)) == outside);
    CHECK(sector_key(geom, config) == sector_key(geom, bits));
    mass += p;
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(state.support_size() ==
        kernel.component(0b00110).size());
}

TEST_CASE("1D schedule: starts congruent to layer mod 5, clipped") {
  const auto geom = LatticeGeometry::chain(12);
  const auto layer0 = schedule_windows(0, geom);
  REQUIRE(layer0.size() == 2);
  CHECK(layer0[0].base == 0);
  CHECK(layer0[1].base == 5);
  const auto layer3 = schedule_windows(3, geom);
  REQUIRE(layer3.size() == 1);
  CHECK(layer3[0].base == 3);
  for (const auto& w : layer0) {
    CHECK(w.stride == 1);
    CHECK(w.size == 5);
  }
  // Period 5.
  for (int layer = 0; layer < 5; ++layer) {
    const auto a = schedule_windows(layer, geom);
    const auto b = schedule_windows(layer + 5, geom);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  }
}

TEST_CASE("1D schedule covers every possible window over one period") {
  for (int length = 5; length <= 30; ++length) {
    const auto geom = LatticeGeometry::chain(length);
    std::set<int> starts;
    for (int layer = 0; layer < 5; ++layer) {
      std::set<int> layer_sites;
      for (const auto& w : schedule_windows(layer, geom)) {
        CHECK_NOTHROW(check_window(geom, w));
        CHECK(w.base % 5 == layer);
        starts.insert(w.base);
        for (int i = 0; i < w.size; ++i) {
          // Windows within a layer are disjoint.
          CHECK(layer_sites.insert(w.site(i)).second);
        }
      }
    }
    std::set<int> expected;
    for (int s = 0; s + 5 <= length; ++s) expected.insert(s);
    CHECK(starts == expected);
    const auto all = all_schedule_windows(geom);
    CHECK(all.size() == expected.size());
  }
}

TEST_CASE("2D schedule alternates axes with a period of 10") {
  const auto geom = LatticeGeometry::grid(7, 6);
  const auto layer0 = schedule_windows(0, geom);
  // One x-window per row at offset 0 (7 - 5 = 2 rules out start 5).
  REQUIRE(layer0.size() == 6);
  for (const auto& w : layer0) {
    CHECK(w.stride == 1);
    CHECK(geom.coords(w.base)[0] == 0);
  }
  const auto layer1 = schedule_windows(1, geom);
  // One y-window per column at offset 0 (6 - 5 = 1 rules out start 5).
  REQUIRE(layer1.size() == 7);
  for (const auto& w : layer1) {
    CHECK(w.stride == 7);
    CHECK(geom.coords(w.base)[1] == 0);
  }
  for (int layer = 0; layer < 10; ++layer) {
    const auto a = schedule_windows(layer, geom);
    const auto b = schedule_windows(layer + 10, geom);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    // Axis alternation and offset congruence.
    const int offset = (layer / 2) % 5;
    std::set<int> layer_sites;
    for (const auto& w : a) {
      CHECK_NOTHROW(check_window(geom, w));
      CHECK(w.stride == (layer % 2 == 0 ? 1 : 7));
      CHECK(geom.coords(w.base)[layer % 2] % 5 == offset);
      for (int i = 0; i < w.size; ++i)
        CHECK(layer_sites.insert(w.site(i)).second);
    }
  }
  // Over one period every in-bounds window of both axes appears.
  const auto all = all_schedule_windows(geom);
  std::set<std::pair<int, int>> got;
  for (const auto& w : all) got.emplace(w.base, w.stride);
  std::set<std::pair<int, int>> expected;
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x + 5 <= 7; ++x) expected.emplace(geom.site_at(x, y), 1);
  for (int x = 0; x < 7; ++x)
    for (int y = 0; y + 5 <= 6; ++y) expected.emplace(geom.site_at(x, y), 7);
  CHECK(got == expected);
}

TEST_CASE("global connectivity: L=5 doublet sector and frozen full sector") {
  const auto geom = LatticeGeometry::chain(5);
  for (const auto family : {GateFamily::minimal_pair, GateFamily::full_mixing}) {
    // Q=2, P=4 holds exactly (0,1,0,1,0) and (1,0,0,0,1), one doublet.
    const auto doublet = global_connectivity(geom, SectorKey{2, {4, 0}}, family);
    CHECK(doublet.sector_size == 2);
    REQUIRE(doublet.component_sizes.size() == 1);
    CHECK(doublet.component_sizes[0] == 2);
  }
  // The fully occupied sector is a frozen singleton.
  const auto full = global_connectivity(geom, SectorKey{5, {10, 0}},
                                        GateFamily::full_mixing);
  CHECK(full.sector_size == 1);
  REQUIRE(full.component_sizes.size() == 1);
  CHECK(full.component_sizes[0] == 1);
  // An empty sector is an error.
  CHECK_THROWS_AS(global_connectivity(geom, SectorKey{1, {7, 0}},
                                      GateFamily::full_mixing),
                  std::invalid_argument);
}

TEST_CASE("global connectivity partitions every sector it reports") {
  const auto geom = LatticeGeometry::chain(8);
  for (const int q : {2, 3, 4}) {
    // Collect the sectors present at this charge.
    std::set<SectorKey> sectors;
    for (const std::uint64_t bits : configs_with_charge(geom, q))
      sectors.insert(sector_key(geom, bits));
    for (const auto& sector : sectors) {
      const auto conn =
          global_connectivity(geom, sector, GateFamily::full_mixing);
      std::uint64_t total = 0;
      for (std::size_t i = 0; i < conn.component_sizes.size(); ++i) {
        total += conn.component_sizes[i];
        if (i > 0) CHECK(conn.component_sizes[i] <= conn.component_sizes[i - 1]);
      }
      CHECK(total == conn.sector_size);
      // MinimalPair only refines: at least as many components.
      const auto minimal =
          global_connectivity(geom, sector, GateFamily::minimal_pair);
      CHECK(minimal.sector_size == conn.sector_size);
      CHECK(minimal.component_sizes.size() >= conn.component_sizes.size());
    }
  }
}

TEST_CASE("configs_with_charge enumerates ascending binomial sets") {
  const auto geom = LatticeGeometry::chain(8);
  const auto got = configs_with_charge(geom, 3);
  CHECK(got.size() == 56);  // C(8,3)
  CHECK(std::is_sorted(got.begin(), got.end()));
  for (const std::uint64_t bits : got) CHECK(charge(geom, bits) == 3);
  CHECK(configs_with_charge(geom, 0) == std::vector<std::uint64_t>{0});
  CHECK(configs_with_charge(geom, 8) == std::vector<std::uint64_t>{255});
}

}  // TEST_SUITE
