#include "doctest.h"

#include <array>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>

#include "dipsim/errors.hpp"
#include "dipsim/lattice.hpp"
#include "dipsim/rng.hpp"

using namespace dipsim;

namespace {

std::uint64_t bits_of(const std::string& s) {
  std::uint64_t b = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] == '1') b |= 1ull << i;
  return b;
}

}  // namespace

TEST_SUITE("lattice") {

TEST_CASE("charge counts occupied sites") {
  const auto geom = LatticeGeometry::chain(5);
  CHECK(charge(geom, bits_of("01110")) == 3);
  CHECK(charge(geom, 0) == 0);
  CHECK(charge(geom, geom.full_mask()) == 5);
}

TEST_CASE("dipole is the first moment of the occupation") {
  const auto geom = LatticeGeometry::chain(5);
  // (0,1,0,1,0): P = 1 + 3 = 4.
  CHECK(dipole(geom, bits_of("01010"))[0] == 4);
  CHECK(dipole(geom, bits_of("01010"))[1] == 0);
  // (0,1,1,1,0) and (1,0,1,0,1) are distinct configurations sharing the
  // sector (Q, P) = (3, 6).
  CHECK(dipole(geom, bits_of("01110"))[0] == 6);
  CHECK(dipole(geom, bits_of("10101"))[0] == 6);
  CHECK(bits_of("01110") != bits_of("10101"));
  CHECK(sector_key(geom, bits_of("01110")) == sector_key(geom, bits_of("10101")));
}

TEST_CASE("single particle at site r has P = r") {
  const auto geom = LatticeGeometry::chain(12);
  for (int r = 0; r < 12; ++r) {
    CHECK(charge(geom, 1ull << r) == 1);
    CHECK(dipole(geom, 1ull << r)[0] == r);
  }
}

TEST_CASE("2D dipole is coordinate-resolved") {
  const auto geom = LatticeGeometry::grid(3, 3);
  CHECK(geom.dim() == 2);
  CHECK(geom.sites() == 9);
  // Particles at (0,0) and (2,1): Q = 2, P = (2, 1).
  const std::uint64_t bits =
      (1ull << geom.site_at(0, 0)) | (1ull << geom.site_at(2, 1));
  const auto key = sector_key(geom, bits);
  CHECK(key.q == 2);
  CHECK(key.p[0] == 2);
  CHECK(key.p[1] == 1);
}

TEST_CASE("row-major site order: site = y*Lx + x") {
  const auto geom = LatticeGeometry::grid(4, 3);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 4; ++x) {
      const int s = geom.site_at(x, y);
      CHECK(s == y * 4 + x);
      CHECK(geom.coords(s)[0] == x);
      CHECK(geom.coords(s)[1] == y);
    }
}

TEST_CASE("window_pack packs window site 0 into the low bit") {
  const auto geom = LatticeGeometry::chain(5);
  const Window w{0, 1, 5};
  // (0,1,0,1,0) packs to 2 + 8 = 10.
  CHECK(window_pack(geom, bits_of("01010"), w) == 10u);
  CHECK(window_pack(geom, bits_of("01110"), w) == 14u);
}

TEST_CASE("pack/unpack is a bijection on an interior window") {
  const auto geom = LatticeGeometry::chain(10);
  const Window w{3, 1, 5};
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint64_t bits = rng.bits() & geom.full_mask();
    const std::uint32_t packed = window_pack(geom, bits, w);
    // Unpack of the pack restores the original configuration.
    CHECK(window_unpack(geom, bits, w, packed) == bits);
    // Every 5-bit value can be written and read back; outside bits survive.
    const std::uint32_t v = static_cast<std::uint32_t>(rng.uniform_below(32));
    const std::uint64_t swapped = window_unpack(geom, bits, w, v);
    CHECK(window_pack(geom, swapped, w) == v);
    const std::uint64_t outside = ~(0x1Full << 3) & geom.full_mask();
    CHECK((swapped & outside) == (bits & outside));
  }
}

TEST_CASE("exhaustive pack over sites 3..7 of a 10-site chain") {
  const auto geom = LatticeGeometry::chain(10);
  const Window w{3, 1, 5};
  for (std::uint64_t bits = 0; bits < 1024; ++bits) {
    const std::uint32_t got = window_pack(geom, bits, w);
    std::uint32_t want = 0;
    for (int i = 0; i < 5; ++i) want |= ((bits >> (3 + i)) & 1ull) << i;
    CHECK(got == want);
  }
}

TEST_CASE("2D window along y uses stride Lx") {
  const auto geom = LatticeGeometry::grid(6, 5);
  const Window w{2, 6, 5};  // column x=2
  std::uint64_t bits = 0;
  bits |= 1ull << geom.site_at(2, 0);
  bits |= 1ull << geom.site_at(2, 3);
  CHECK(window_pack(geom, bits, w) == ((1u << 0) | (1u << 3)));
}

TEST_CASE("out-of-bounds windows are rejected") {
  const auto geom = LatticeGeometry::chain(8);
  CHECK_THROWS_AS(check_window(geom, Window{4, 1, 5}), std::invalid_argument);
  CHECK_THROWS_AS(check_window(geom, Window{-1, 1, 5}), std::invalid_argument);
  CHECK_NOTHROW(check_window(geom, Window{3, 1, 5}));
}

TEST_CASE("translating a configuration shifts P by Q per unit step") {
  const auto geom = LatticeGeometry::chain(16);
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    // Keep the top bit clear so a one-site shift stays on the lattice.
    const std::uint64_t bits = rng.bits() & (geom.full_mask() >> 1);
    const std::uint64_t shifted = bits << 1;
    CHECK(charge(geom, shifted) == charge(geom, bits));
    CHECK(dipole(geom, shifted)[0] == dipole(geom, bits)[0] + charge(geom, bits));
  }
}

TEST_CASE("sector keys agree iff Q and P agree") {
  const auto geom = LatticeGeometry::chain(8);
  std::set<SectorKey> keys;
  int configs = 0;
  for (std::uint64_t bits = 0; bits < 256; ++bits) {
    const auto key = sector_key(geom, bits);
    CHECK(key.q == charge(geom, bits));
    CHECK(key.p == dipole(geom, bits));
    keys.insert(key);
    ++configs;
  }
  CHECK(configs == 256);
  // Far fewer sectors than configurations: the key really is (Q, P).
  CHECK(keys.size() < 256);
  // Mirror image about the chain center lands in the sector with reflected P.
  const std::uint64_t bits = bits_of("01101000");
  std::uint64_t mirror = 0;
  for (int i = 0; i < 8; ++i)
    if ((bits >> i) & 1ull) mirror |= 1ull << (7 - i);
  CHECK(charge(geom, mirror) == charge(geom, bits));
  CHECK(dipole(geom, mirror)[0] ==
        7 * charge(geom, bits) - dipole(geom, bits)[0]);
}

TEST_CASE("config strings round-trip, site 0 first") {
  const auto geom = LatticeGeometry::chain(6);
  CHECK(config_to_string(geom, bits_of("010110")) == "010110");
  CHECK(config_from_string(geom, "010110") == bits_of("010110"));
  Rng rng(31);
  for (int trial = 0; trial < 64; ++trial) {
    const std::uint64_t bits = rng.bits() & geom.full_mask();
    CHECK(config_from_string(geom, config_to_string(geom, bits)) == bits);
  }
  CHECK_THROWS_AS(config_from_string(geom, "0101"), ConfigError);
  CHECK_THROWS_AS(config_from_string(geom, "01011x"), ConfigError);
}

TEST_CASE("geometry constructors validate their arguments") {
  CHECK_THROWS_AS(LatticeGeometry::chain(0), ConfigError);
  CHECK_THROWS_AS(LatticeGeometry::chain(65), ConfigError);
  CHECK_THROWS_AS(LatticeGeometry::grid(9, 8), ConfigError);  // 72 > 64
  CHECK_NOTHROW(LatticeGeometry::grid(8, 8));
  CHECK(LatticeGeometry::chain(64).full_mask() == ~0ull);
}

}  // TEST_SUITE
