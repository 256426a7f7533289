#include "dipsim/lattice.hpp"

#include <bit>
#include <stdexcept>

namespace dipsim {

LatticeGeometry LatticeGeometry::chain(int length) {
  if (length < 1 || length > kPackCap)
    throw ConfigError("chain length must be in [1, 64], got " +
                      std::to_string(length));
  return LatticeGeometry(1, length, 1);
}

LatticeGeometry LatticeGeometry::grid(int lx, int ly) {
  if (lx < 1 || ly < 1)
    throw ConfigError("grid lengths must be positive");
  if (lx * ly > kPackCap)
    throw ConfigError("grid has " + std::to_string(lx * ly) +
                      " sites; packing cap is 64");
  return LatticeGeometry(2, lx, ly);
}

int charge(const LatticeGeometry& geom, std::uint64_t bits) {
  return std::popcount(bits & geom.full_mask());
}

std::array<std::int64_t, 2> dipole(const LatticeGeometry& geom,
                                   std::uint64_t bits) {
  std::array<std::int64_t, 2> p{0, 0};
  std::uint64_t b = bits & geom.full_mask();
  while (b) {
    const int site = std::countr_zero(b);
    const auto xy = geom.coords(site);
    p[0] += xy[0];
    p[1] += xy[1];
    b &= b - 1;
  }
  if (geom.dim() == 1) p[1] = 0;
  return p;
}

SectorKey sector_key(const LatticeGeometry& geom, std::uint64_t bits) {
  return SectorKey{charge(geom, bits), dipole(geom, bits)};
}

void check_window(const LatticeGeometry& geom, const Window& w) {
  if (w.size < 1 || w.size > 8)
    throw std::invalid_argument("window size must be in [1, 8]");
  const auto base_xy = geom.coords(w.base);
  const int axis = (w.stride == 1) ? 0 : 1;
  if (w.stride != 1 && w.stride != geom.length(0))
    throw std::invalid_argument("window stride must follow one axis");
  if (w.base < 0 || w.base >= geom.sites() ||
      base_xy[axis] + w.size - 1 >= geom.length(axis))
    throw std::invalid_argument("window outside lattice");
}

std::uint32_t window_pack(const LatticeGeometry& geom, std::uint64_t bits,
                          const Window& w) {
  check_window(geom, w);
  std::uint32_t packed = 0;
  for (int i = 0; i < w.size; ++i)
    packed |= static_cast<std::uint32_t>((bits >> w.site(i)) & 1ull) << i;
  return packed;
}

std::uint64_t window_unpack(const LatticeGeometry& geom, std::uint64_t bits,
                            const Window& w, std::uint32_t packed) {
  check_window(geom, w);
  for (int i = 0; i < w.size; ++i) {
    const std::uint64_t mask = 1ull << w.site(i);
    if ((packed >> i) & 1u)
      bits |= mask;
    else
      bits &= ~mask;
  }
  return bits;
}

std::string config_to_string(const LatticeGeometry& geom, std::uint64_t bits) {
  std::string s(static_cast<std::size_t>(geom.sites()), '0');
  for (int i = 0; i < geom.sites(); ++i)
    if ((bits >> i) & 1ull) s[static_cast<std::size_t>(i)] = '1';
  return s;
}

std::uint64_t config_from_string(const LatticeGeometry& geom,
                                 const std::string& s) {
  if (static_cast<int>(s.size()) != geom.sites())
    throw ConfigError("configuration string length " +
                      std::to_string(s.size()) + " does not match " +
                      std::to_string(geom.sites()) + " sites");
  std::uint64_t bits = 0;
  for (int i = 0; i < geom.sites(); ++i) {
    const char c = s[static_cast<std::size_t>(i)];
    if (c == '1')
      bits |= 1ull << i;
    else if (c != '0')
      throw ConfigError("configuration string must be 0/1");
  }
  return bits;
}

}  // namespace dipsim
