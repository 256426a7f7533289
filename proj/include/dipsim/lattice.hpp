#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dipsim/errors.hpp"

namespace dipsim {

// Open-boundary lattice, 1D chain or 2D grid. Sites are indexed from 0;
// in 2D the order is row-major: site = y * Lx + x. Occupations are packed
// into a uint64 with site i at bit i, so the packing cap is 64 sites
// (exact-mode evolution additionally caps at kExactSiteCap).
class LatticeGeometry {
 public:
  static constexpr int kPackCap = 64;
  static constexpr int kExactSiteCap = 24;

  LatticeGeometry() : dim_(1), len_{1, 1} {}

  static LatticeGeometry chain(int length);
  static LatticeGeometry grid(int lx, int ly);

  int dim() const { return dim_; }
  int length(int axis) const { return len_[static_cast<std::size_t>(axis)]; }
  int sites() const { return len_[0] * len_[1]; }

  // {x, y}; y == 0 in 1D.
  std::array<int, 2> coords(int site) const {
    return {site % len_[0], site / len_[0]};
  }
  int site_at(int x, int y) const { return y * len_[0] + x; }

  std::uint64_t full_mask() const {
    const int n = sites();
    return n >= 64 ? ~0ull : (1ull << n) - 1;
  }

  bool operator==(const LatticeGeometry& o) const {
    return dim_ == o.dim_ && len_ == o.len_;
  }
  bool operator!=(const LatticeGeometry& o) const { return !(*this == o); }

 private:
  LatticeGeometry(int dim, int lx, int ly) : dim_(dim), len_{lx, ly} {}
  int dim_;
  std::array<int, 2> len_;
};

// Occupation bitstring bound to its geometry; a value type.
struct Configuration {
  LatticeGeometry geom;
  std::uint64_t bits = 0;

  int n(int site) const { return static_cast<int>((bits >> site) & 1ull); }
};

// Total charge Q and dipole moment P of a configuration. P is scalar in 1D
// (p[1] == 0) and the coordinate pair (Px, Py) in 2D.
struct SectorKey {
  int q = 0;
  std::array<std::int64_t, 2> p{0, 0};

  bool operator==(const SectorKey& o) const { return q == o.q && p == o.p; }
  bool operator!=(const SectorKey& o) const { return !(*this == o); }
  bool operator<(const SectorKey& o) const {
    if (q != o.q) return q < o.q;
    return p < o.p;
  }
};

int charge(const LatticeGeometry& geom, std::uint64_t bits);
std::array<std::int64_t, 2> dipole(const LatticeGeometry& geom,
                                   std::uint64_t bits);
SectorKey sector_key(const LatticeGeometry& geom, std::uint64_t bits);

inline int charge(const Configuration& c) { return charge(c.geom, c.bits); }
inline std::array<std::int64_t, 2> dipole(const Configuration& c) {
  return dipole(c.geom, c.bits);
}
inline SectorKey sector_key(const Configuration& c) {
  return sector_key(c.geom, c.bits);
}

// Contiguous run of sites along one axis: site(i) = base + i * stride.
// stride is 1 along x and Lx along y.
struct Window {
  int base = 0;
  int stride = 1;
  int size = 5;

  int site(int i) const { return base + i * stride; }
  bool operator==(const Window& o) const {
    return base == o.base && stride == o.stride && size == o.size;
  }
};

// Packs the window's occupations into a small integer, window site 0 at the
// least significant bit. Throws if the window leaves the lattice.
std::uint32_t window_pack(const LatticeGeometry& geom, std::uint64_t bits,
                          const Window& w);

// Writes a packed window value back into a full configuration, leaving
// outside-window bits untouched.
std::uint64_t window_unpack(const LatticeGeometry& geom, std::uint64_t bits,
                            const Window& w, std::uint32_t packed);

void check_window(const LatticeGeometry& geom, const Window& w);

// Serialization: site 0 first, '0'/'1' per site.
std::string config_to_string(const LatticeGeometry& geom, std::uint64_t bits);
std::uint64_t config_from_string(const LatticeGeometry& geom,
                                 const std::string& s);

}  // namespace dipsim
