#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "lattice.hpp"

namespace clocklab {

// Order/disorder states of the bonds of a single column of cubes, counted from
// its lowest plane. Plane k (0..height) carries four horizontal bonds,
// j = 0: x-bond at y=0, 1: x-bond at y=1, 2: y-bond at x=0, 3: y-bond at x=1;
// cube k carries four vertical bonds at corners (0,0), (1,0), (0,1), (1,1).
struct ColumnPattern {
  int height = 0;  // cubes
  std::vector<BondState> bonds;

  ColumnPattern() = default;
  explicit ColumnPattern(int h, BondState fill = BondState::disordered)
      : height(h), bonds(static_cast<std::size_t>(8 * h + 4), fill) {}

  static std::size_t horizontal(int plane, int j) { return static_cast<std::size_t>(8 * plane + j); }
  static std::size_t vertical(int cube, int corner) { return static_cast<std::size_t>(8 * cube + 4 + corner); }

  BondState h(int plane, int j) const { return bonds[horizontal(plane, j)]; }
  BondState v(int cube, int corner) const { return bonds[vertical(cube, corner)]; }
  bool h_ordered(int plane, int j) const { return h(plane, j) == BondState::ordered; }
  bool v_ordered(int cube, int corner) const { return v(cube, corner) == BondState::ordered; }

  // Indices of the twelve bonds of cube k.
  static std::array<std::size_t, 12> cube_bonds(int k) {
    std::array<std::size_t, 12> b{};
    for (int j = 0; j < 4; ++j) {
      b[j] = horizontal(k, j);
      b[4 + j] = horizontal(k + 1, j);
      b[8 + j] = vertical(k, j);
    }
    return b;
  }

  int ordered_in_cube(int k) const {
    int o = 0;
    for (auto i : cube_bonds(k)) o += bonds[i] == BondState::ordered;
    return o;
  }
  bool frustrated(int k) const {
    const int o = ordered_in_cube(k);
    return o != 0 && o != 12;
  }
  bool pure_ordered(int k) const { return ordered_in_cube(k) == 12; }
  bool pure_disordered(int k) const { return ordered_in_cube(k) == 0; }
  bool plane_ordered(int k) const {
    for (int j = 0; j < 4; ++j)
      if (!h_ordered(k, j)) return false;
    return true;
  }
  bool plane_disordered(int k) const {
    for (int j = 0; j < 4; ++j)
      if (h_ordered(k, j)) return false;
    return true;
  }

  // '1' ordered, '0' disordered, in bond index order.
  std::string bits() const {
    std::string s;
    for (auto b : bonds) s += b == BondState::ordered ? '1' : '0';
    return s;
  }

  friend bool operator==(const ColumnPattern&, const ColumnPattern&) = default;
};

// Site offsets of the four corners, indexed as in ColumnPattern.
inline constexpr std::array<std::array<int, 2>, 4> kCorners{{{0, 0}, {1, 0}, {0, 1}, {1, 1}}};

// Freeze the bond states of the column over the cube range [lo, hi].
inline ColumnPattern column_pattern(const SpinConfig& c, int cx, int cy, int lo, int hi) {
  ColumnPattern p(hi - lo + 1);
  const int n = c.spec().n;
  auto st = [&](const Bond& b) { return c.ordered(b) ? BondState::ordered : BondState::disordered; };
  for (int k = 0; k <= p.height; ++k) {
    const int z = lo + k;
    p.bonds[ColumnPattern::horizontal(k, 0)] = st(Bond{{cx, cy, z}, Axis::x});
    p.bonds[ColumnPattern::horizontal(k, 1)] = st(Bond{{cx, wrap(cy + 1, n), z}, Axis::x});
    p.bonds[ColumnPattern::horizontal(k, 2)] = st(Bond{{cx, cy, z}, Axis::y});
    p.bonds[ColumnPattern::horizontal(k, 3)] = st(Bond{{wrap(cx + 1, n), cy, z}, Axis::y});
    if (k < p.height)
      for (int corner = 0; corner < 4; ++corner)
        p.bonds[ColumnPattern::vertical(k, corner)] =
            st(Bond{{wrap(cx + kCorners[corner][0], n), wrap(cy + kCorners[corner][1], n), z}, Axis::z});
  }
  return p;
}

}  // namespace clocklab
