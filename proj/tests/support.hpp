#pragma once

#include <functional>

#include "clocklab/lattice.hpp"

namespace testsupport {

using namespace clocklab;

// Value at a site of the fully disordered reference field (q = 64): every
// bond between two such sites has distance at least 8. Plane 0 keeps the
// boundary tiling.
inline int disordered_site(int x, int y, int z, int q = 64) {
  if (z == 0) return disordered_value(x, y, q);
  return (q / 8) * (4 * (x & 1) + 2 * (y & 1) + (z & 1));
}

// Disordered region given by a column height map h: cubes (x, y, z) with
// z < h(x, y) are pure disordered. A site is disordered up to the largest
// height among the four columns it is a corner of; above that it holds s.
inline SpinConfig height_config(const LatticeSpec& spec, const std::function<int(int, int)>& h, int s = 4) {
  SpinConfig c = make_config(spec, s);
  const int n = spec.n;
  for (int z = 1; z <= spec.l; ++z)
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        const int top = std::max({h(x, y), h(wrap(x - 1, n), y), h(x, wrap(y - 1, n)), h(wrap(x - 1, n), wrap(y - 1, n))});
        c.set(x, y, z, z <= top ? disordered_site(x, y, z, spec.q) : s);
      }
  return c;
}

inline SpinConfig flat_config(const LatticeSpec& spec, int z0) {
  return height_config(spec, [z0](int, int) { return z0; });
}

inline SpinConfig bump_config(const LatticeSpec& spec, int z0, int bx, int by) {
  return height_config(spec, [=](int x, int y) { return z0 + (x == bx && y == by); });
}

}  // namespace testsupport
