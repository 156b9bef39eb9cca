#pragma once

#include <optional>
#include <vector>

#include "lattice.hpp"
#include "rng.hpp"
#include "sampler.hpp"

namespace clocklab {

// Layered configurations carrying one problematic signed pair in every
// column. Site planes, bottom to top:
//   disordered 0..p1 | ordered p1+1..r1 | disordered r1+1..p3 | ordered p3+1..L+1
// so frustrated slabs sit at cubes p1 (sign -), r1 (sign +) and p3 (sign -).
// e_single: p1 = 0 and plane 1 ordered near 0, so each bottom cube keeps one
// ordered vertical. e_double: plane 1 is disordered except that sites with
// both coordinates even sit near 0; cubes 0 and 1 are frustrated.
enum class PlantedVariant : std::uint8_t { problematic, e_single, e_double };

struct PlantedPair {
  SpinConfig config;
  PlantedVariant variant = PlantedVariant::problematic;
  int p1 = 0, r1 = 0, p3 = 0;
  int top = 0;
};

namespace detail {

inline int pick_far(SplitMix& rng, int q, const std::vector<int>& avoid) {
  for (;;) {
    const int v = static_cast<int>(rng.below(static_cast<std::uint32_t>(q)));
    bool ok = true;
    for (int a : avoid) ok &= circular_distance(v, a, q) >= 2;
    if (ok) return v;
  }
}

}  // namespace detail

inline PlantedPair plant_pair(const LatticeSpec& spec, SplitMix& rng, std::optional<PlantedVariant> want = std::nullopt) {
  spec.validate_order_disorder();
  if (spec.q < 32) throw InvalidParams("planting needs q >= 32");
  const int l = spec.l, n = spec.n, q = spec.q;
  PlantedPair out;
  out.variant = want ? *want : static_cast<PlantedVariant>(rng.below(3));
  const int first_r1 = out.variant == PlantedVariant::e_double ? 4 : 3;
  if (out.variant == PlantedVariant::problematic) {
    if (l < 8) throw InvalidParams("planting needs L >= 8");
    out.p1 = 1 + static_cast<int>(rng.below(static_cast<std::uint32_t>(l - 7)));
  } else {
    if (l < first_r1 + 4) throw InvalidParams("planting needs more layers");
    out.p1 = 0;
  }
  const int r1_min = std::max(out.p1 + 3, first_r1);
  out.r1 = r1_min + static_cast<int>(rng.below(static_cast<std::uint32_t>(l - 4 - r1_min + 1)));
  out.p3 = out.r1 + 3 + static_cast<int>(rng.below(static_cast<std::uint32_t>(l - 1 - (out.r1 + 3) + 1)));
  out.top = static_cast<int>(rng.below(static_cast<std::uint32_t>(q)));

  // Constant of every ordered plane; -1 marks a disordered plane.
  std::vector<int> level(static_cast<std::size_t>(l + 2), -1);
  int c1;
  if (out.variant == PlantedVariant::e_single) c1 = rng.coin() ? q - 1 : 0;
  else if (out.variant == PlantedVariant::e_double) c1 = 3 + static_cast<int>(rng.below(static_cast<std::uint32_t>(q - 6)));
  else c1 = static_cast<int>(rng.below(static_cast<std::uint32_t>(q)));
  for (int z = out.p1 + 1; z <= out.r1; ++z) level[z] = c1;
  if (out.variant == PlantedVariant::e_double) level[1] = -1;
  for (int z = out.p3 + 1; z <= l + 1; ++z) level[z] = out.top;

  SpinConfig c = make_config(spec, out.top);
  for (int z = 1; z <= l; ++z) {
    if (level[z] >= 0) {
      for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) c.set(x, y, z, level[z] + static_cast<int>(rng.below(2)));
      continue;
    }
    std::vector<char> done(static_cast<std::size_t>(n) * n, 0);
    if (out.variant == PlantedVariant::e_double && z == 1)
      for (int y = 0; y < n; y += 2)
        for (int x = 0; x < n; x += 2) {
          c.set(x, y, z, q - 1 + static_cast<int>(rng.below(3)));
          done[static_cast<std::size_t>(y) * n + x] = 1;
        }
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        if (done[static_cast<std::size_t>(y) * n + x]) continue;
        std::vector<int> avoid{c.at(x, y, z - 1)};
        const int nb[4][2] = {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
        for (const auto& p : nb) {
          const int xx = wrap(p[0], n), yy = wrap(p[1], n);
          if (done[static_cast<std::size_t>(yy) * n + xx]) avoid.push_back(c.at(xx, yy, z));
        }
        if (level[z + 1] >= 0) {
          avoid.push_back(level[z + 1]);
          avoid.push_back(level[z + 1] + 1);
        }
        c.set(x, y, z, detail::pick_far(rng, q, avoid));
        done[static_cast<std::size_t>(y) * n + x] = 1;
      }
  }
  out.config = std::move(c);
  return out;
}

}  // namespace clocklab
