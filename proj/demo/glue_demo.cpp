// Plants a configuration with one problematic pair per column, finds the pair
// through the defect pipeline and applies the gluing map to it.
#include <cstdio>

#include "clocklab/clocklab.hpp"

using namespace clocklab;

int main() {
  const LatticeSpec spec{4, 12, 64};
  SplitMix rng(3);
  const auto pl = plant_pair(spec, rng, PlantedVariant::problematic);
  std::printf("planted disordered/ordered breaks at planes %d, %d, %d\n", pl.p1, pl.r1, pl.p3);

  const auto d = extract_interface(pl.config);
  const auto cd = extract_and_extend_defects(pl.config, d, assign_to_columns(d), 1, 2);
  std::printf("column (1,2) blobs: %s\n", blob_string(cd.blobs).c_str());
  for (const auto& r : cd.defects)
    std::printf("  defect cubes %d..%d sign %+d %s\n", r.lo, r.hi, r.sign, class_name(r.kind));

  const auto pairing = pair_defects(cd.defects);
  for (const auto& p : pairing.pairs) {
    if (!p.problematic) continue;
    const auto res = glue_pair(pl.config, cd.defects[static_cast<std::size_t>(p.first)], cd.defects[static_cast<std::size_t>(p.second)]);
    std::printf("glue slab planes %d..%d, rotation %d\n", res.plan.lo, res.plan.hi, res.plan.shift);
    std::printf("H before %ld, after %ld, gain %ld (floor %d)\n", total_energy(pl.config), total_energy(res.config), res.energy_gain,
                -spec.n * spec.n / 4);
    std::printf("inverse restores the input: %s\n", invert_glue(res.config, res.plan) == pl.config ? "yes" : "no");
  }
}
