// Runs short chains across beta on a small box and prints how the interface
// settles, then the height map of the last state (. marks walls).
#include <cstdio>

#include "clocklab/clocklab.hpp"

using namespace clocklab;

int main() {
  const LatticeSpec spec{8, 8, 64};
  std::printf("%5s %8s %8s %8s %6s\n", "beta", "ordered", "rigid", "weight", "ifaces");
  SpinConfig last = make_config(spec, 0);
  for (double beta : {0.8, 1.2, 1.4, 1.8}) {
    double ord = 0, rig = 0, w = 0, comp = 0;
    const auto rep = run_chain(spec, {beta, 1200, 400, 7, 20}, {}, [&](const SpinConfig& c, const ChainSample&) { last = c; });
    for (const auto& s : rep.samples) {
      ord += s.ordered_fraction;
      rig += s.rigidity_fraction;
      w += static_cast<double>(s.weight);
      comp += static_cast<double>(s.interface_components);
    }
    const double k = static_cast<double>(rep.samples.size());
    std::printf("%5.2f %8.4f %8.4f %8.2f %6.2f\n", beta, ord / k, rig / k, w / k, comp / k);
  }

  const auto d = extract_interface(last);
  const auto cw = ceilings_walls_heights(spec, d.surface);
  std::printf("\nheights at beta=1.8:\n");
  for (int y = 0; y < spec.n; ++y) {
    for (int x = 0; x < spec.n; ++x) {
      const auto& h = cw.heights.at(x, y);
      std::printf(" %c", h ? static_cast<char>('0' + *h % 10) : '.');
    }
    std::printf("\n");
  }
}
