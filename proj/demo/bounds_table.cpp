// Log upper/lower bounds for one representative defect per boundary case,
// then a(q) and the glued a(q) over a range of q.
#include <cmath>
#include <cstdio>
#include <iostream>

#include "clocklab/clocklab.hpp"

using namespace clocklab;

int main() {
  const BoundParams p{64, 1.5};
  for (auto c : {BoundCase::od, BoundCase::oo, BoundCase::dd, BoundCase::ddb, BoundCase::glued}) {
    std::printf("%s:", case_name(c).c_str());
    for (const auto& v : evaluate_bounds(c, representative_stats(c, 4), p))
      if (v.name == "log_ratio_bound" || v.name == "ratio_exponent") std::printf(" %s=%.4g", v.name.c_str(), v.value);
    std::printf("\n");
  }

  std::printf("\n%6s %10s %10s\n", "q", "a(q)", "glued a");
  for (int q : {32, 64, 256, 1024, 4096}) std::printf("%6d %10.4f %10.4f\n", q, a_of_q(q, kDefaultAlphaPrime), glued_a(q));
  std::cout << "glued a(q) < 1 from q = " << glued_a_threshold() << '\n';
}
