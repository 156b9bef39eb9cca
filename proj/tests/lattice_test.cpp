#include <gtest/gtest.h>

#include <sstream>

#include "clocklab/lattice.hpp"
#include "clocklab/rng.hpp"
#include "clocklab/snapshot.hpp"

using namespace clocklab;

namespace {

// Independent recount: walk every site and its +x, +y, +z neighbour with its
// own modular arithmetic.
long naive_ordered(const SpinConfig& c) {
  const auto& s = c.spec();
  long k = 0;
  auto close = [&](int a, int b) {
    int d = std::abs(a - b);
    return std::min(d, s.q - d) <= 1;
  };
  for (int z = 0; z <= s.l + 1; ++z)
    for (int y = 0; y < s.n; ++y)
      for (int x = 0; x < s.n; ++x) {
        const int v = c.raw()[(static_cast<std::size_t>(z) * s.n + y) * s.n + x];
        const int vx = c.raw()[(static_cast<std::size_t>(z) * s.n + y) * s.n + (x + 1) % s.n];
        const int vy = c.raw()[(static_cast<std::size_t>(z) * s.n + (y + 1) % s.n) * s.n + x];
        k += close(v, vx) + close(v, vy);
        if (z <= s.l) k += close(v, c.raw()[(static_cast<std::size_t>(z + 1) * s.n + y) * s.n + x]);
      }
  return k;
}

SpinConfig random_config(const LatticeSpec& spec, std::uint64_t seed) {
  SplitMix rng(seed);
  SpinConfig c = make_config(spec, 0);
  for (int z = 1; z <= spec.l; ++z)
    for (int y = 0; y < spec.n; ++y)
      for (int x = 0; x < spec.n; ++x) c.set(x, y, z, static_cast<int>(rng.below(static_cast<std::uint32_t>(spec.q))));
  return c;
}

}  // namespace

TEST(CircularDistance, Examples) {
  EXPECT_EQ(circular_distance(0, 0, 64), 0);
  EXPECT_EQ(circular_distance(0, 63, 64), 1);
  EXPECT_EQ(circular_distance(0, 32, 64), 32);
  EXPECT_THROW(circular_distance(0, 0, 0), InvalidSpec);
}

TEST(CircularDistance, SymmetricAndTriangle) {
  for (int q : {2, 3, 5, 12, 17}) {
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b) {
        EXPECT_EQ(circular_distance(a, b, q), circular_distance(b, a, q));
        EXPECT_EQ(circular_distance(a, b, q) == 0, a == b);
        EXPECT_LE(circular_distance(a, b, q), q / 2);
        for (int c = 0; c < q; ++c)
          EXPECT_LE(circular_distance(a, c, q), circular_distance(a, b, q) + circular_distance(b, c, q));
      }
  }
}

TEST(Spec, Validation) {
  EXPECT_THROW((LatticeSpec{3, 1, 12}.validate()), InvalidSpec);
  EXPECT_THROW((LatticeSpec{2, 0, 12}.validate()), InvalidSpec);
  EXPECT_THROW((LatticeSpec{2, 1, 11}.validate_order_disorder()), InvalidSpec);
  EXPECT_NO_THROW((LatticeSpec{2, 1, 12}.validate_order_disorder()));
  EXPECT_EQ((LatticeSpec{2, 1, 12}.bond_count()), 32);
}

TEST(Boundary, TileValues) {
  EXPECT_EQ(disordered_tile(64), (std::array<Spin, 4>{0, 16, 48, 32}));
  EXPECT_EQ(disordered_tile(12), (std::array<Spin, 4>{0, 3, 9, 6}));
  EXPECT_THROW(build_boundary({3, 1, 64}, 0), InvalidSpec);
  EXPECT_THROW(build_boundary({2, 1, 11}, 0), InvalidSpec);
}

TEST(Boundary, TileIndexing) {
  const LatticeSpec spec{4, 1, 64};
  const auto b = build_boundary(spec, 5);
  // s_ab sits at (x, y) = (a + 2i, b + 2j); bottom is indexed y*n + x.
  EXPECT_EQ(b.bottom[0 * 4 + 1], 48);
  EXPECT_EQ(b.bottom[1 * 4 + 0], 16);
  EXPECT_EQ(b.bottom[3 * 4 + 3], 32);
  EXPECT_EQ(b.bottom[2 * 4 + 2], 0);
  EXPECT_EQ(b.top, std::vector<Spin>(16, 5));
}

TEST(Boundary, BottomDisorderedTopOrderedForAllQ) {
  for (int q = 12; q <= 128; ++q) {
    for (int n : {2, 4, 6}) {
      const LatticeSpec spec{n, 1, q};
      const auto c = make_config(spec, 5);
      for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
          EXPECT_FALSE(c.ordered(Bond{{x, y, 0}, Axis::x})) << q;
          EXPECT_FALSE(c.ordered(Bond{{x, y, 0}, Axis::y})) << q;
          EXPECT_TRUE(c.ordered(Bond{{x, y, 2}, Axis::x}));
          EXPECT_TRUE(c.ordered(Bond{{x, y, 2}, Axis::y}));
        }
    }
  }
  int min_gap = 64;
  const auto t = disordered_tile(12);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) min_gap = std::min(min_gap, circular_distance(t[i], t[j], 12));
  EXPECT_EQ(min_gap, 3);
}

TEST(Energy, ConstantConfiguration) {
  SpinConfig c({2, 1, 64}, 7);
  EXPECT_EQ(total_energy(c), -32);
  EXPECT_EQ(ordered_fraction(c), (Fraction{1, 1}));
}

TEST(Energy, BottomLayerContributesNothing) {
  const LatticeSpec spec{4, 2, 64};
  const auto c = make_config(spec, 0);
  long bottom = 0;
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) bottom += c.ordered(Bond{{x, y, 0}, Axis::x}) + c.ordered(Bond{{x, y, 0}, Axis::y});
  EXPECT_EQ(bottom, 0);
}

TEST(Energy, MatchesNaiveRecount) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto c = random_config({4, 3, 16}, seed);
    EXPECT_EQ(total_energy(c), -naive_ordered(c));
  }
}

TEST(Energy, ExhaustiveSmallSystem) {
  const LatticeSpec spec{2, 1, 4};
  SpinConfig c = make_config(spec, 0);
  for (int code = 0; code < 256; ++code) {
    for (int i = 0; i < 4; ++i) c.raw()[4 + i] = static_cast<Spin>((code >> (2 * i)) & 3);
    const auto m = classify_bonds(c);
    EXPECT_EQ(total_energy(c), -m.count(BondState::ordered));
    EXPECT_EQ(m.count(BondState::ordered) + m.count(BondState::disordered), spec.bond_count());
    EXPECT_EQ(total_energy(c), -naive_ordered(c));
  }
}

TEST(Energy, LocalDeltaMatchesRecount) {
  const LatticeSpec spec{4, 3, 16};
  auto c = random_config(spec, 99);
  SplitMix rng(7);
  for (int trial = 0; trial < 10000; ++trial) {
    const Site s{static_cast<int>(rng.below(4)), static_cast<int>(rng.below(4)), 1 + static_cast<int>(rng.below(3))};
    const int v = static_cast<int>(rng.below(16));
    const long before = total_energy(c);
    const int delta = local_energy_delta(c, s, v);
    c.set(s, v);
    ASSERT_EQ(total_energy(c) - before, delta);
  }
}

TEST(Classify, CheckerboardHorizontalsDisordered) {
  const LatticeSpec spec{4, 2, 16};
  SpinConfig c(spec);
  for (int z = 0; z < spec.layers(); ++z)
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 4; ++x) c.set(x, y, z, ((x + y) & 1) ? 8 : 0);
  const auto m = classify_bonds(c);
  for_each_bond(spec, [&](const Bond& b) {
    if (b.axis != Axis::z) EXPECT_EQ(m[b], BondState::disordered);
    else EXPECT_EQ(m[b], BondState::ordered);
  });
}

TEST(Classify, SingleSiteChangeIsLocal) {
  const LatticeSpec spec{4, 3, 16};
  auto c = random_config(spec, 5);
  const auto before = classify_bonds(c);
  const Site s{2, 1, 2};
  c.set(s, c.at(s) + 7);
  const auto after = classify_bonds(c);
  int changed = 0;
  for_each_bond(spec, [&](const Bond& b) {
    if (before[b] != after[b]) {
      ++changed;
      EXPECT_TRUE(b.from == s || endpoint(b, spec.n) == s);
    }
  });
  EXPECT_LE(changed, 6);
}

TEST(OrderedFraction, BoundaryFixture) {
  const auto c = make_config({2, 1, 64}, 0);
  EXPECT_EQ(ordered_fraction(c), (Fraction{21, 32}));
  EXPECT_EQ(ordered_fraction(c).num, 21);
}

TEST(OrderedFraction, SingleBondStep) {
  // One interior site far from everything; moving it next to a single
  // neighbour orders exactly one more bond.
  const LatticeSpec spec{4, 3, 64};
  SpinConfig c(spec);
  for (int z = 0; z < spec.layers(); ++z)
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 4; ++x) c.set(x, y, z, 8 * ((x + 2 * y + 3 * z) % 8));
  const auto f0 = ordered_fraction(c);
  const Site s{1, 1, 2};
  int target = -1;
  for (int v = 0; v < 64 && target < 0; ++v)
    if (ordered_neighbours(c, s.x, s.y, s.z, v) == ordered_neighbours(c, s.x, s.y, s.z, c.at(s)) + 1) target = v;
  ASSERT_GE(target, 0);
  c.set(s, target);
  const auto f1 = ordered_fraction(c);
  EXPECT_EQ(f1.num - f0.num, 1);
  EXPECT_EQ(f1.den, spec.bond_count());
}

TEST(Snapshot, RoundTrip) {
  const auto c = random_config({4, 3, 16}, 3);
  std::stringstream ss;
  write_snapshot(ss, c);
  EXPECT_EQ(read_snapshot(ss), c);
}

TEST(Snapshot, RejectsBadInput) {
  std::stringstream truncated("2 1 12\n0 3\n9 6\n1 1\n");
  EXPECT_THROW(read_snapshot(truncated), IoError);
  std::stringstream range("2 1 12\n0 3\n9 6\n1 1\n1 1\n0 0\n0 12\n");
  EXPECT_THROW(read_snapshot(range), IoError);
  EXPECT_THROW(load_snapshot("/nonexistent/snapshot.txt"), IoError);
}
