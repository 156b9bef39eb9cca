#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace clocklab {

struct InvalidSpec : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

using Spin = std::uint16_t;

// Torus width n (even), free layers l, spin states q.
// Sites live on z in [0, l+1]; z = 0 and z = l+1 are frozen.
struct LatticeSpec {
  int n = 2;
  int l = 1;
  int q = 12;

  void validate() const {
    if (n <= 0 || n % 2 != 0) throw InvalidSpec("torus width must be even and positive, got " + std::to_string(n));
    if (l <= 0) throw InvalidSpec("layer count must be positive, got " + std::to_string(l));
    if (q < 2) throw InvalidSpec("q must be at least 2, got " + std::to_string(q));
    if (q > 65536) throw InvalidSpec("q above 2^16 is not supported");
  }

  // The 2x2 bottom tiling has every horizontal bond disordered only from q = 12 on.
  bool strongly_disordered() const { return q >= 12; }
  void validate_order_disorder() const {
    validate();
    if (!strongly_disordered()) throw InvalidSpec("q must be at least 12, got " + std::to_string(q));
  }

  int layers() const { return l + 2; }
  long sites() const { return static_cast<long>(n) * n * layers(); }
  long free_sites() const { return static_cast<long>(n) * n * l; }
  long bond_count() const { return static_cast<long>(3 * l + 5) * n * n; }

  friend bool operator==(const LatticeSpec&, const LatticeSpec&) = default;
};

enum class Axis : std::uint8_t { x = 0, y = 1, z = 2 };

struct Site {
  int x = 0, y = 0, z = 0;
  friend bool operator==(const Site&, const Site&) = default;
};

// Bond from `from` one step along `axis`, wrapping in x and y.
struct Bond {
  Site from;
  Axis axis = Axis::x;
  friend bool operator==(const Bond&, const Bond&) = default;
};

enum class BondState : std::uint8_t { ordered = 0, disordered = 1 };

inline int circular_distance(int a, int b, int q) {
  if (q < 1) throw InvalidSpec("q must be positive, got " + std::to_string(q));
  int d = (a - b) % q;
  if (d < 0) d += q;
  return d < q - d ? d : q - d;
}

inline bool is_ordered(int a, int b, int q) { return circular_distance(a, b, q) <= 1; }

inline int wrap(int v, int n) {
  v %= n;
  return v < 0 ? v + n : v;
}

inline Site step(const Site& s, Axis a, int n) {
  switch (a) {
    case Axis::x: return {wrap(s.x + 1, n), s.y, s.z};
    case Axis::y: return {s.x, wrap(s.y + 1, n), s.z};
    default: return {s.x, s.y, s.z + 1};
  }
}

inline Site endpoint(const Bond& b, int n) { return step(b.from, b.axis, n); }

// s_00, s_01, s_10, s_11 of the 2x2 bottom tiling, indexed by 2*(x&1) + (y&1).
inline std::array<Spin, 4> disordered_tile(int q) {
  return {Spin(0), Spin(q / 4), Spin((3 * q) / 4), Spin(q / 2)};
}

inline Spin disordered_value(int x, int y, int q) { return disordered_tile(q)[2 * (x & 1) + (y & 1)]; }

struct BoundaryLayers {
  std::vector<Spin> bottom;  // row-major, index y*n + x
  std::vector<Spin> top;
};

// Same tiling without the q >= 12 requirement; small-q oracles use it.
inline BoundaryLayers tiled_boundary(const LatticeSpec& spec, int s) {
  spec.validate();
  BoundaryLayers out;
  const auto nn = static_cast<std::size_t>(spec.n) * spec.n;
  out.bottom.resize(nn);
  out.top.assign(nn, static_cast<Spin>(wrap(s, spec.q)));
  for (int y = 0; y < spec.n; ++y)
    for (int x = 0; x < spec.n; ++x) out.bottom[static_cast<std::size_t>(y) * spec.n + x] = disordered_value(x, y, spec.q);
  return out;
}

inline BoundaryLayers build_boundary(const LatticeSpec& spec, int s) {
  spec.validate_order_disorder();
  return tiled_boundary(spec, s);
}

class SpinConfig {
 public:
  SpinConfig() = default;
  explicit SpinConfig(const LatticeSpec& spec, Spin fill = 0)
      : spec_(spec), spins_(static_cast<std::size_t>(spec.sites()), fill) {}

  const LatticeSpec& spec() const { return spec_; }

  std::size_t index(int x, int y, int z) const {
    return (static_cast<std::size_t>(z) * spec_.n + static_cast<std::size_t>(y)) * spec_.n + static_cast<std::size_t>(x);
  }
  std::size_t index(const Site& s) const { return index(s.x, s.y, s.z); }

  Spin at(int x, int y, int z) const { return spins_[index(wrap(x, spec_.n), wrap(y, spec_.n), z)]; }
  Spin at(const Site& s) const { return at(s.x, s.y, s.z); }
  void set(int x, int y, int z, int v) { spins_[index(wrap(x, spec_.n), wrap(y, spec_.n), z)] = static_cast<Spin>(wrap(v, spec_.q)); }
  void set(const Site& s, int v) { set(s.x, s.y, s.z, v); }

  std::vector<Spin>& raw() { return spins_; }
  const std::vector<Spin>& raw() const { return spins_; }

  std::vector<Spin> layer(int z) const {
    const auto nn = static_cast<std::ptrdiff_t>(spec_.n) * spec_.n;
    auto first = spins_.begin() + static_cast<std::ptrdiff_t>(z) * nn;
    return {first, first + nn};
  }

  void apply_boundary(const BoundaryLayers& b) {
    const auto nn = b.bottom.size();
    std::copy(b.bottom.begin(), b.bottom.end(), spins_.begin());
    std::copy(b.top.begin(), b.top.end(), spins_.begin() + static_cast<std::ptrdiff_t>(nn) * (spec_.l + 1));
  }

  bool ordered(const Bond& b) const { return is_ordered(at(b.from), at(endpoint(b, spec_.n)), spec_.q); }

  friend bool operator==(const SpinConfig&, const SpinConfig&) = default;

 private:
  LatticeSpec spec_;
  std::vector<Spin> spins_;
};

// Order-disorder configuration: strongly disordered bottom, top and interior constant s.
inline SpinConfig make_config(const LatticeSpec& spec, int s) {
  auto b = spec.strongly_disordered() ? build_boundary(spec, s) : tiled_boundary(spec, s);
  SpinConfig c(spec, static_cast<Spin>(wrap(s, spec.q)));
  c.apply_boundary(b);
  return c;
}

template <class F>
void for_each_bond(const LatticeSpec& spec, F&& f) {
  for (int z = 0; z <= spec.l + 1; ++z)
    for (int y = 0; y < spec.n; ++y)
      for (int x = 0; x < spec.n; ++x) {
        f(Bond{{x, y, z}, Axis::x});
        f(Bond{{x, y, z}, Axis::y});
        if (z <= spec.l) f(Bond{{x, y, z}, Axis::z});
      }
}

// Bond states in for_each_bond order.
struct BondMap {
  LatticeSpec spec;
  std::vector<BondState> states;

  std::size_t slot(const Bond& b) const {
    const auto nn = static_cast<std::size_t>(spec.n) * spec.n;
    const auto base = static_cast<std::size_t>(b.from.z) * 3 * nn;
    const auto cell = static_cast<std::size_t>(b.from.y) * spec.n + b.from.x;
    if (b.from.z <= spec.l) return base + cell * 3 + static_cast<std::size_t>(b.axis);
    return base + cell * 2 + static_cast<std::size_t>(b.axis);
  }
  BondState operator[](const Bond& b) const { return states[slot(b)]; }
  long count(BondState s) const {
    long c = 0;
    for (auto v : states) c += (v == s);
    return c;
  }
};

inline BondMap classify_bonds(const SpinConfig& c) {
  BondMap m{c.spec(), {}};
  m.states.reserve(static_cast<std::size_t>(c.spec().bond_count()));
  for_each_bond(c.spec(), [&](const Bond& b) {
    m.states.push_back(c.ordered(b) ? BondState::ordered : BondState::disordered);
  });
  return m;
}

inline long ordered_bond_count(const SpinConfig& c) {
  long k = 0;
  for_each_bond(c.spec(), [&](const Bond& b) { k += c.ordered(b); });
  return k;
}

inline long total_energy(const SpinConfig& c) { return -ordered_bond_count(c); }

// Number of ordered bonds incident to (x,y,z) if that site held value v.
inline int ordered_neighbours(const SpinConfig& c, int x, int y, int z, int v) {
  const int q = c.spec().q;
  int k = is_ordered(v, c.at(x + 1, y, z), q) + is_ordered(v, c.at(x - 1, y, z), q) +
          is_ordered(v, c.at(x, y + 1, z), q) + is_ordered(v, c.at(x, y - 1, z), q);
  if (z > 0) k += is_ordered(v, c.at(x, y, z - 1), q);
  if (z < c.spec().l + 1) k += is_ordered(v, c.at(x, y, z + 1), q);
  return k;
}

// Energy change of setting one site to v.
inline int local_energy_delta(const SpinConfig& c, const Site& s, int v) {
  return ordered_neighbours(c, s.x, s.y, s.z, c.at(s)) - ordered_neighbours(c, s.x, s.y, s.z, v);
}

struct Fraction {
  long num = 0;
  long den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Fraction& a, const Fraction& b) { return a.num * b.den == b.num * a.den; }
};

inline Fraction ordered_fraction(const SpinConfig& c) { return {ordered_bond_count(c), c.spec().bond_count()}; }

inline bool boundaries_match(const SpinConfig& a, const SpinConfig& b) {
  const int top = a.spec().l + 1;
  return a.layer(0) == b.layer(0) && a.layer(top) == b.layer(top);
}

}  // namespace clocklab
