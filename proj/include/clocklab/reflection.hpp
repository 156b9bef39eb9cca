#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "column.hpp"
#include "defects.hpp"
#include "sampler.hpp"

namespace clocklab {

using Rational = boost::rational<long long>;

// A defect column ready for reflection: the core cubes plus the kinds of the
// two ends. bottom == boundary means the core starts on the fixed disordered
// plane z = 0 and there is no bottom end cube.
struct DefectPattern {
  ColumnPattern core;
  EndKind bottom = EndKind::disordered;
  EndKind top = EndKind::ordered;

  int l_slab() const { return core.height; }
  bool boundary() const { return bottom == EndKind::boundary; }
  int d() const {
    const int t = top == EndKind::disordered;
    return boundary() ? 1 + t : (bottom == EndKind::disordered) + t;
  }

  // Every cube of the slab, pure end cubes included.
  ColumnPattern full() const {
    const int l = core.height;
    const int off = boundary() ? 0 : 1;
    ColumnPattern f(l + off + 1);
    auto fill_cube = [&](int k, BondState s) {
      for (int j = 0; j < 4; ++j) f.bonds[ColumnPattern::vertical(k, j)] = s;
    };
    auto fill_plane = [&](int k, BondState s) {
      for (int j = 0; j < 4; ++j) f.bonds[ColumnPattern::horizontal(k, j)] = s;
    };
    if (!boundary()) {
      const auto s = bottom == EndKind::ordered ? BondState::ordered : BondState::disordered;
      fill_plane(0, s);
      fill_cube(0, s);
    }
    for (int k = 0; k <= l; ++k)
      for (int j = 0; j < 4; ++j) {
        f.bonds[ColumnPattern::horizontal(k + off, j)] = core.h(k, j);
        if (k < l) f.bonds[ColumnPattern::vertical(k + off, j)] = core.v(k, j);
      }
    const auto s = top == EndKind::ordered ? BondState::ordered : BondState::disordered;
    fill_cube(f.height - 1, s);
    fill_plane(f.height, s);
    return f;
  }
};

inline std::string bc_name(const DefectPattern& p) {
  auto c = [](EndKind k) { return k == EndKind::ordered ? 'O' : k == EndKind::disordered ? 'D' : 'B'; };
  return std::string{c(p.bottom), c(p.top)};
}

// FNV-1a over the ends and the core bits.
inline std::string pattern_hash(const DefectPattern& p) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](unsigned char b) {
    h ^= b;
    h *= 1099511628211ull;
  };
  mix(static_cast<unsigned char>(p.bottom));
  mix(static_cast<unsigned char>(p.top));
  mix(static_cast<unsigned char>(p.l_slab()));
  for (auto b : p.core.bonds) mix(static_cast<unsigned char>(b));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Bond states of a whole slab on the N x N torus, sites on planes 0..planes.
// Planes 0 and `planes` carry the boundary condition; their horizontal bonds
// are stored but are not inner bonds.
struct SlabField {
  int n = 0;
  int planes = 0;
  bool boundary = false;
  int d = 0;
  std::vector<BondState> hx, hy, vz;

  SlabField() = default;
  SlabField(int n_, int planes_, bool boundary_, int d_)
      : n(n_), planes(planes_), boundary(boundary_), d(d_),
        hx(static_cast<std::size_t>((planes_ + 1) * n_ * n_)),
        hy(hx.size()),
        vz(static_cast<std::size_t>(planes_ * n_ * n_)) {}

  std::size_t site(int x, int y, int k) const { return static_cast<std::size_t>((k * n + y) * n + x); }
  int sites() const { return (planes + 1) * n * n; }
  int interior_planes() const { return planes - 1; }
  long n2() const { return static_cast<long>(n) * n; }
  bool ordered_x(int x, int y, int k) const { return hx[site(x, y, k)] == BondState::ordered; }
  bool ordered_y(int x, int y, int k) const { return hy[site(x, y, k)] == BondState::ordered; }
  bool ordered_z(int x, int y, int k) const { return vz[site(x, y, k)] == BondState::ordered; }

  friend bool operator==(const SlabField&, const SlabField&) = default;
};

// Fill the torus with reflections of one column through lines of sites. The
// column's x-bonds at y=0 and y=1 land on even and odd rows, its y-bonds on
// even and odd x, its verticals on the four parity classes.
inline SlabField reflect_pattern(const ColumnPattern& full, int n, bool boundary, int d) {
  if (n < 2 || n % 2) throw InvalidParams("reflection needs an even N >= 2, got " + std::to_string(n));
  SlabField f(n, full.height, boundary, d);
  for (int k = 0; k <= full.height; ++k)
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        const auto i = f.site(x, y, k);
        f.hx[i] = full.h(k, y & 1);
        f.hy[i] = full.h(k, 2 + (x & 1));
        if (k < full.height) f.vz[i] = full.v(k, (x & 1) + 2 * (y & 1));
      }
  return f;
}

inline SlabField reflect_pattern(const DefectPattern& p, int n) { return reflect_pattern(p.full(), n, p.boundary(), p.d()); }

struct OrderedComponent {
  long sites = 0;
  long bonds = 0;
  long boundary = 0;    // disordered inner bonds touching the component
  long boundary2 = 0;   // ... with both endpoints in it
  long frustrated = 0;  // frustrated cubes holding one of its bonds
  bool vertical = true;
  bool touches_ends = false;
  bool segment() const { return vertical && !touches_ends; }
};

struct DefectStats {
  long n2 = 0;
  int n = 0;
  int l = 0;  // interior planes
  int d = 0;
  bool boundary = false;
  long m_total = 0;  // frustrated cubes in the slab, m N^2 for reflected fields
  long D = 0, K = 0, Q = 0, Db = 0;
  long inner_bonds = 0;
  long sum_boundary = 0, sum_boundary2 = 0;
  long free_components = 0;  // neither segments nor attached to an end plane
  bool ends_connected = false;
  std::vector<OrderedComponent> components;

  Rational m() const { return Rational(m_total, n2); }
};

inline DefectStats defect_stats(const SlabField& f) {
  const int n = f.n, T = f.planes;
  DefectStats s;
  s.n = n;
  s.n2 = f.n2();
  s.l = f.interior_planes();
  s.d = f.d;
  s.boundary = f.boundary;
  s.inner_bonds = (3L * s.l + 1) * s.n2;

  const auto ns = static_cast<std::size_t>(f.sites());
  std::vector<std::size_t> parent(ns);
  for (std::size_t i = 0; i < ns; ++i) parent[i] = i;
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  std::vector<char> member(ns, 0);
  struct B {
    std::size_t u, v;
    bool ordered, vertical;
  };
  std::vector<B> inner;
  inner.reserve(static_cast<std::size_t>(s.inner_bonds));
  for (int k = 0; k <= T; ++k)
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        const auto u = f.site(x, y, k);
        if (k > 0 && k < T) {
          inner.push_back({u, f.site((x + 1) % n, y, k), f.ordered_x(x, y, k), false});
          inner.push_back({u, f.site(x, (y + 1) % n, k), f.ordered_y(x, y, k), false});
        }
        if (k < T) inner.push_back({u, f.site(x, y, k + 1), f.ordered_z(x, y, k), true});
      }
  for (const auto& b : inner) {
    if (!b.ordered) {
      ++s.D;
      continue;
    }
    member[b.u] = member[b.v] = 1;
    const auto a = find(b.u), c = find(b.v);
    if (a != c) parent[std::max(a, c)] = std::min(a, c);
  }

  std::vector<long> slot(ns, -1);
  for (std::size_t i = 0; i < ns; ++i) {
    if (!member[i]) continue;
    const auto r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<long>(s.components.size());
      s.components.emplace_back();
    }
    auto& c = s.components[static_cast<std::size_t>(slot[r])];
    ++c.sites;
    const auto k = static_cast<int>(i / static_cast<std::size_t>(s.n2));
    c.touches_ends |= k == 0 || k == T;
  }
  auto comp = [&](std::size_t site) -> OrderedComponent* {
    return member[site] ? &s.components[static_cast<std::size_t>(slot[find(site)])] : nullptr;
  };
  for (const auto& b : inner) {
    auto* cu = comp(b.u);
    auto* cv = comp(b.v);
    if (b.ordered) {
      ++cu->bonds;
      cu->vertical &= b.vertical;
      continue;
    }
    if (cu) ++cu->boundary;
    if (cv && cv != cu) ++cv->boundary;
    if (cu && cu == cv) ++cu->boundary2;
  }

  for (int k = 1; k < T; ++k)
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        const bool chaotic = !f.ordered_x(x, y, k) && !f.ordered_y(x, y, k) && !f.ordered_x((x + n - 1) % n, y, k) &&
                             !f.ordered_y(x, (y + n - 1) % n, k) && !f.ordered_z(x, y, k) && !f.ordered_z(x, y, k - 1);
        s.K += chaotic;
      }
  if (f.boundary)
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) s.Db += !f.ordered_z(x, y, 0);

  // Frustrated cubes and the components whose bonds they hold. A cube's
  // bonds on an end plane are not inner and belong to no component.
  for (int k = 0; k < T; ++k)
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        const int x1 = (x + 1) % n, y1 = (y + 1) % n;
        struct E {
          bool ordered;
          std::size_t u;
          bool inner;
        };
        const std::array<E, 12> e{{
            {f.ordered_x(x, y, k), f.site(x, y, k), k > 0},
            {f.ordered_x(x, y1, k), f.site(x, y1, k), k > 0},
            {f.ordered_y(x, y, k), f.site(x, y, k), k > 0},
            {f.ordered_y(x1, y, k), f.site(x1, y, k), k > 0},
            {f.ordered_x(x, y, k + 1), f.site(x, y, k + 1), k + 1 < T},
            {f.ordered_x(x, y1, k + 1), f.site(x, y1, k + 1), k + 1 < T},
            {f.ordered_y(x, y, k + 1), f.site(x, y, k + 1), k + 1 < T},
            {f.ordered_y(x1, y, k + 1), f.site(x1, y, k + 1), k + 1 < T},
            {f.ordered_z(x, y, k), f.site(x, y, k), true},
            {f.ordered_z(x1, y, k), f.site(x1, y, k), true},
            {f.ordered_z(x, y1, k), f.site(x, y1, k), true},
            {f.ordered_z(x1, y1, k), f.site(x1, y1, k), true},
        }};
        int o = 0;
        for (const auto& b : e) o += b.ordered;
        if (o == 0 || o == 12) continue;
        ++s.m_total;
        std::array<OrderedComponent*, 12> seen{};
        int ns_ = 0;
        for (const auto& b : e) {
          if (!b.ordered || !b.inner) continue;
          auto* c = comp(b.u);
          if (std::find(seen.begin(), seen.begin() + ns_, c) == seen.begin() + ns_) seen[static_cast<std::size_t>(ns_++)] = c;
        }
        for (int i = 0; i < ns_; ++i) ++seen[static_cast<std::size_t>(i)]->frustrated;
      }

  for (const auto& c : s.components) {
    s.Q += c.segment();
    s.free_components += !c.segment() && !c.touches_ends;
    s.sum_boundary += c.boundary;
    s.sum_boundary2 += c.boundary2;
  }
  // Do the two end planes share an ordered component?
  std::vector<char> bottom(ns, 0);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      const auto i = f.site(x, y, 0);
      if (member[i]) bottom[find(i)] = 1;
    }
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      const auto i = f.site(x, y, T);
      if (member[i] && bottom[find(i)]) s.ends_connected = true;
    }
  return s;
}

inline DefectStats defect_stats(const DefectPattern& p, int n) { return defect_stats(reflect_pattern(p, n)); }

// Count of disordered-bond endpoints that sit on the two end planes, read
// from the end kinds: dN^2 in the bulk, D^b plus the top layer at the bottom.
inline long end_term(const DefectStats& s) {
  if (!s.boundary) return s.d * s.n2;
  return s.Db + (s.d == 2 ? s.n2 : 0);
}

struct IdentityResult {
  std::string name;
  long lhs = 0, rhs = 0;
  long residual() const { return lhs - rhs; }
  bool holds() const { return residual() == 0; }
};

// 2D = 6K + (end term) + sum |dX_j| + sum |d2X_j|.
inline IdentityResult check_identity(const DefectStats& s) {
  return {s.boundary ? "identity_boundary" : "identity_bulk", 2 * s.D, 6 * s.K + end_term(s) + s.sum_boundary + s.sum_boundary2};
}

struct InequalityResult {
  std::string name;
  Rational lhs, rhs;
  long n2 = 1;
  bool exact_check = false;  // equality characterisation rather than >=
  bool ok = true;
  Rational margin() const { return (lhs - rhs) / Rational(n2); }
  bool holds() const { return exact_check ? ok : lhs >= rhs; }
};

// Fully disordered vertical face of a core cube. Horizontal faces between two
// frustrated cubes never carry interface plaquettes, so only these and the
// faces against a disordered end can hold a blob.
inline bool disordered_side_face(const ColumnPattern& f, int from_cube, int to_cube) {
  // Vertical faces of a cube: the horizontal bond below and the two corners.
  static constexpr std::array<std::array<int, 3>, 4> faces{{{0, 0, 1}, {1, 2, 3}, {2, 0, 2}, {3, 1, 3}}};
  for (int k = from_cube; k < to_cube; ++k)
    for (const auto& fc : faces)
      if (!f.h_ordered(k, fc[0]) && !f.h_ordered(k + 1, fc[0]) && !f.v_ordered(k, fc[1]) && !f.v_ordered(k, fc[2]))
        return true;
  return false;
}

inline bool has_blob_plaquette(const DefectPattern& p) {
  if (p.boundary() || p.d() > 0) return true;
  return disordered_side_face(p.core, 0, p.core.height);
}

// Problematic: bulk, every bond outside the two end cubes disordered.
// e-problematic: bottom-attached, top ordered, one or two frustrated cubes,
// at least three disordered verticals in the first cube and no disordered
// side face, so the bottom plaquette is the whole blob.
inline int frustrated_count(const ColumnPattern& f) {
  int m = 0;
  for (int k = 0; k < f.height; ++k) m += f.frustrated(k);
  return m;
}

inline DefectClass classify_pattern(const DefectPattern& p) {
  const auto& c = p.core;
  if (!p.boundary()) {
    for (int k = 0; k < c.height; ++k)
      for (int j = 0; j < 4; ++j)
        if (c.v_ordered(k, j) || (k > 0 && c.h_ordered(k, j))) return DefectClass::non_problematic;
    return DefectClass::problematic;
  }
  if (p.top != EndKind::ordered) return DefectClass::non_problematic;
  const auto f = p.full();
  const int m = frustrated_count(f);
  if (m < 1 || m > 2) return DefectClass::non_problematic;
  int dis = 0;
  for (int j = 0; j < 4; ++j) dis += !c.v_ordered(0, j);
  if (dis < 3 || disordered_side_face(c, 0, c.height)) return DefectClass::non_problematic;
  return DefectClass::e_problematic;
}

inline std::vector<InequalityResult> check_inequalities(const DefectStats& s, DefectClass cls) {
  std::vector<InequalityResult> out;
  const long N2 = s.n2;
  const Rational D(s.D), K(s.K), Q(s.Q), M(s.m_total), L(s.l), n2(N2);
  const bool flagged = cls != DefectClass::non_problematic;
  auto add = [&](std::string name, Rational lhs, Rational rhs) { out.push_back({std::move(name), lhs, rhs, N2}); };

  add("components", 2 * D - 6 * K - 6 * Q, Rational(end_term(s)) + M / 2 + 2 * Q);
  add("height", 2 * M, L * n2);

  const bool low_d = s.boundary ? s.d == 1 : s.d <= 1;
  if (low_d && !flagged) {
    const Rational slack = M >= 3 * n2 ? M / 6 : n2 / 2;
    add("slack_d01", 2 * D - 6 * (K + Q), 2 * n2 + slack);
  }
  if (!s.boundary && s.d <= 1 && M <= 2 * n2) {
    InequalityResult r{"equality_d01", 2 * D - 6 * (K + Q), 2 * n2, N2, true};
    r.ok = r.lhs >= r.rhs && ((r.lhs == r.rhs) == (cls == DefectClass::problematic));
    out.push_back(r);
  }
  if (!s.boundary && s.d == 2 && !flagged) {
    const Rational slack = M == n2 ? Rational(3, 4) * n2 : n2 / (2 * L);
    add("bulk_dd", 2 * D - 2 * (3 * L - 1) / L * (K + Q), 4 * n2 + slack);
  }
  if (s.boundary && s.d == 2) {
    const Rational slack = M == n2 ? Rational(5, 8) * n2 : Rational(3, 8) * n2 / L;
    add("boundary_dd", 2 * D - 6 * (L - Rational(1, 4)) / L * (K + Q), Rational(7, 2) * n2 + slack);
  }
  return out;
}

// ---- admissibility and enumeration ----

inline constexpr int kExhaustiveCap = 3;

// Column graph: corner sites of the full column joined by ordered bonds.
inline bool bottom_corners_connected(const ColumnPattern& f) {
  const int sites = 4 * (f.height + 1);
  std::vector<int> parent(static_cast<std::size_t>(sites));
  for (int i = 0; i < sites; ++i) parent[static_cast<std::size_t>(i)] = i;
  auto find = [&](int a) {
    while (parent[static_cast<std::size_t>(a)] != a) a = parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
    return a;
  };
  auto unite = [&](int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); };
  // j -> corners joined by horizontal bond j
  static constexpr std::array<std::array<int, 2>, 4> hc{{{0, 1}, {2, 3}, {0, 2}, {1, 3}}};
  for (int k = 0; k <= f.height; ++k) {
    for (int j = 0; j < 4; ++j)
      if (k > 0 && f.h_ordered(k, j)) unite(4 * k + hc[static_cast<std::size_t>(j)][0], 4 * k + hc[static_cast<std::size_t>(j)][1]);
    if (k < f.height)
      for (int c = 0; c < 4; ++c)
        if (f.v_ordered(k, c)) unite(4 * k + c, 4 * (k + 1) + c);
  }
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b)
      if (find(a) == find(b)) return true;
  return false;
}

inline bool is_admissible(const DefectPattern& p) {
  const auto& c = p.core;
  if (c.height < 1) return false;
  if (p.top == EndKind::boundary) return false;
  for (int k = 0; k < c.height; ++k)
    if (!c.frustrated(k)) return false;
  auto plane_is = [&](int k, EndKind e) { return e == EndKind::ordered ? c.plane_ordered(k) : c.plane_disordered(k); };
  if (!plane_is(0, p.boundary() ? EndKind::disordered : p.bottom)) return false;
  if (!plane_is(c.height, p.top)) return false;
  if (!has_blob_plaquette(p)) return false;
  if (p.boundary() && bottom_corners_connected(p.full())) return false;
  return true;
}

struct PatternFamily {
  EndKind bottom, top;
};

inline std::vector<PatternFamily> pattern_families() {
  using E = EndKind;
  return {{E::ordered, E::ordered}, {E::disordered, E::ordered}, {E::ordered, E::disordered},
          {E::disordered, E::disordered}, {E::boundary, E::ordered}, {E::boundary, E::disordered}};
}

struct EnumOptions {
  int l_slab = 1;
  PatternFamily family{EndKind::disordered, EndKind::ordered};
  int shard = 0;
  int shards = 1;
};

// Depth-first over cubes; a cube is rejected as soon as its twelve bonds are
// known and it is not frustrated. Sharding splits on the first cube's bits.
template <class Visit>
long enumerate_patterns(const EnumOptions& o, Visit&& visit) {
  if (o.l_slab < 1) throw InvalidParams("l_slab must be positive");
  if (o.l_slab > kExhaustiveCap) throw InvalidParams("exhaustive enumeration is capped at l_slab = 3; use sampling");
  if (o.shards < 1 || o.shard < 0 || o.shard >= o.shards) throw InvalidParams("bad shard " + std::to_string(o.shard) + "/" + std::to_string(o.shards));
  DefectPattern p;
  p.bottom = o.family.bottom;
  p.top = o.family.top;
  p.core = ColumnPattern(o.l_slab);
  const int l = o.l_slab;
  auto set_plane = [&](int k, unsigned bits) {
    for (int j = 0; j < 4; ++j) p.core.bonds[ColumnPattern::horizontal(k, j)] = (bits >> j) & 1 ? BondState::ordered : BondState::disordered;
  };
  auto set_cube = [&](int k, unsigned bits) {
    for (int j = 0; j < 4; ++j) p.core.bonds[ColumnPattern::vertical(k, j)] = (bits >> j) & 1 ? BondState::ordered : BondState::disordered;
  };
  set_plane(0, p.bottom == EndKind::ordered ? 15u : 0u);
  set_plane(l, p.top == EndKind::ordered ? 15u : 0u);
  long emitted = 0;
  auto rec = [&](auto&& self, int k) -> void {
    if (k == l) {
      if (!has_blob_plaquette(p)) return;
      if (p.boundary() && bottom_corners_connected(p.full())) return;
      ++emitted;
      visit(static_cast<const DefectPattern&>(p));
      return;
    }
    const bool free_plane = k + 1 < l;
    const unsigned choices = free_plane ? 256u : 16u;
    for (unsigned c = 0; c < choices; ++c) {
      if (k == 0 && static_cast<int>(c % static_cast<unsigned>(o.shards)) != o.shard) continue;
      set_cube(k, c & 15u);
      if (free_plane) set_plane(k + 1, c >> 4);
      if (!p.core.frustrated(k)) continue;
      self(self, k + 1);
    }
  };
  rec(rec, 0);
  return emitted;
}

// Reference enumeration: every raw bit string, filtered afterwards.
template <class Visit>
long enumerate_unpruned(int l_slab, PatternFamily family, Visit&& visit) {
  if (l_slab < 1 || l_slab > 2) throw InvalidParams("unpruned enumeration is for l_slab 1 or 2");
  DefectPattern p;
  p.bottom = family.bottom;
  p.top = family.top;
  p.core = ColumnPattern(l_slab);
  const std::size_t nb = p.core.bonds.size();
  long emitted = 0;
  for (std::uint64_t raw = 0; raw < (std::uint64_t{1} << nb); ++raw) {
    for (std::size_t i = 0; i < nb; ++i) p.core.bonds[i] = (raw >> i) & 1 ? BondState::ordered : BondState::disordered;
    if (!is_admissible(p)) continue;
    ++emitted;
    visit(static_cast<const DefectPattern&>(p));
  }
  return emitted;
}

// Random admissible patterns for heights beyond the exhaustive cap.
template <class Visit>
long sample_patterns(int l_slab, PatternFamily family, long tries, std::uint64_t seed, Visit&& visit) {
  SplitMix rng(seed);
  DefectPattern p;
  p.bottom = family.bottom;
  p.top = family.top;
  p.core = ColumnPattern(l_slab);
  long emitted = 0;
  for (long t = 0; t < tries; ++t) {
    for (auto& b : p.core.bonds) b = rng.coin() ? BondState::ordered : BondState::disordered;
    for (int j = 0; j < 4; ++j) {
      p.core.bonds[ColumnPattern::horizontal(0, j)] = family.bottom == EndKind::ordered ? BondState::ordered : BondState::disordered;
      p.core.bonds[ColumnPattern::horizontal(l_slab, j)] = family.top == EndKind::ordered ? BondState::ordered : BondState::disordered;
    }
    if (!is_admissible(p)) continue;
    ++emitted;
    visit(static_cast<const DefectPattern&>(p));
  }
  return emitted;
}

// ---- the verification sweep ----

struct PatternRow {
  std::string hash, bc;
  int d = 0, l_slab = 0, L = 0;
  Rational m;
  long D = 0, K = 0, Q = 0, Db = 0;
  DefectClass cls = DefectClass::non_problematic;
  long residual = 0;
  std::vector<InequalityResult> inequalities;
};

inline PatternRow evaluate_pattern(const DefectPattern& p, int n) {
  const auto s = defect_stats(p, n);
  PatternRow r;
  r.hash = pattern_hash(p);
  r.bc = bc_name(p);
  r.d = p.d();
  r.l_slab = p.l_slab();
  r.L = s.l;
  r.m = s.m();
  r.D = s.D;
  r.K = s.K;
  r.Q = s.Q;
  r.Db = s.Db;
  r.cls = classify_pattern(p);
  r.residual = check_identity(s).residual();
  r.inequalities = check_inequalities(s, r.cls);
  return r;
}

struct InequalityTally {
  long checked = 0;
  long violations = 0;
  Rational min_margin{0};
  bool any = false;
};

// Associative summary of a sweep.
struct VerifyReport {
  long patterns = 0;
  long identity_failures = 0;
  long max_abs_residual = 0;
  std::map<std::string, long> per_family;
  std::map<std::string, long> per_class;
  std::map<std::string, InequalityTally> inequalities;
  std::vector<std::string> first_failures;  // hashes, capped

  void add(const PatternRow& r) {
    ++patterns;
    ++per_family[r.bc];
    ++per_class[class_name(r.cls)];
    const long a = r.residual < 0 ? -r.residual : r.residual;
    max_abs_residual = std::max(max_abs_residual, a);
    bool failed = r.residual != 0;
    identity_failures += r.residual != 0;
    for (const auto& i : r.inequalities) {
      auto& t = inequalities[i.name];
      ++t.checked;
      const auto mg = i.margin();
      if (!t.any || mg < t.min_margin) t.min_margin = mg;
      t.any = true;
      if (!i.holds()) {
        ++t.violations;
        failed = true;
      }
    }
    if (failed && first_failures.size() < 20) first_failures.push_back(r.hash);
  }

  void merge(const VerifyReport& o) {
    patterns += o.patterns;
    identity_failures += o.identity_failures;
    max_abs_residual = std::max(max_abs_residual, o.max_abs_residual);
    for (const auto& [k, v] : o.per_family) per_family[k] += v;
    for (const auto& [k, v] : o.per_class) per_class[k] += v;
    for (const auto& [k, t] : o.inequalities) {
      auto& mine = inequalities[k];
      mine.checked += t.checked;
      mine.violations += t.violations;
      if (t.any && (!mine.any || t.min_margin < mine.min_margin)) mine.min_margin = t.min_margin;
      mine.any |= t.any;
    }
    for (const auto& h : o.first_failures)
      if (first_failures.size() < 20) first_failures.push_back(h);
  }

  long violations() const {
    long v = 0;
    for (const auto& [k, t] : inequalities) v += t.violations;
    return v;
  }
};

// One shard over every family and height up to l_max.
template <class Row>
VerifyReport verify_shard(int l_max, int n, int shard, int shards, Row&& row) {
  VerifyReport rep;
  for (int l = 1; l <= l_max; ++l)
    for (const auto& fam : pattern_families())
      enumerate_patterns(EnumOptions{l, fam, shard, shards}, [&](const DefectPattern& p) {
        const auto r = evaluate_pattern(p, n);
        rep.add(r);
        row(r);
      });
  return rep;
}

inline VerifyReport verify_shard(int l_max, int n, int shard, int shards) {
  return verify_shard(l_max, n, shard, shards, [](const PatternRow&) {});
}

// ---- explicit fixtures ----

// Bottom-attached disorder-disorder defect with one frustrated cube whose
// only ordered bond is the vertical at corner 0: D^b = 3N^2/4.
inline DefectPattern explicit_boundary_m1() {
  DefectPattern p;
  p.bottom = EndKind::boundary;
  p.top = EndKind::disordered;
  p.core = ColumnPattern(1);
  p.core.bonds[ColumnPattern::vertical(0, 0)] = BondState::ordered;
  return p;
}

// ---- glued pair ----

// Slab left by gluing two problematic sheets, bottom to top: an ordered cube,
// (l_tilde - 3) cubes with every bond disordered, the cube whose verticals
// follow the overlay V, a disordered cube, an ordered cube. The planes
// between the ordered cubes are disordered.
inline SlabField glued_field(int n, int l_tilde, const std::vector<bool>& overlay) {
  if (l_tilde < 3 || l_tilde > 4) throw InvalidParams("glued slab width must be 3 or 4 interior planes");
  if (overlay.size() != static_cast<std::size_t>(n * n)) throw InvalidParams("overlay must hold N^2 bonds");
  const int T = l_tilde + 1;
  SlabField f(n, T, false, 0);
  std::fill(f.hx.begin(), f.hx.end(), BondState::disordered);
  std::fill(f.hy.begin(), f.hy.end(), BondState::disordered);
  std::fill(f.vz.begin(), f.vz.end(), BondState::disordered);
  const int vcube = T - 3;
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      for (int k : {0, 1, T - 1, T}) {
        f.hx[f.site(x, y, k)] = BondState::ordered;
        f.hy[f.site(x, y, k)] = BondState::ordered;
      }
      f.vz[f.site(x, y, 0)] = BondState::ordered;
      f.vz[f.site(x, y, T - 1)] = BondState::ordered;
      if (overlay[static_cast<std::size_t>(y * n + x)]) f.vz[f.site(x, y, vcube)] = BondState::ordered;
    }
  return f;
}

struct GluedResult {
  Rational lhs, rhs;
  long n2 = 1;
  bool ends_disconnected = false;
  bool disconnected_bound = false;  // D - 3(K+Q) >= N^2
  bool kq_bound = false;            // K + Q <= (l_tilde - 2) N^2
  Rational margin() const { return (lhs - rhs) / Rational(n2); }
  bool holds() const { return lhs >= rhs; }
};

inline GluedResult check_glued_pair(const SlabField& f) {
  const auto s = defect_stats(f);
  const long lt = s.l;
  GluedResult g;
  g.n2 = s.n2;
  g.lhs = Rational(s.D) - Rational(3 * lt + 1, lt) * Rational(s.K + s.Q + 2 * lt * s.n);
  g.rhs = Rational(9, 20) * Rational(s.n2);
  g.ends_disconnected = !s.ends_connected;
  g.disconnected_bound = s.D - 3 * (s.K + s.Q) >= s.n2;
  g.kq_bound = s.K + s.Q <= (lt - 2) * s.n2;
  return g;
}

// Smallest even N at which the empty overlay meets the bound.
inline int glued_threshold_n(int l_tilde, int limit = 100000) {
  for (int n = 2; n <= limit; n += 2)
    if (check_glued_pair(glued_field(n, l_tilde, std::vector<bool>(static_cast<std::size_t>(n * n), false))).holds()) return n;
  return -1;
}

}  // namespace clocklab
