#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <tuple>
#include <vector>

#include "lattice.hpp"

namespace clocklab {

// Elementary cube by its lower corner. Real cubes have z in [0, L]; z = -1 is a
// virtual pure-disordered layer standing for the bottom plane and z = L+1 a
// virtual pure-ordered layer standing for the top plane.
struct Cube {
  int x = 0, y = 0, z = 0;
  friend auto operator<=>(const Cube&, const Cube&) = default;
};

enum class CubeKind : std::uint8_t { ordered, disordered, frustrated };

// horizontal: square [x,x+1]x[y,y+1] at height z, between cubes z-1 and z.
// normal_x: square at abscissa x spanning [y,y+1]x[z,z+1], between cubes x-1 and x.
// normal_y: square at ordinate y spanning [x,x+1]x[z,z+1], between cubes y-1 and y.
enum class Facing : std::uint8_t { horizontal, normal_x, normal_y };

struct Plaquette {
  Facing facing = Facing::horizontal;
  int x = 0, y = 0, z = 0;
  bool horizontal() const { return facing == Facing::horizontal; }
  friend auto operator<=>(const Plaquette&, const Plaquette&) = default;
};

using PlaquetteSurface = std::vector<Plaquette>;  // sorted, unique

// Lattice edge from (x,y,z) one step along axis.
struct Edge {
  int x = 0, y = 0, z = 0;
  Axis axis = Axis::x;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct Vertex {
  int x = 0, y = 0, z = 0;
  friend auto operator<=>(const Vertex&, const Vertex&) = default;
};

// Index arithmetic for cubes (virtual layers included) and their faces.
class CubeGeometry {
 public:
  explicit CubeGeometry(const LatticeSpec& s) : n(s.n), l(s.l), nn(static_cast<std::size_t>(s.n) * s.n) {}

  int n, l;
  std::size_t nn;

  std::size_t cube_count() const { return nn * static_cast<std::size_t>(l + 3); }
  std::size_t cube(int x, int y, int z) const {
    return (static_cast<std::size_t>(z + 1) * n + static_cast<std::size_t>(wrap(y, n))) * n + static_cast<std::size_t>(wrap(x, n));
  }
  std::size_t cube(const Cube& c) const { return cube(c.x, c.y, c.z); }
  Cube cube_at(std::size_t i) const {
    return {static_cast<int>(i % n), static_cast<int>((i / n) % n), static_cast<int>(i / nn) - 1};
  }
  bool virtual_bottom(std::size_t i) const { return i < nn; }
  bool virtual_top(std::size_t i) const { return i >= nn * static_cast<std::size_t>(l + 2); }

  std::size_t horizontal_faces() const { return nn * static_cast<std::size_t>(l + 2); }
  std::size_t face_count() const { return horizontal_faces() + 2 * cube_count(); }
  std::size_t face(const Plaquette& p) const {
    const auto cell = static_cast<std::size_t>(wrap(p.y, n)) * n + static_cast<std::size_t>(wrap(p.x, n));
    switch (p.facing) {
      case Facing::horizontal: return static_cast<std::size_t>(p.z) * nn + cell;
      case Facing::normal_x: return horizontal_faces() + static_cast<std::size_t>(p.z + 1) * nn + cell;
      default: return horizontal_faces() + cube_count() + static_cast<std::size_t>(p.z + 1) * nn + cell;
    }
  }

  // The six faces of a cube paired with the cube on the other side; faces
  // leaving the virtual layers vertically are skipped.
  template <class F>
  void for_each_face_neighbour(std::size_t i, F&& f) const {
    const Cube c = cube_at(i);
    f(Plaquette{Facing::normal_x, c.x, c.y, c.z}, cube(c.x - 1, c.y, c.z));
    f(Plaquette{Facing::normal_x, wrap(c.x + 1, n), c.y, c.z}, cube(c.x + 1, c.y, c.z));
    f(Plaquette{Facing::normal_y, c.x, c.y, c.z}, cube(c.x, c.y - 1, c.z));
    f(Plaquette{Facing::normal_y, c.x, wrap(c.y + 1, n), c.z}, cube(c.x, c.y + 1, c.z));
    if (c.z > -1) f(Plaquette{Facing::horizontal, c.x, c.y, c.z}, cube(c.x, c.y, c.z - 1));
    if (c.z < l + 1) f(Plaquette{Facing::horizontal, c.x, c.y, c.z + 1}, cube(c.x, c.y, c.z + 1));
  }

  // Cubes sharing at least an edge: offsets with at most two nonzero entries.
  template <class F>
  void for_each_edge_neighbour(std::size_t i, F&& f) const {
    const Cube c = cube_at(i);
    for (int dz = -1; dz <= 1; ++dz) {
      const int z = c.z + dz;
      if (z < -1 || z > l + 1) continue;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int nz = (dx != 0) + (dy != 0) + (dz != 0);
          if (nz == 0 || nz == 3) continue;
          f(cube(c.x + dx, c.y + dy, z));
        }
    }
  }

  // The two cubes a plaquette separates (lower/left first).
  std::pair<std::size_t, std::size_t> sides(const Plaquette& p) const {
    switch (p.facing) {
      case Facing::horizontal: return {cube(p.x, p.y, p.z - 1), cube(p.x, p.y, p.z)};
      case Facing::normal_x: return {cube(p.x - 1, p.y, p.z), cube(p.x, p.y, p.z)};
      default: return {cube(p.x, p.y - 1, p.z), cube(p.x, p.y, p.z)};
    }
  }

  std::array<Edge, 4> edges(const Plaquette& p) const {
    const int x1 = wrap(p.x + 1, n), y1 = wrap(p.y + 1, n);
    switch (p.facing) {
      case Facing::horizontal:
        return {Edge{p.x, p.y, p.z, Axis::x}, Edge{p.x, y1, p.z, Axis::x}, Edge{p.x, p.y, p.z, Axis::y},
                Edge{x1, p.y, p.z, Axis::y}};
      case Facing::normal_x:
        return {Edge{p.x, p.y, p.z, Axis::y}, Edge{p.x, p.y, p.z + 1, Axis::y}, Edge{p.x, p.y, p.z, Axis::z},
                Edge{p.x, y1, p.z, Axis::z}};
      default:
        return {Edge{p.x, p.y, p.z, Axis::x}, Edge{p.x, p.y, p.z + 1, Axis::x}, Edge{p.x, p.y, p.z, Axis::z},
                Edge{x1, p.y, p.z, Axis::z}};
    }
  }

  std::array<Vertex, 4> vertices(const Plaquette& p) const {
    const int x1 = wrap(p.x + 1, n), y1 = wrap(p.y + 1, n);
    switch (p.facing) {
      case Facing::horizontal: return {Vertex{p.x, p.y, p.z}, Vertex{x1, p.y, p.z}, Vertex{p.x, y1, p.z}, Vertex{x1, y1, p.z}};
      case Facing::normal_x:
        return {Vertex{p.x, p.y, p.z}, Vertex{p.x, y1, p.z}, Vertex{p.x, p.y, p.z + 1}, Vertex{p.x, y1, p.z + 1}};
      default: return {Vertex{p.x, p.y, p.z}, Vertex{x1, p.y, p.z}, Vertex{p.x, p.y, p.z + 1}, Vertex{x1, p.y, p.z + 1}};
    }
  }
};

// Plain union-find.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }
  std::size_t find(std::size_t a) {
    while (parent_[a] != a) a = parent_[a] = parent_[parent_[a]];
    return a;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }
  // Groups of members, each group sorted, groups ordered by smallest member.
  std::vector<std::vector<std::size_t>> groups() {
    std::map<std::size_t, std::vector<std::size_t>> g;
    for (std::size_t i = 0; i < parent_.size(); ++i) g[find(i)].push_back(i);
    std::vector<std::vector<std::size_t>> out;
    for (auto& [root, members] : g) out.push_back(std::move(members));
    return out;
  }

 private:
  std::vector<std::size_t> parent_;
};

// Kinds of every cube including the two virtual layers.
struct CubeField {
  LatticeSpec spec;
  std::vector<CubeKind> kind;

  CubeKind at(int x, int y, int z) const { return kind[CubeGeometry(spec).cube(x, y, z)]; }
  CubeKind at(const Cube& c) const { return at(c.x, c.y, c.z); }
};

// The twelve bonds of a real cube.
inline std::array<Bond, 12> cube_bonds(const Cube& c, int n) {
  const int x1 = wrap(c.x + 1, n), y1 = wrap(c.y + 1, n);
  std::array<Bond, 12> b;
  int k = 0;
  for (int dz = 0; dz <= 1; ++dz) {
    b[k++] = Bond{{c.x, c.y, c.z + dz}, Axis::x};
    b[k++] = Bond{{c.x, y1, c.z + dz}, Axis::x};
    b[k++] = Bond{{c.x, c.y, c.z + dz}, Axis::y};
    b[k++] = Bond{{x1, c.y, c.z + dz}, Axis::y};
  }
  b[k++] = Bond{{c.x, c.y, c.z}, Axis::z};
  b[k++] = Bond{{x1, c.y, c.z}, Axis::z};
  b[k++] = Bond{{c.x, y1, c.z}, Axis::z};
  b[k++] = Bond{{x1, y1, c.z}, Axis::z};
  return b;
}

inline CubeField classify_cubes(const SpinConfig& c) {
  const auto& spec = c.spec();
  const CubeGeometry g(spec);
  const BondMap bonds = classify_bonds(c);
  CubeField f{spec, std::vector<CubeKind>(g.cube_count(), CubeKind::disordered)};
  for (std::size_t i = 0; i < g.cube_count(); ++i) {
    const Cube cube = g.cube_at(i);
    if (cube.z == -1) continue;
    if (cube.z == spec.l + 1) {
      f.kind[i] = CubeKind::ordered;
      continue;
    }
    int ordered = 0;
    for (const auto& b : cube_bonds(cube, spec.n)) ordered += bonds[b] == BondState::ordered;
    f.kind[i] = ordered == 12 ? CubeKind::ordered : ordered == 0 ? CubeKind::disordered : CubeKind::frustrated;
  }
  return f;
}

inline std::vector<Cube> frustrated_cubes(const SpinConfig& c) {
  const auto f = classify_cubes(c);
  const CubeGeometry g(c.spec());
  std::vector<Cube> out;
  for (std::size_t i = 0; i < f.kind.size(); ++i)
    if (f.kind[i] == CubeKind::frustrated) out.push_back(g.cube_at(i));
  std::sort(out.begin(), out.end());
  return out;
}

// Face flood fill from the virtual bottom layer through cubes not in `wall`
// and faces not in `cut`; true when the virtual top layer is reached.
inline bool bottom_reaches_top(const CubeGeometry& g, const std::vector<char>& wall, const std::vector<char>* cut = nullptr) {
  std::vector<char> seen(g.cube_count(), 0);
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < g.nn; ++i)
    if (!wall[i]) {
      seen[i] = 1;
      stack.push_back(i);
    }
  while (!stack.empty()) {
    const auto i = stack.back();
    stack.pop_back();
    if (g.virtual_top(i)) return true;
    g.for_each_face_neighbour(i, [&](const Plaquette& p, std::size_t j) {
      if (seen[j] || wall[j]) return;
      if (cut && (*cut)[g.face(p)]) return;
      seen[j] = 1;
      stack.push_back(j);
    });
  }
  return false;
}

enum class ComponentKind : std::uint8_t { interface3d, contour };

struct FrustrationComponent {
  std::vector<Cube> cubes;  // sorted
  ComponentKind kind = ComponentKind::contour;
};

// Components of a cube set under shared-bond adjacency. A component separates
// the boundary planes when removing it cuts every face path from the virtual
// bottom layer to the virtual top layer; one that misses some column cannot.
inline std::vector<FrustrationComponent> decompose_components(const LatticeSpec& spec, const std::vector<Cube>& cubes) {
  const CubeGeometry g(spec);
  std::vector<char> member(g.cube_count(), 0);
  for (const auto& c : cubes) member[g.cube(c)] = 1;
  std::vector<char> seen(g.cube_count(), 0);
  std::vector<FrustrationComponent> out;
  for (std::size_t start = 0; start < g.cube_count(); ++start) {
    if (!member[start] || seen[start]) continue;
    std::vector<std::size_t> comp{start}, stack{start};
    seen[start] = 1;
    while (!stack.empty()) {
      const auto i = stack.back();
      stack.pop_back();
      g.for_each_edge_neighbour(i, [&](std::size_t j) {
        if (member[j] && !seen[j]) {
          seen[j] = 1;
          comp.push_back(j);
          stack.push_back(j);
        }
      });
    }
    FrustrationComponent fc;
    std::vector<char> columns(g.nn, 0), wall(g.cube_count(), 0);
    for (auto i : comp) {
      fc.cubes.push_back(g.cube_at(i));
      columns[i % g.nn] = 1;
      wall[i] = 1;
    }
    std::sort(fc.cubes.begin(), fc.cubes.end());
    const bool covers = std::all_of(columns.begin(), columns.end(), [](char v) { return v != 0; });
    if (covers && !bottom_reaches_top(g, wall)) fc.kind = ComponentKind::interface3d;
    out.push_back(std::move(fc));
  }
  return out;
}

// Everything the interface pipeline derives from one configuration.
struct InterfaceData {
  LatticeSpec spec;
  CubeField cubes;
  std::vector<FrustrationComponent> components;
  std::vector<char> in_interface;  // I(sigma), by cube index
  std::vector<char> disordered_region;  // D(sigma), by cube index
  PlaquetteSurface boundary;  // all of dD
  std::vector<PlaquetteSurface> sheets;  // separating components of dD
  PlaquetteSurface surface;  // B(sigma): union of sheets
};

inline InterfaceData extract_interface(const SpinConfig& config) {
  const auto& spec = config.spec();
  const CubeGeometry g(spec);
  InterfaceData out{spec, classify_cubes(config), {}, {}, {}, {}, {}, {}};
  std::vector<Cube> frustrated;
  for (std::size_t i = 0; i < g.cube_count(); ++i)
    if (out.cubes.kind[i] == CubeKind::frustrated) frustrated.push_back(g.cube_at(i));
  out.components = decompose_components(spec, frustrated);
  out.in_interface.assign(g.cube_count(), 0);
  for (const auto& c : out.components)
    if (c.kind == ComponentKind::interface3d)
      for (const auto& cube : c.cubes) out.in_interface[g.cube(cube)] = 1;

  // Complement components and their phase.
  out.disordered_region.assign(g.cube_count(), 0);
  std::vector<char> seen(g.cube_count(), 0);
  for (std::size_t start = 0; start < g.cube_count(); ++start) {
    if (out.in_interface[start] || seen[start]) continue;
    std::vector<std::size_t> comp{start}, stack{start};
    seen[start] = 1;
    bool bottom = false, top = false;
    std::optional<CubeKind> touching, any;
    while (!stack.empty()) {
      const auto i = stack.back();
      stack.pop_back();
      bottom |= g.virtual_bottom(i);
      top |= g.virtual_top(i);
      g.for_each_face_neighbour(i, [&](const Plaquette&, std::size_t j) {
        if (out.in_interface[j]) return;
        if (!seen[j]) {
          seen[j] = 1;
          comp.push_back(j);
          stack.push_back(j);
        }
      });
    }
    std::sort(comp.begin(), comp.end());
    for (auto i : comp) {
      const auto k = out.cubes.kind[i];
      if (k == CubeKind::frustrated) continue;
      if (!any) any = k;
      if (touching) continue;
      g.for_each_face_neighbour(i, [&](const Plaquette&, std::size_t j) {
        if (out.in_interface[j] && !touching) touching = k;
      });
    }
    bool disordered;
    if (bottom) disordered = true;
    else if (top) disordered = false;
    else disordered = (touching ? *touching : any.value_or(CubeKind::ordered)) == CubeKind::disordered;
    if (disordered)
      for (auto i : comp) out.disordered_region[i] = 1;
  }

  // dD: faces between D and I.
  for (std::size_t i = 0; i < g.cube_count(); ++i) {
    if (!out.disordered_region[i]) continue;
    g.for_each_face_neighbour(i, [&](const Plaquette& p, std::size_t j) {
      if (out.in_interface[j]) out.boundary.push_back(p);
    });
  }
  std::sort(out.boundary.begin(), out.boundary.end());
  out.boundary.erase(std::unique(out.boundary.begin(), out.boundary.end()), out.boundary.end());

  // Components of dD under edge sharing; keep the separating ones.
  DisjointSets ds(out.boundary.size());
  std::vector<std::pair<Edge, std::size_t>> incidence;
  for (std::size_t k = 0; k < out.boundary.size(); ++k)
    for (const auto& e : g.edges(out.boundary[k])) incidence.emplace_back(e, k);
  std::sort(incidence.begin(), incidence.end());
  for (std::size_t k = 1; k < incidence.size(); ++k)
    if (incidence[k].first == incidence[k - 1].first) ds.unite(incidence[k].second, incidence[k - 1].second);
  const std::vector<char> no_wall(g.cube_count(), 0);
  for (const auto& grp : ds.groups()) {
    PlaquetteSurface sheet;
    std::vector<char> columns(g.nn, 0), cut(g.face_count(), 0);
    for (auto k : grp) {
      const auto& p = out.boundary[k];
      sheet.push_back(p);
      cut[g.face(p)] = 1;
      if (p.horizontal()) columns[static_cast<std::size_t>(p.y) * spec.n + p.x] = 1;
    }
    if (!std::all_of(columns.begin(), columns.end(), [](char v) { return v != 0; })) continue;
    if (bottom_reaches_top(g, no_wall, &cut)) continue;
    out.sheets.push_back(sheet);
    out.surface.insert(out.surface.end(), sheet.begin(), sheet.end());
  }
  std::sort(out.surface.begin(), out.surface.end());
  return out;
}

inline long projection_area(const PlaquetteSurface& d) {
  std::vector<std::pair<int, int>> cells;
  for (const auto& p : d)
    if (p.horizontal()) cells.emplace_back(p.x, p.y);
  std::sort(cells.begin(), cells.end());
  return static_cast<long>(std::unique(cells.begin(), cells.end()) - cells.begin());
}

inline long weight(const PlaquetteSurface& d) { return static_cast<long>(d.size()) - projection_area(d); }

// Height h(x,y) for every base plaquette; nullopt stands for infinity.
struct HeightField {
  int n = 0;
  std::vector<std::optional<int>> height;  // index y*n + x
  std::vector<std::pair<int, int>> rigid;  // R(sigma) as (x,y), sorted

  const std::optional<int>& at(int x, int y) const { return height[static_cast<std::size_t>(wrap(y, n)) * n + wrap(x, n)]; }
};

struct CeilingsAndWalls {
  std::vector<PlaquetteSurface> ceilings;  // ordered by smallest member
  std::vector<PlaquetteSurface> walls;
  HeightField heights;
};

inline CeilingsAndWalls ceilings_walls_heights(const LatticeSpec& spec, const PlaquetteSurface& b) {
  const int n = spec.n;
  const auto nn = static_cast<std::size_t>(n) * n;
  std::vector<int> count(nn, 0);
  std::vector<int> level(nn, 0);
  for (const auto& p : b)
    if (p.horizontal()) {
      ++count[static_cast<std::size_t>(p.y) * n + p.x];
      level[static_cast<std::size_t>(p.y) * n + p.x] = p.z;
    }
  // Base edges under a vertical plaquette of B: those points are not regular.
  std::vector<char> hang_x(nn, 0), hang_y(nn, 0);  // normal_x at (x,y): edge between cells x-1 and x
  for (const auto& p : b) {
    if (p.facing == Facing::normal_x) hang_x[static_cast<std::size_t>(p.y) * n + p.x] = 1;
    if (p.facing == Facing::normal_y) hang_y[static_cast<std::size_t>(p.y) * n + p.x] = 1;
  }
  CeilingsAndWalls out;
  out.heights.n = n;
  out.heights.height.assign(nn, std::nullopt);
  for (std::size_t i = 0; i < nn; ++i)
    if (count[i] == 1) out.heights.height[i] = level[i];

  DisjointSets cells(nn);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      const auto i = static_cast<std::size_t>(y) * n + x;
      if (!out.heights.height[i]) continue;
      const auto right = static_cast<std::size_t>(y) * n + wrap(x + 1, n);
      const auto up = static_cast<std::size_t>(wrap(y + 1, n)) * n + x;
      if (out.heights.height[right] == out.heights.height[i] && !hang_x[right]) cells.unite(i, right);
      if (out.heights.height[up] == out.heights.height[i] && !hang_y[up]) cells.unite(i, up);
    }
  std::vector<std::pair<int, int>> best;
  for (const auto& grp : cells.groups()) {
    if (!out.heights.height[grp.front()]) continue;
    PlaquetteSurface ceiling;
    std::vector<std::pair<int, int>> members;
    for (auto i : grp) {
      const int x = static_cast<int>(i % n), y = static_cast<int>(i / n);
      ceiling.push_back(Plaquette{Facing::horizontal, x, y, *out.heights.height[i]});
      members.emplace_back(x, y);
    }
    std::sort(ceiling.begin(), ceiling.end());
    std::sort(members.begin(), members.end());
    if (members.size() > best.size() || (members.size() == best.size() && !best.empty() && members.front() < best.front()))
      best = members;
    out.ceilings.push_back(std::move(ceiling));
  }
  std::sort(out.ceilings.begin(), out.ceilings.end());
  out.heights.rigid = best;

  const CubeGeometry g(spec);
  std::vector<Plaquette> rest;
  for (const auto& p : b)
    if (!(p.horizontal() && count[static_cast<std::size_t>(p.y) * n + p.x] == 1)) rest.push_back(p);
  DisjointSets ws(rest.size());
  std::vector<std::pair<Vertex, std::size_t>> incidence;
  for (std::size_t k = 0; k < rest.size(); ++k)
    for (const auto& v : g.vertices(rest[k])) incidence.emplace_back(v, k);
  std::sort(incidence.begin(), incidence.end());
  for (std::size_t k = 1; k < incidence.size(); ++k)
    if (incidence[k].first == incidence[k - 1].first) ws.unite(incidence[k].second, incidence[k - 1].second);
  for (const auto& grp : ws.groups()) {
    PlaquetteSurface wall;
    for (auto k : grp) wall.push_back(rest[k]);
    out.walls.push_back(std::move(wall));
  }
  return out;
}

// A wall winds when its projection onto the base torus carries a loop with
// nonzero winding: lift vertices to Z^2 along a search and look for a
// projected edge whose endpoints' lifts disagree.
inline bool is_winding(const PlaquetteSurface& wall, int n) {
  std::vector<std::tuple<int, int, int>> edges;  // (x, y, dir) with dir 0: +x, 1: +y
  for (const auto& p : wall) {
    switch (p.facing) {
      case Facing::normal_x: edges.emplace_back(p.x, p.y, 1); break;
      case Facing::normal_y: edges.emplace_back(p.x, p.y, 0); break;
      default:
        edges.emplace_back(p.x, p.y, 0);
        edges.emplace_back(p.x, wrap(p.y + 1, n), 0);
        edges.emplace_back(p.x, p.y, 1);
        edges.emplace_back(wrap(p.x + 1, n), p.y, 1);
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  const auto nn = static_cast<std::size_t>(n) * n;
  struct Step {
    std::size_t to;
    int dx, dy;
  };
  std::vector<std::vector<Step>> adj(nn);
  auto id = [n](int x, int y) { return static_cast<std::size_t>(wrap(y, n)) * n + wrap(x, n); };
  for (const auto& [x, y, dir] : edges) {
    const int dx = dir == 0, dy = dir == 1;
    adj[id(x, y)].push_back({id(x + dx, y + dy), dx, dy});
    adj[id(x + dx, y + dy)].push_back({id(x, y), -dx, -dy});
  }
  std::vector<std::optional<std::pair<long, long>>> lift(nn);
  for (std::size_t s = 0; s < nn; ++s) {
    if (adj[s].empty() || lift[s]) continue;
    lift[s] = std::pair<long, long>{0, 0};
    std::queue<std::size_t> todo;
    todo.push(s);
    while (!todo.empty()) {
      const auto v = todo.front();
      todo.pop();
      for (const auto& st : adj[v]) {
        const std::pair<long, long> want{lift[v]->first + st.dx, lift[v]->second + st.dy};
        if (!lift[st.to]) {
          lift[st.to] = want;
          todo.push(st.to);
        } else if (*lift[st.to] != want) {
          return true;
        }
      }
    }
  }
  return false;
}

// Summary used by the chain observables and the analyze command.
struct InterfaceSummary {
  long surface_size = 0;
  long weight = 0;
  long ceilings = 0;
  long walls = 0;
  long winding_walls = 0;
  long rigid_area = 0;
  long interface_components = 0;
  long contours = 0;
  std::optional<int> height_mode;  // most common finite height, smallest on ties
  std::map<int, long> height_histogram;
};

inline InterfaceSummary summarize(const InterfaceData& d, const CeilingsAndWalls& cw) {
  InterfaceSummary s;
  s.surface_size = static_cast<long>(d.surface.size());
  s.weight = weight(d.surface);
  s.ceilings = static_cast<long>(cw.ceilings.size());
  s.walls = static_cast<long>(cw.walls.size());
  for (const auto& w : cw.walls) s.winding_walls += is_winding(w, d.spec.n);
  s.rigid_area = static_cast<long>(cw.heights.rigid.size());
  for (const auto& c : d.components) (c.kind == ComponentKind::interface3d ? s.interface_components : s.contours) += 1;
  for (const auto& h : cw.heights.height)
    if (h) ++s.height_histogram[*h];
  long best = 0;
  for (const auto& [h, k] : s.height_histogram)
    if (k > best) {
      best = k;
      s.height_mode = h;
    }
  return s;
}

inline InterfaceSummary analyze(const SpinConfig& c) {
  const auto d = extract_interface(c);
  return summarize(d, ceilings_walls_heights(c.spec(), d.surface));
}

}  // namespace clocklab
