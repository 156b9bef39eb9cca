#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "column.hpp"
#include "interface.hpp"

namespace clocklab {

// Raised when the interface in a column breaks the blob rules; names the rule.
struct GrammarError : std::runtime_error {
  GrammarError(std::string rule_name, int cx, int cy, const std::string& detail)
      : std::runtime_error("blob rule '" + rule_name + "' fails in column (" + std::to_string(cx) + "," +
                           std::to_string(cy) + "): " + detail),
        rule(std::move(rule_name)) {}
  std::string rule;
};

struct StructureError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ColumnAssignment {
  int n = 0;
  std::vector<PlaquetteSurface> plaquettes;  // by column y*n + x
  std::vector<Plaquette> tie_broken;  // vertical plaquettes with no frustrated/pure-disordered split

  const PlaquetteSurface& at(int x, int y) const { return plaquettes[static_cast<std::size_t>(y) * n + x]; }
};

// Horizontal plaquettes go to their own column. A vertical plaquette between a
// frustrated cube and a pure disordered one goes to the frustrated cube's
// column; any other vertical plaquette goes to the lower-coordinate column and
// is flagged.
inline ColumnAssignment assign_to_columns(const InterfaceData& d) {
  const CubeGeometry g(d.spec);
  ColumnAssignment out{d.spec.n, std::vector<PlaquetteSurface>(g.nn), {}};
  for (const auto& p : d.surface) {
    std::size_t column;
    if (p.horizontal()) {
      column = static_cast<std::size_t>(p.y) * d.spec.n + p.x;
    } else {
      const auto [a, b] = g.sides(p);
      const auto ka = d.cubes.kind[a], kb = d.cubes.kind[b];
      if (ka == CubeKind::frustrated && kb == CubeKind::disordered) column = a % g.nn;
      else if (kb == CubeKind::frustrated && ka == CubeKind::disordered) column = b % g.nn;
      else {
        column = a % g.nn;
        out.tie_broken.push_back(p);
      }
    }
    out.plaquettes[column].push_back(p);
  }
  for (auto& col : out.plaquettes) std::sort(col.begin(), col.end());
  return out;
}

enum class BlobType : std::uint8_t { h_minus, h_plus, h_minus_plus, v };

inline int blob_sign(BlobType t) { return t == BlobType::h_minus ? -1 : t == BlobType::h_plus ? 1 : 0; }

inline const char* blob_name(BlobType t) {
  switch (t) {
    case BlobType::h_minus: return "h-";
    case BlobType::h_plus: return "h+";
    case BlobType::h_minus_plus: return "h-+";
    default: return "v";
  }
}

// Height order inside a column: plane z sits at 2z, cube layer z at 2z+1.
inline int plaquette_level(const Plaquette& p) { return p.horizontal() ? 2 * p.z : 2 * p.z + 1; }

struct Blob {
  PlaquetteSurface plaquettes;  // sorted by level
  BlobType type = BlobType::v;
  int sign() const { return blob_sign(type); }
  int bottom_level() const { return plaquette_level(plaquettes.front()); }
};

inline std::string blob_string(const std::vector<Blob>& blobs) {
  std::string s;
  for (const auto& b : blobs) {
    if (!s.empty()) s += ' ';
    s += blob_name(b.type);
  }
  return s;
}

// Validates the per-column sequence rules; throws GrammarError.
inline void check_blob_grammar(const std::vector<Blob>& blobs, int cx, int cy) {
  int last = 0;
  int first = 0;
  bool after_v = false;
  for (const auto& b : blobs) {
    const int s = b.sign();
    if (b.type == BlobType::v) {
      after_v = true;
      continue;
    }
    if (s == 0) continue;
    if (after_v && b.type != BlobType::h_plus) throw GrammarError("v-then-h+", cx, cy, blob_string(blobs));
    after_v = false;
    if (last == s) throw GrammarError("alternation", cx, cy, blob_string(blobs));
    if (!first) first = s;
    last = s;
  }
  if (!first) throw GrammarError("signed-blob-exists", cx, cy, blob_string(blobs));
  if (first != -1 || last != -1) throw GrammarError("ends-minus", cx, cy, blob_string(blobs));
}

// Blobs of one column, enumerated upwards and typed; the grammar is checked
// unless `validate` is false.
inline std::vector<Blob> blobs_and_signs(const InterfaceData& d, const PlaquetteSurface& column, int cx, int cy,
                                         bool validate = true) {
  const CubeGeometry g(d.spec);
  DisjointSets ds(column.size());
  for (std::size_t a = 0; a < column.size(); ++a) {
    const auto ea = g.edges(column[a]);
    for (std::size_t b = a + 1; b < column.size(); ++b) {
      const auto eb = g.edges(column[b]);
      bool shared = false;
      for (const auto& x : ea)
        for (const auto& y : eb) shared |= x == y;
      if (shared) ds.unite(a, b);
    }
  }
  std::vector<Blob> blobs;
  for (const auto& grp : ds.groups()) {
    Blob b;
    for (auto k : grp) b.plaquettes.push_back(column[k]);
    std::stable_sort(b.plaquettes.begin(), b.plaquettes.end(),
                     [](const Plaquette& x, const Plaquette& y) { return plaquette_level(x) < plaquette_level(y); });
    blobs.push_back(std::move(b));
  }
  std::stable_sort(blobs.begin(), blobs.end(), [](const Blob& a, const Blob& b) { return a.bottom_level() < b.bottom_level(); });
  auto pure_disordered = [&](int z) { return d.cubes.at(cx, cy, z) == CubeKind::disordered && d.disordered_region[g.cube(cx, cy, z)]; };
  for (auto& b : blobs) {
    const auto& ps = b.plaquettes;
    long horizontals = 0;
    for (const auto& p : ps) horizontals += p.horizontal();
    const bool starts = ps.front().horizontal(), ends = ps.back().horizontal();
    if (ps.size() == 1 && starts) {
      const int z = ps.front().z;
      if (pure_disordered(z - 1)) b.type = BlobType::h_minus;
      else if (pure_disordered(z)) b.type = BlobType::h_plus;
      else if (validate) throw GrammarError("single-plaquette-side", cx, cy, "no pure disordered cube at plane " + std::to_string(z));
      else b.type = BlobType::h_minus;
      continue;
    }
    if (horizontals == 0) b.type = BlobType::v;
    else if (starts && ends && horizontals == 2) b.type = BlobType::h_minus_plus;
    else if (starts && horizontals == 1) b.type = BlobType::h_minus;
    else if (ends && horizontals == 1) b.type = BlobType::h_plus;
    else if (validate) throw GrammarError("interior-horizontal", cx, cy, "blob with a horizontal plaquette inside its vertical run");
    else b.type = BlobType::v;
  }
  if (validate) check_blob_grammar(blobs, cx, cy);
  return blobs;
}

enum class EndKind : std::uint8_t { ordered, disordered, boundary };
enum class DefectClass : std::uint8_t { problematic, e_problematic, non_problematic };

inline const char* class_name(DefectClass c) {
  switch (c) {
    case DefectClass::problematic: return "problematic";
    case DefectClass::e_problematic: return "e-problematic";
    default: return "non-problematic";
  }
}

// Cyclic signed spin differences around an ordered plaquette.
struct PlaquetteType {
  std::array<int, 4> diff{};
  friend bool operator==(const PlaquetteType&, const PlaquetteType&) = default;
};

inline int signed_step(int a, int b, int q) {
  int d = wrap(a - b, q);
  if (d == 0) return 0;
  if (d == 1) return 1;
  if (d == q - 1) return -1;
  throw StructureError("plaquette is not ordered");
}

// Spins listed cyclically: (x,y), (x+1,y), (x+1,y+1), (x,y+1).
inline PlaquetteType plaquette_type(const std::array<int, 4>& s, int q) {
  PlaquetteType t;
  for (int i = 0; i < 4; ++i) t.diff[i] = signed_step(s[i], s[(i + 1) % 4], q);
  return t;
}

inline int dominant_value(const std::array<int, 4>& s, int q) {
  for (int i = 0; i < 4; ++i) {
    bool ok = true;
    for (int j = 0; j < 4; ++j) ok &= circular_distance(s[i], s[j], q) <= 1;
    if (ok) return s[i];
  }
  throw StructureError("no dominant value: plaquette is not ordered");
}

inline std::array<int, 4> plaquette_spins(const SpinConfig& c, int cx, int cy, int z) {
  return {c.at(cx, cy, z), c.at(cx + 1, cy, z), c.at(cx + 1, cy + 1, z), c.at(cx, cy + 1, z)};
}

struct DefectRecord {
  int cx = 0, cy = 0;
  int lo = 0, hi = 0;  // cube range, end cubes included
  EndKind bottom = EndKind::boundary, top = EndKind::boundary;
  int sign = 0;
  bool sign_clamped = false;
  std::vector<int> blobs;  // indices into the column's blob list
  int frustrated = 0;  // m
  ColumnPattern pattern;  // frozen over [lo, hi]
  DefectClass kind = DefectClass::non_problematic;
  std::optional<PlaquetteType> bottom_type, top_type;  // on ordered delimiting plaquettes
  int cube_count() const { return hi - lo + 1; }
  int pure_count() const { return cube_count() - frustrated; }
  int bottom_plane() const { return lo; }  // a
  int top_plane() const { return hi + 1; }  // b
};

// Problematic: both ends pure, at least one ordered, and every bond outside
// the two end cubes disordered. e-problematic: attached to the bottom, one or
// two frustrated cubes under one ordered cube, a bottom cube with at least
// three disordered verticals, built from the single plane-0 plaquette.
inline DefectClass classify_defect(const DefectRecord& r, const std::vector<Blob>& column_blobs) {
  const auto& p = r.pattern;
  if (r.bottom != EndKind::boundary && r.top != EndKind::boundary &&
      (r.bottom == EndKind::ordered || r.top == EndKind::ordered)) {
    std::vector<char> in_end(p.bonds.size(), 0);
    for (auto i : ColumnPattern::cube_bonds(0)) in_end[i] = 1;
    for (auto i : ColumnPattern::cube_bonds(p.height - 1)) in_end[i] = 1;
    bool all = true;
    for (std::size_t i = 0; i < p.bonds.size(); ++i)
      if (!in_end[i] && p.bonds[i] == BondState::ordered) all = false;
    if (all) return DefectClass::problematic;
  }
  if (r.bottom == EndKind::boundary && r.lo == 0 && r.top == EndKind::ordered &&
      (r.frustrated == 1 || r.frustrated == 2) && r.cube_count() == r.frustrated + 1) {
    int disordered_verticals = 0;
    for (int corner = 0; corner < 4; ++corner) disordered_verticals += !p.v_ordered(0, corner);
    if (disordered_verticals >= 3 && r.blobs.size() == 1) {
      const auto& b = column_blobs[static_cast<std::size_t>(r.blobs.front())];
      if (b.plaquettes.size() == 1 && b.plaquettes.front().horizontal() && b.plaquettes.front().z == 0)
        return DefectClass::e_problematic;
    }
  }
  return DefectClass::non_problematic;
}

struct ColumnDefects {
  int cx = 0, cy = 0;
  std::vector<Blob> blobs;
  std::vector<DefectRecord> defects;  // upwards
  bool blob_split = false;  // some blob touched more than one defect
};

// Frustrated cubes of the column touching B, split into vertical runs, each
// extended through frustrated cubes to pure end cubes (or to the boundary),
// overlapping extensions merged.
inline ColumnDefects extract_and_extend_defects(const SpinConfig& config, const InterfaceData& d, const ColumnAssignment& a,
                                                int cx, int cy, bool validate = true) {
  const CubeGeometry g(d.spec);
  const int l = d.spec.l;
  ColumnDefects out{cx, cy, blobs_and_signs(d, a.at(cx, cy), cx, cy, validate), {}, false};
  if (out.blobs.empty()) return out;
  std::vector<char> surface_face(g.face_count(), 0);
  for (const auto& p : d.surface) surface_face[g.face(p)] = 1;
  auto frustrated = [&](int z) { return d.cubes.at(cx, cy, z) == CubeKind::frustrated; };
  std::vector<char> attached(static_cast<std::size_t>(l + 1), 0);
  for (int z = 0; z <= l; ++z) {
    if (!frustrated(z)) continue;
    g.for_each_face_neighbour(g.cube(cx, cy, z), [&](const Plaquette& p, std::size_t) {
      if (surface_face[g.face(p)]) attached[z] = 1;
    });
  }
  struct Segment {
    int lo, hi;
    EndKind bottom, top;
  };
  std::vector<Segment> segs;
  for (int z = 0; z <= l; ++z) {
    if (!attached[z] || (z > 0 && attached[z - 1])) continue;
    int top = z;
    while (top < l && attached[top + 1]) ++top;
    Segment s{z, top, EndKind::boundary, EndKind::boundary};
    while (s.lo >= 0 && frustrated(s.lo)) --s.lo;
    if (s.lo < 0) s.lo = 0;
    else s.bottom = d.cubes.at(cx, cy, s.lo) == CubeKind::ordered ? EndKind::ordered : EndKind::disordered;
    while (s.hi <= l && frustrated(s.hi)) ++s.hi;
    if (s.hi > l) s.hi = l;
    else s.top = d.cubes.at(cx, cy, s.hi) == CubeKind::ordered ? EndKind::ordered : EndKind::disordered;
    segs.push_back(s);
  }
  std::vector<Segment> merged;
  for (const auto& s : segs) {
    if (!merged.empty() && s.lo <= merged.back().hi) {
      if (s.hi > merged.back().hi) {
        merged.back().hi = s.hi;
        merged.back().top = s.top;
      }
    } else {
      merged.push_back(s);
    }
  }
  for (const auto& s : merged) {
    DefectRecord r;
    r.cx = cx;
    r.cy = cy;
    r.lo = s.lo;
    r.hi = s.hi;
    r.bottom = s.bottom;
    r.top = s.top;
    for (int z = s.lo; z <= s.hi; ++z) r.frustrated += frustrated(z);
    r.pattern = column_pattern(config, cx, cy, s.lo, s.hi);
    out.defects.push_back(std::move(r));
  }
  // A plaquette's cube in this column on the interface side locates its blob.
  for (std::size_t bi = 0; bi < out.blobs.size(); ++bi) {
    std::vector<int> hits;
    for (const auto& p : out.blobs[bi].plaquettes) {
      int z = p.z;
      if (p.horizontal() && !(z <= l && d.in_interface[g.cube(cx, cy, z)])) z = p.z - 1;
      for (std::size_t k = 0; k < out.defects.size(); ++k)
        if (z >= out.defects[k].lo && z <= out.defects[k].hi) hits.push_back(static_cast<int>(k));
    }
    std::sort(hits.begin(), hits.end());
    hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
    if (hits.size() != 1) out.blob_split = true;
    if (!hits.empty()) out.defects[static_cast<std::size_t>(hits.front())].blobs.push_back(static_cast<int>(bi));
  }
  for (auto& r : out.defects) {
    int s = 0;
    for (int bi : r.blobs) s += out.blobs[static_cast<std::size_t>(bi)].sign();
    r.sign_clamped = s < -1 || s > 1;
    r.sign = std::clamp(s, -1, 1);
    r.kind = classify_defect(r, out.blobs);
    if (r.bottom == EndKind::ordered) r.bottom_type = plaquette_type(plaquette_spins(config, cx, cy, r.bottom_plane()), d.spec.q);
    // A top-attached defect is capped by the constant top plane.
    if (r.top != EndKind::disordered) r.top_type = plaquette_type(plaquette_spins(config, cx, cy, r.top_plane()), d.spec.q);
  }
  return out;
}

// Every column holding at least two plaquettes of B.
inline std::vector<ColumnDefects> extract_all_defects(const SpinConfig& config, const InterfaceData& d, bool validate = true) {
  const auto a = assign_to_columns(d);
  std::vector<ColumnDefects> out;
  for (int y = 0; y < d.spec.n; ++y)
    for (int x = 0; x < d.spec.n; ++x)
      if (a.at(x, y).size() >= 2) out.push_back(extract_and_extend_defects(config, d, a, x, y, validate));
  return out;
}

struct DefectPair {
  int first = -1, second = -1;  // indices into the column's defect list
  bool problematic = false;
};

struct Pairing {
  std::vector<DefectPair> pairs;
  std::optional<int> unpaired;
  std::vector<int> signed_defects, neutral_defects;  // G_1..G_{2k-1}, H_1..H_l
  long problematic_pairs() const {
    return std::count_if(pairs.begin(), pairs.end(), [](const DefectPair& p) { return p.problematic; });
  }
};

inline bool is_problematic(DefectClass c) { return c != DefectClass::non_problematic; }

// Signed defects pair outside-in, (G_1, G_{2k-1}), (G_2, G_{2k-2}), ...;
// neutral ones consecutively; an odd neutral out pairs with G_k.
inline Pairing pair_defects(const std::vector<int>& signs, const std::vector<DefectClass>& kinds) {
  Pairing p;
  for (std::size_t i = 0; i < signs.size(); ++i)
    (signs[i] != 0 ? p.signed_defects : p.neutral_defects).push_back(static_cast<int>(i));
  const auto& g = p.signed_defects;
  if (g.size() % 2 == 0) throw StructureError("even number of signed defects: " + std::to_string(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const int want = i % 2 == 0 ? -1 : 1;
    if (signs[static_cast<std::size_t>(g[i])] != want) throw StructureError("signed defects do not alternate from -");
  }
  auto make = [&](int a, int b) {
    return DefectPair{a, b, is_problematic(kinds[static_cast<std::size_t>(a)]) && is_problematic(kinds[static_cast<std::size_t>(b)])};
  };
  const std::size_t k = (g.size() + 1) / 2;
  for (std::size_t i = 0; i + 1 < k; ++i) p.pairs.push_back(make(g[i], g[g.size() - 1 - i]));
  const auto& h = p.neutral_defects;
  for (std::size_t i = 0; i + 1 < h.size(); i += 2) p.pairs.push_back(make(h[i], h[i + 1]));
  if (h.size() % 2 == 1) p.pairs.push_back(make(h.back(), g[k - 1]));
  else p.unpaired = g[k - 1];
  return p;
}

inline Pairing pair_defects(const std::vector<DefectRecord>& defects) {
  std::vector<int> signs;
  std::vector<DefectClass> kinds;
  for (const auto& r : defects) {
    signs.push_back(r.sign);
    kinds.push_back(r.kind);
  }
  return pair_defects(signs, kinds);
}

// Slab [lo, hi] of site planes; rotation by `shift` then reflection z -> lo + hi - z.
struct GluePlan {
  int lo = 0, hi = 0;
  int shift = 0;
};

inline GluePlan plan_glue(const SpinConfig& config, const DefectRecord& lower, const DefectRecord& upper) {
  const auto& spec = config.spec();
  if (lower.cx != upper.cx || lower.cy != upper.cy) throw StructureError("defects lie in different columns");
  if (!is_problematic(lower.kind) || !is_problematic(upper.kind)) throw StructureError("pair is not problematic");
  if (lower.top != EndKind::ordered || upper.top != EndKind::ordered)
    throw StructureError("both defects need an ordered top end cube");
  GluePlan plan;
  plan.lo = lower.kind == DefectClass::e_problematic ? 1 : lower.bottom_plane() + 2;
  plan.hi = upper.bottom_plane();
  if (plan.lo < 1 || plan.hi > spec.l || plan.lo > plan.hi)
    throw StructureError("glue slab [" + std::to_string(plan.lo) + ", " + std::to_string(plan.hi) + "] outside the free layers");
  const int s = dominant_value(plaquette_spins(config, lower.cx, lower.cy, lower.top_plane()), spec.q);
  const int s2 = dominant_value(plaquette_spins(config, upper.cx, upper.cy, upper.top_plane()), spec.q);
  plan.shift = wrap(s2 - s, spec.q);
  return plan;
}

inline SpinConfig apply_glue(const SpinConfig& config, const GluePlan& plan) {
  if (plan.lo < 1 || plan.hi > config.spec().l || plan.lo > plan.hi) throw StructureError("glue slab outside the free layers");
  SpinConfig out = config;
  const int n = config.spec().n;
  for (int z = plan.lo; z <= plan.hi; ++z)
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) out.set(x, y, z, config.at(x, y, plan.lo + plan.hi - z) + plan.shift);
  return out;
}

inline SpinConfig invert_glue(const SpinConfig& glued, const GluePlan& plan) {
  return apply_glue(glued, GluePlan{plan.lo, plan.hi, wrap(-plan.shift, glued.spec().q)});
}

struct GlueResult {
  GluePlan plan;
  SpinConfig config;
  long energy_gain = 0;  // H(sigma) - H(Phi(sigma))
};

inline GlueResult glue_pair(const SpinConfig& config, const DefectRecord& lower, const DefectRecord& upper) {
  const auto plan = plan_glue(config, lower, upper);
  auto out = apply_glue(config, plan);
  const long gain = total_energy(config) - total_energy(out);
  return {plan, std::move(out), gain};
}

}  // namespace clocklab
