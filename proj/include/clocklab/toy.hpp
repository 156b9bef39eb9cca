#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "rng.hpp"

// The R x R torus toy model. Kept in its own namespace: its K and Q are not
// the defect counts.
namespace clocklab::toy {

using Rational = boost::rational<long long>;
using Subset = std::uint64_t;  // bit y*R + x

struct NotInvariant : std::invalid_argument {
  int tx, ty;
  Subset witness;
  NotInvariant(int x, int y, Subset w)
      : std::invalid_argument("measure is not translation invariant: shift (" + std::to_string(x) + "," + std::to_string(y) +
                              ") changes the weight of subset " + std::to_string(w)),
        tx(x), ty(y), witness(w) {}
};

inline void check_r(int r) {
  if (r < 1 || r > 8) throw std::invalid_argument("torus side must be in 1..8");
}

inline int popcount(Subset s) { return __builtin_popcountll(s); }

inline Subset translate(Subset s, int tx, int ty, int r) {
  Subset out = 0;
  for (int y = 0; y < r; ++y)
    for (int x = 0; x < r; ++x)
      if ((s >> (y * r + x)) & 1) out |= Subset{1} << (((y + ty) % r) * r + (x + tx) % r);
  return out;
}

inline std::set<Subset> orbit(Subset s, int r) {
  std::set<Subset> o;
  for (int ty = 0; ty < r; ++ty)
    for (int tx = 0; tx < r; ++tx) o.insert(translate(s, tx, ty, r));
  return o;
}

inline bool periodic(Subset s, int r) { return static_cast<int>(orbit(s, r).size()) < r * r; }

// A probability measure on {0,1}^{T_R}, given by its atoms.
struct Measure {
  int r = 1;
  std::map<Subset, Rational> atoms;

  Rational total() const {
    Rational t(0);
    for (const auto& [s, w] : atoms) t += w;
    return t;
  }
  Rational at(Subset s) const {
    auto it = atoms.find(s);
    return it == atoms.end() ? Rational(0) : it->second;
  }
};

// Weight w_i spread uniformly over the distinct translates of X_i, then
// normalized.
inline Measure orbit_mixture(int r, const std::vector<Subset>& xs, const std::vector<Rational>& ws) {
  check_r(r);
  if (xs.size() != ws.size() || xs.empty()) throw std::invalid_argument("need one positive weight per subset");
  Measure mu{r, {}};
  Rational sum(0);
  for (const auto& w : ws) sum += w;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto o = orbit(xs[i], r);
    const Rational each = ws[i] / sum / Rational(static_cast<long long>(o.size()));
    for (auto s : o) mu.atoms[s] += each;
  }
  return mu;
}

// First (shift, subset) whose weight moves under translation.
inline void require_invariant(const Measure& mu) {
  for (const auto& [s, w] : mu.atoms)
    for (int ty = 0; ty < mu.r; ++ty)
      for (int tx = 0; tx < mu.r; ++tx)
        if (mu.at(translate(s, tx, ty, mu.r)) != w) throw NotInvariant(tx, ty, s);
}

struct IdentityRow {
  int k = 0;
  Rational lhs, rhs;  // mu(xi_0 = 1, sum = k) and (k / R^2) mu(sum = k)
  bool holds() const { return lhs == rhs; }
};

inline std::vector<IdentityRow> identity_check(const Measure& mu) {
  require_invariant(mu);
  const int r2 = mu.r * mu.r;
  std::vector<IdentityRow> rows(static_cast<std::size_t>(r2 + 1));
  for (int k = 0; k <= r2; ++k) rows[k].k = k;
  std::vector<Rational> level(static_cast<std::size_t>(r2 + 1), Rational(0));
  for (const auto& [s, w] : mu.atoms) {
    const int k = popcount(s);
    level[k] += w;
    if (s & 1) rows[k].lhs += w;
  }
  for (int k = 0; k <= r2; ++k) rows[k].rhs = Rational(k, r2) * level[k];
  return rows;
}

inline bool identity_holds(const Measure& mu) {
  for (const auto& row : identity_check(mu))
    if (!row.holds()) return false;
  return true;
}

// Union of the <t>-orbits of a few random points for a random nonzero shift t:
// invariant under t, hence periodic.
inline Subset random_periodic(int r, SplitMix& rng) {
  int tx = 0, ty = 0;
  while (tx == 0 && ty == 0) {
    tx = static_cast<int>(rng.below(static_cast<std::uint32_t>(r)));
    ty = static_cast<int>(rng.below(static_cast<std::uint32_t>(r)));
  }
  Subset s = 0;
  const int seeds = 1 + static_cast<int>(rng.below(static_cast<std::uint32_t>(r)));
  for (int i = 0; i < seeds; ++i) {
    int x = static_cast<int>(rng.below(static_cast<std::uint32_t>(r)));
    int y = static_cast<int>(rng.below(static_cast<std::uint32_t>(r)));
    for (int step = 0; step < r * r; ++step) {
      s |= Subset{1} << (y * r + x);
      x = (x + tx) % r;
      y = (y + ty) % r;
    }
  }
  return s;
}

inline Subset random_subset(int r, SplitMix& rng) {
  Subset s = 0;
  for (int i = 0; i < r * r; ++i)
    if (rng.coin()) s |= Subset{1} << i;
  return s;
}

struct MixtureSpec {
  std::vector<Subset> xs;
  std::vector<Rational> ws;
  int periodic_count = 0;
};

// Two to five orbits, the first always periodic, weights in 1..9.
inline MixtureSpec random_mixture(int r, SplitMix& rng) {
  MixtureSpec m;
  const int parts = 2 + static_cast<int>(rng.below(4));
  for (int i = 0; i < parts; ++i) {
    const Subset s = i == 0 || rng.coin() ? random_periodic(r, rng) : random_subset(r, rng);
    m.xs.push_back(s);
    m.ws.push_back(Rational(1 + static_cast<long long>(rng.below(9))));
    m.periodic_count += periodic(s, r);
  }
  return m;
}

struct ToyReport {
  int r = 0, trials = 0, passed = 0, periodic_subsets = 0;
  bool ok() const { return trials > 0 && passed == trials; }
};

inline ToyReport run_toy_check(int r, int trials, std::uint64_t seed) {
  check_r(r);
  SplitMix rng(seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint32_t>(r)));
  ToyReport rep{r, 0, 0, 0};
  for (int t = 0; t < trials; ++t) {
    const auto m = random_mixture(r, rng);
    rep.periodic_subsets += m.periodic_count;
    ++rep.trials;
    rep.passed += identity_holds(orbit_mixture(r, m.xs, m.ws));
  }
  return rep;
}

// log of C(R^2, M) alpha^M with M = b R^2 (rounded up), and the resulting
// bound b + C(R^2, M) alpha^M on mu(xi_0 = 1).
inline double log_tail(int r, double alpha, double b) {
  const double n = static_cast<double>(r) * r, m = std::ceil(b * n);
  return std::lgamma(n + 1) - std::lgamma(m + 1) - std::lgamma(n - m + 1) + m * std::log(alpha);
}

inline double density_bound(int r, double alpha, double b) { return b + std::exp(log_tail(r, alpha, b)); }

}  // namespace clocklab::toy
