#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "reflection.hpp"

namespace clocklab {

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Boundary-condition cases of a defect slab, plus the glued pair.
enum class BoundCase { od, oo, dd, ddb, glued };

inline std::string case_name(BoundCase c) {
  switch (c) {
    case BoundCase::od: return "od";
    case BoundCase::oo: return "oo";
    case BoundCase::dd: return "dd";
    case BoundCase::ddb: return "ddb";
    case BoundCase::glued: return "glued";
  }
  return "?";
}

inline BoundCase parse_case(const std::string& s) {
  for (auto c : {BoundCase::od, BoundCase::oo, BoundCase::dd, BoundCase::ddb, BoundCase::glued})
    if (case_name(c) == s) return c;
  throw InvalidParams("unknown bound case '" + s + "' (od, oo, dd, ddb, glued)");
}

inline BoundCase case_of(const DefectStats& s) {
  if (s.boundary) return s.d == 2 ? BoundCase::ddb : BoundCase::od;
  return s.d == 2 ? BoundCase::dd : s.d == 1 ? BoundCase::od : BoundCase::oo;
}

// alpha' = 1/72 comes from the m >= 3 constant 1/6 of the d <= 1 bound:
// 2D - 6(K+Q) >= 2N^2 + mN^2/6 gives (D - N^2)/3 - K - Q >= 2 (1/72) m N^2.
inline constexpr double kDefaultAlphaPrime = 1.0 / 72.0;

struct BoundParams {
  double q = 64;
  double beta = 1;
  double alpha_prime = kDefaultAlphaPrime;

  void validate() const {
    if (!(q > 0) || !(beta >= 0) || !(alpha_prime > 0)) throw InvalidParams("q, alpha' must be positive and beta non-negative");
  }
};

// Exponent t of the regime switch e^beta = q^t.
inline double regime_exponent(BoundCase c, int l) {
  switch (c) {
    case BoundCase::od:
    case BoundCase::oo: return 1.0 / 3.0;
    case BoundCase::dd: return l / (3.0 * l - 1.0);
    case BoundCase::ddb: return l / (3.0 * l - 0.75);
    case BoundCase::glued: return l / (3.0 * l + 1.0);
  }
  return 0;
}

// Energy of the ordered configuration used in the lower bound, in units of N^2.
inline double ground_energy(BoundCase c, int l) {
  switch (c) {
    case BoundCase::od:
    case BoundCase::oo: return 3.0 * l;
    case BoundCase::dd: return 3.0 * l - 1.0;
    case BoundCase::ddb: return 3.0 * l - 0.75;
    case BoundCase::glued: return 3.0 * l + 1.0;
  }
  return 0;
}

inline double log_add_exp(double a, double b) {
  if (a == -INFINITY) return b;
  if (b == -INFINITY) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// log of 3^{2mN^2} q^{K+Q+2LN} e^{beta((3L+1)N^2 - D)}.
inline double log_upper(const DefectStats& s, const BoundParams& p) {
  const double n2 = static_cast<double>(s.n2);
  return 2.0 * static_cast<double>(s.m_total) * std::log(3.0) +
         static_cast<double>(s.K + s.Q + 2L * s.l * s.n) * std::log(p.q) +
         p.beta * ((3.0 * s.l + 1.0) * n2 - static_cast<double>(s.D));
}

// Glued upper bound 3^{L N^2} q^{K+Q+2LN} e^{beta((3L+1)N^2 - D)}.
inline double log_upper_glued(const DefectStats& s, const BoundParams& p) {
  const double n2 = static_cast<double>(s.n2);
  return static_cast<double>(s.l) * n2 * std::log(3.0) +
         static_cast<double>(s.K + s.Q + 2L * s.l * s.n) * std::log(p.q) +
         p.beta * ((3.0 * s.l + 1.0) * n2 - static_cast<double>(s.D));
}

// The two lower-bound terms: (q-18)^{L N^2} and e^{beta E N^2}. The first is
// dropped (-inf) when q <= 18.
struct LowerTerms {
  double high = -INFINITY, low = -INFINITY;
  double total() const { return log_add_exp(high, low); }
};

inline LowerTerms log_lower(BoundCase c, int l, int n, const BoundParams& p) {
  const double n2 = static_cast<double>(n) * n;
  LowerTerms t;
  if (p.q > 18) t.high = l * n2 * std::log(p.q - 18);
  t.low = p.beta * ground_energy(c, l) * n2;
  return t;
}

// q-exponent E of the simplified ratio bound 9^{mN^2} q^{-E}, per case.
inline double ratio_exponent(BoundCase c, const DefectStats& s) {
  const double n2 = static_cast<double>(s.n2), D = static_cast<double>(s.D), kq = static_cast<double>(s.K + s.Q);
  const double L = s.l, lines = 2.0 * s.l * s.n;
  switch (c) {
    case BoundCase::od:
    case BoundCase::oo: return (D - n2) / 3.0 - kq - lines;
    case BoundCase::dd: return L / (3 * L - 1) * (D - 2 * n2 - (3 * L - 1) / L * kq) - lines;
    case BoundCase::ddb: return L / (6 * (L - 0.25)) * (2 * D - 3.5 * n2 - 6 * (L - 0.25) / L * kq) - lines;
    case BoundCase::glued: return L / (3 * L + 1) * (D - 0.25 * n2 - (3 * L + 1) / L * (kq + lines));
  }
  return 0;
}

inline double a_of_q(double q, double alpha_prime) {
  if (!(q > 0)) throw DomainError("a(q) needs q > 0");
  return 9.0 * std::pow(q, -alpha_prime);
}

inline double log_glued_a(double q) {
  if (!(q > 18)) throw DomainError("glued a(q) needs q > 18, got " + std::to_string(q));
  return 0.5 * (std::log(2.0) + 4.0 * std::log(3.0 * q / (q - 18.0)) - 0.06 * std::log(q));
}

inline double glued_a(double q) { return std::exp(log_glued_a(q)); }

using BigFloat = boost::multiprecision::cpp_bin_float_100;
using BigInt = boost::multiprecision::cpp_int;

inline BigFloat log_glued_a_big(const BigInt& q) {
  if (q <= 18) throw DomainError("glued a(q) needs q > 18");
  const BigFloat x(q);
  using boost::multiprecision::log;
  return (log(BigFloat(2)) + 4 * log(3 * x / (x - 18)) - BigFloat(3) / 50 * log(x)) / 2;
}

// Smallest integer q with glued a(q) < 1. The log is strictly decreasing for
// q > 18, so integer bisection is exact.
inline BigInt glued_a_threshold() {
  BigInt lo = 19, hi = 19;
  while (log_glued_a_big(hi) >= 0) hi *= 2;
  while (hi - lo > 1) {
    const BigInt mid = (lo + hi) / 2;
    if (log_glued_a_big(mid) < 0) hi = mid;
    else lo = mid;
  }
  return hi;
}

// Chessboard aggregate: prod_c p_c^{1/N^2}, in the log domain.
inline double chessboard_log(const std::vector<double>& log_column_probs, int n) {
  double s = 0;
  for (double v : log_column_probs) s += v;
  return s / (static_cast<double>(n) * n);
}

inline double peierls_log(double a, double w) { return w * std::log(a); }

// Per-site gap between the two lower-bound terms at the regime switch, in
// units of L N^2. For od/oo it equals log(q/(q-18)).
inline double regime_gap(BoundCase c, double q, int l, int n) {
  BoundParams p{q, regime_exponent(c, l) * std::log(q)};
  const auto t = log_lower(c, l, n, p);
  return (t.low - t.high) / (static_cast<double>(l) * n * n);
}

struct NamedValue {
  std::string name;
  double value;
};

// Everything the bounds subcommand prints for a given slab.
inline std::vector<NamedValue> evaluate_bounds(BoundCase c, const DefectStats& s, const BoundParams& p) {
  p.validate();
  std::vector<NamedValue> out;
  const double up = c == BoundCase::glued ? log_upper_glued(s, p) : log_upper(s, p);
  const auto lo = log_lower(c, s.l, s.n, p);
  out.push_back({"log_upper", up});
  out.push_back({"log_lower_high", lo.high});
  out.push_back({"log_lower_low", lo.low});
  out.push_back({"log_lower", lo.total()});
  out.push_back({"log_ratio_bound", up - lo.total()});
  out.push_back({"regime_exponent", regime_exponent(c, s.l)});
  out.push_back({"high_temperature", p.beta <= regime_exponent(c, s.l) * std::log(p.q) ? 1.0 : 0.0});
  out.push_back({"ratio_exponent", ratio_exponent(c, s)});
  out.push_back({"a", a_of_q(p.q, p.alpha_prime)});
  if (p.q > 18) out.push_back({"glued_a", glued_a(p.q)});
  return out;
}

// Representative slab for each case when none is supplied: the all-disordered
// glued slab for glued, the explicit m = 1 pattern for ddb, else the first
// non-problematic pattern drawn with a fixed seed.
inline DefectStats representative_stats(BoundCase c, int n) {
  if (c == BoundCase::glued) return defect_stats(glued_field(n, 3, std::vector<bool>(static_cast<std::size_t>(n * n), false)));
  if (c == BoundCase::ddb) return defect_stats(explicit_boundary_m1(), n);
  PatternFamily fam = c == BoundCase::od ? PatternFamily{EndKind::disordered, EndKind::ordered}
                      : c == BoundCase::dd ? PatternFamily{EndKind::disordered, EndKind::disordered}
                                           : PatternFamily{EndKind::ordered, EndKind::ordered};
  std::optional<DefectStats> first;
  for (int l = 1; l <= kExhaustiveCap && !first; ++l)
    sample_patterns(l, fam, 20000, 1, [&](const DefectPattern& p) {
      if (!first && classify_pattern(p) == DefectClass::non_problematic) first = defect_stats(p, n);
    });
  return *first;
}

}  // namespace clocklab
