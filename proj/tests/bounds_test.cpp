#include <gtest/gtest.h>

#include <cmath>

#include "clocklab/bounds.hpp"

using namespace clocklab;

namespace {

double rel_close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

std::vector<DefectStats> sampled_stats(PatternFamily fam, int n, int want) {
  std::vector<DefectStats> out;
  for (int l = 1; l <= 3; ++l)
    sample_patterns(l, fam, 4000, 17 + l, [&](const DefectPattern& p) {
      if (static_cast<int>(out.size()) < want * l && classify_pattern(p) == DefectClass::non_problematic) out.push_back(defect_stats(p, n));
    });
  return out;
}

}  // namespace

TEST(Bounds, AOfQ) {
  EXPECT_DOUBLE_EQ(a_of_q(1, 0.3), 9.0);
  EXPECT_DOUBLE_EQ(a_of_q(64, 1.0), 9.0 / 64);
  EXPECT_THROW(a_of_q(0, 0.1), DomainError);
}

TEST(Bounds, GluedAClosedForm) {
  const double q = 100;
  const double direct = std::sqrt(2 * std::pow(3 * q / (q - 18), 4) * std::pow(q, -3.0 / 50));
  EXPECT_TRUE(rel_close(glued_a(q), direct));
  EXPECT_THROW(glued_a(18), DomainError);
  EXPECT_THROW(glued_a(5), DomainError);
  EXPECT_THROW(log_glued_a_big(18), DomainError);
}

TEST(Bounds, GluedThreshold) {
  const BigInt q = glued_a_threshold();
  EXPECT_LT(log_glued_a_big(q), 0);
  EXPECT_GE(log_glued_a_big(q - 1), 0);
  // For large q the condition is 2 * 81 * q^{-3/50} < 1 up to a relative 18/q.
  using boost::multiprecision::log;
  const double lq = static_cast<double>(log(BigFloat(q)));
  EXPECT_NEAR(lq, std::log(162.0) / 0.06, 1e-6);
}

TEST(Bounds, MonotoneOnRange) {
  for (double ap : {kDefaultAlphaPrime, 0.05, 1.0}) {
    double prev = INFINITY;
    for (int q = 32; q <= 4096; ++q) {
      const double v = a_of_q(q, ap);
      ASSERT_LT(v, prev) << q;
      prev = v;
    }
  }
  double prev = INFINITY;
  for (int q = 32; q <= 4096; ++q) {
    const double v = log_glued_a(q);
    ASSERT_LT(v, prev) << q;
    prev = v;
  }
}

TEST(Bounds, LogAddExp) {
  for (double a : {-3.0, 0.0, 2.5})
    for (double b : {-1.0, 0.5, 4.0}) EXPECT_TRUE(rel_close(log_add_exp(a, b), std::log(std::exp(a) + std::exp(b))));
  EXPECT_EQ(log_add_exp(-INFINITY, 1.5), 1.5);
  EXPECT_EQ(log_add_exp(800.0, 1.0), 800.0);
}

// At the regime switch e^beta = q^t both lower-bound terms give the same
// closed-form exponent: upper / e^{beta E N^2} = 9^{mN^2} q^{-E}.
TEST(Bounds, SwitchPointMatchesClosedForm) {
  const double q = 64;
  struct Case {
    BoundCase c;
    PatternFamily fam;
  };
  for (auto [c, fam] : {Case{BoundCase::od, {EndKind::disordered, EndKind::ordered}}, Case{BoundCase::oo, {EndKind::ordered, EndKind::ordered}},
                        Case{BoundCase::dd, {EndKind::disordered, EndKind::disordered}},
                        Case{BoundCase::ddb, {EndKind::boundary, EndKind::disordered}}}) {
    const auto all = sampled_stats(fam, 4, 5);
    ASSERT_FALSE(all.empty()) << case_name(c);
    for (const auto& s : all) {
      ASSERT_EQ(case_of(s), c);
      BoundParams p{q, regime_exponent(c, s.l) * std::log(q)};
      const auto lo = log_lower(c, s.l, s.n, p);
      const double lhs = log_upper(s, p) - lo.low;
      const double rhs = static_cast<double>(s.m_total) * std::log(9.0) - ratio_exponent(c, s) * std::log(q);
      EXPECT_TRUE(rel_close(lhs, rhs)) << case_name(c) << " " << lhs << " " << rhs;
    }
  }
  for (int lt : {3, 4}) {
    const auto s = defect_stats(glued_field(4, lt, std::vector<bool>(16, false)));
    BoundParams p{q, regime_exponent(BoundCase::glued, lt) * std::log(q)};
    const double lhs = log_upper_glued(s, p) - log_lower(BoundCase::glued, s.l, s.n, p).low + 0.25 * p.beta * static_cast<double>(s.n2);
    const double rhs = lt * 16 * std::log(3.0) - ratio_exponent(BoundCase::glued, s) * std::log(q);
    EXPECT_TRUE(rel_close(lhs, rhs)) << lt;
  }
}

// For every beta the ratio bound sits below the closed form plus the dropped
// log(q/(q-18)) per site.
TEST(Bounds, RatioBelowClosedFormForAllBeta) {
  for (double q : {32.0, 64.0, 512.0})
    for (auto fam : pattern_families())
      for (const auto& s : sampled_stats(fam, 4, 4)) {
        const auto c = case_of(s);
        const double t = regime_exponent(c, s.l) * std::log(q);
        for (int i = 0; i <= 30; ++i) {
          BoundParams p{q, 3 * t * i / 30};
          const double ratio = log_upper(s, p) - log_lower(c, s.l, s.n, p).total();
          const double closed = static_cast<double>(s.m_total) * std::log(9.0) - ratio_exponent(c, s) * std::log(q) +
                               s.l * static_cast<double>(s.n2) * std::log(q / (q - 18));
          EXPECT_LE(ratio, closed + 1e-9) << case_name(c) << " beta " << p.beta;
        }
      }
}

TEST(Bounds, RegimeGapIsPerSiteConstant) {
  for (double q : {32.0, 64.0, 4096.0}) {
    const double g4 = regime_gap(BoundCase::od, q, 2, 4);
    EXPECT_TRUE(rel_close(g4, std::log(q / (q - 18))));
    for (int n : {8, 16}) EXPECT_TRUE(rel_close(regime_gap(BoundCase::od, q, 2, n), g4));
  }
  EXPECT_GT(regime_gap(BoundCase::od, 64, 2, 4), regime_gap(BoundCase::od, 4096, 2, 4));
  EXPECT_LT(regime_gap(BoundCase::od, 1e9, 2, 4), 1e-7);
}

TEST(Bounds, Chessboard) {
  const double lp = std::log(0.3);
  EXPECT_TRUE(rel_close(chessboard_log(std::vector<double>(16, lp), 4), lp));
  EXPECT_TRUE(rel_close(chessboard_log(std::vector<double>(4, lp), 4), lp / 4));
  EXPECT_EQ(chessboard_log({}, 4), 0.0);
}

TEST(Bounds, Peierls) {
  EXPECT_DOUBLE_EQ(peierls_log(0.5, 0), 0.0);
  double prev = 0;
  for (int w = 1; w < 10; ++w) {
    const double v = peierls_log(0.5, w);
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(Bounds, EvaluateNamesAndCases) {
  for (auto c : {BoundCase::od, BoundCase::oo, BoundCase::dd, BoundCase::ddb, BoundCase::glued}) {
    EXPECT_EQ(parse_case(case_name(c)), c);
    const auto s = representative_stats(c, 4);
    if (c != BoundCase::glued) {
      EXPECT_EQ(case_of(s), c);
    }
    const auto v = evaluate_bounds(c, s, BoundParams{64, 1.0});
    ASSERT_GE(v.size(), 9u);
    EXPECT_EQ(v.front().name, "log_upper");
  }
  EXPECT_THROW(parse_case("xx"), InvalidParams);
  EXPECT_THROW(evaluate_bounds(BoundCase::od, representative_stats(BoundCase::od, 4), BoundParams{64, -1}), InvalidParams);
}
