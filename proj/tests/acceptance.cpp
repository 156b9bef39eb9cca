// Acceptance run: one PASS/FAIL line per criterion 1-9.
//
// Exit status is 0 when the failing set equals --expect-fail exactly, so a
// known red criterion stays visible in the report without masking
// regressions, and an unexpected pass also fails the run.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "clocklab/clocklab.hpp"

using namespace clocklab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

std::string rat(const Rational& r) {
  std::ostringstream o;
  o << r;
  return o.str();
}

// Pinned tolerances.
constexpr double kTvBeta1 = 0.02, kTvBeta0 = 0.01;
constexpr long kTvSweeps = 1000000;
constexpr double kTvSeconds = 120;
constexpr int kSampledOverlays = 10000;
constexpr int kPlanted = 10000;
constexpr int kToyTrials = 100, kToyPeriodic = 10;

Outcome sampler_exactness() {
  const LatticeSpec spec{2, 1, 5};
  const auto t0 = Clock::now();
  const double tv1 = total_variation(empirical_distribution(spec, 1.0, kTvSweeps, 101), exact_distribution(spec, 1.0).probability);
  const double secs = seconds_since(t0);
  const double tv0 = total_variation(empirical_distribution(spec, 0.0, kTvSweeps, 202), exact_distribution(spec, 0.0).probability);
  const bool ok = tv1 <= kTvBeta1 && secs < kTvSeconds && tv0 < kTvBeta0;
  return {ok, fmt("625 states, %ld sweeps: TV(beta=1) %.4f <= %.2f in %.1fs; TV(beta=0) %.4f < %.2f", kTvSweeps, tv1, kTvBeta1, secs, tv0,
                  kTvBeta0)};
}

VerifyReport exhaustive_two(int threads) {
  std::vector<VerifyReport> parts(static_cast<std::size_t>(threads));
  std::vector<std::thread> pool;
  for (int i = 0; i < threads; ++i) pool.emplace_back([&, i] { parts[static_cast<std::size_t>(i)] = verify_shard(2, 4, i, threads); });
  for (auto& t : pool) t.join();
  VerifyReport all;
  for (const auto& p : parts) all.merge(p);
  return all;
}

Outcome identity_suite(const VerifyReport& rep, double secs) {
  const bool ok = rep.patterns >= 1000 && rep.identity_failures == 0 && rep.max_abs_residual == 0;
  return {ok, fmt("%ld admissible patterns with L_slab <= 2 at N=4, %ld nonzero residuals (max |r| %ld), %.1fs", rep.patterns,
                  rep.identity_failures, rep.max_abs_residual, secs)};
}

Outcome inequality_suite(const VerifyReport& rep) {
  bool ok = rep.violations() == 0;
  std::string parts;
  for (const char* k : {"components", "height", "slack_d01", "equality_d01", "bulk_dd", "boundary_dd"}) {
    const auto it = rep.inequalities.find(k);
    const long checked = it == rep.inequalities.end() ? 0 : it->second.checked;
    const long bad = it == rep.inequalities.end() ? 0 : it->second.violations;
    ok &= checked > 0;
    parts += fmt(" %s %ld/%ld", k, bad, checked);
  }
  const auto cls = [&](const char* c) {
    const auto it = rep.per_class.find(c);
    return it == rep.per_class.end() ? 0L : it->second;
  };
  // Equality in the d <= 1 bound exactly for the problematic patterns; two of
  // them exist at this height, and the e-problematic class is populated.
  ok &= cls("problematic") == 2 && cls("e-problematic") > 0;
  return {ok, fmt("violations/checked:%s; problematic %ld, e-problematic %ld", parts.c_str(), cls("problematic"), cls("e-problematic"))};
}

Outcome explicit_value() {
  bool ok = true;
  std::string txt;
  for (int n : {2, 4, 8}) {
    const auto s = defect_stats(explicit_boundary_m1(), n);
    const Rational N2(s.n2);
    const Rational lhs = Rational(2 * s.D) - Rational(9, 2) * Rational(s.K);
    const Rational rhs = 4 * N2 + N2 / 8;
    ok &= lhs == rhs && Rational(s.Db) == Rational(3, 4) * N2 && s.m_total == s.n2;
    txt += fmt(" N=%d: 2D-9K/2 = %s vs %s;", n, rat(lhs).c_str(), rat(rhs).c_str());
  }
  return {ok, "boundary d=2, m=1, D^b=3N^2/4:" + txt};
}

Outcome glued_pair() {
  long checked = 0, bad = 0, steps_bad = 0;
  Rational worst(1000000);
  auto run = [&](int n, int lt, const std::vector<bool>& v) {
    const auto g = check_glued_pair(glued_field(n, lt, v));
    ++checked;
    bad += !g.holds();
    steps_bad += !(g.ends_disconnected && g.disconnected_bound && g.kq_bound);
    if (g.margin() < worst) worst = g.margin();
  };
  for (int lt : {3, 4}) {
    for (unsigned mask = 0; mask < 16; ++mask) {
      std::vector<bool> v(4);
      for (int i = 0; i < 4; ++i) v[static_cast<std::size_t>(i)] = (mask >> i) & 1;
      run(2, lt, v);
    }
    SplitMix rng(500 + static_cast<std::uint64_t>(lt));
    for (int t = 0; t < kSampledOverlays; ++t) {
      std::vector<bool> v(16);
      for (int i = 0; i < 16; ++i) v[static_cast<std::size_t>(i)] = rng.coin();
      run(4, lt, v);
    }
  }
  const int n3 = glued_threshold_n(3), n4 = glued_threshold_n(4);
  return {bad == 0, fmt("%ld/%ld overlays violate (N=2 all 16, N=4 %d sampled, L~ in {3,4}); worst margin %s N^2; "
                        "proof steps failing %ld; bound first holds at N=%d (L~=3), N=%d (L~=4)",
                        bad, checked, kSampledOverlays, rat(worst).c_str(), steps_bad, n3, n4)};
}

Outcome gluing_transformation() {
  const LatticeSpec spec{4, 12, 64};
  SplitMix rng(606);
  long round_trip = 0, energy_ok = 0, skipped = 0;
  long min_gain = 1L << 40;
  const long floor = -spec.n * spec.n / 4;
  for (int t = 0; t < kPlanted; ++t) {
    const auto pl = plant_pair(spec, rng);
    const auto d = extract_interface(pl.config);
    const auto cd = extract_and_extend_defects(pl.config, d, assign_to_columns(d), static_cast<int>(rng.below(4)), static_cast<int>(rng.below(4)));
    const auto pairing = pair_defects(cd.defects);
    const DefectPair* pp = nullptr;
    for (const auto& p : pairing.pairs)
      if (p.problematic) pp = &p;
    if (!pp) {
      ++skipped;
      continue;
    }
    const auto res = glue_pair(pl.config, cd.defects[static_cast<std::size_t>(pp->first)], cd.defects[static_cast<std::size_t>(pp->second)]);
    round_trip += invert_glue(res.config, res.plan) == pl.config && boundaries_match(res.config, pl.config);
    energy_ok += res.energy_gain >= floor;
    min_gain = std::min(min_gain, res.energy_gain);
  }
  const bool ok = skipped == 0 && round_trip == kPlanted && energy_ok == kPlanted;
  return {ok, fmt("%d planted configs (N=4, L=12, q=64): inverse exact %ld, H-H(Phi) >= %ld in %ld (min %ld), no pair found %ld", kPlanted,
                  round_trip, floor, energy_ok, min_gain, skipped)};
}

Outcome toy_identity() {
  bool ok = true;
  std::string txt;
  for (int r : {2, 3, 4}) {
    const auto rep = toy::run_toy_check(r, kToyTrials, 7000);
    ok &= rep.trials == kToyTrials && rep.ok() && rep.periodic_subsets >= kToyPeriodic;
    txt += fmt(" R=%d %d/%d exact, %d periodic;", r, rep.passed, rep.trials, rep.periodic_subsets);
  }
  return {ok, "orbit mixtures:" + txt};
}

Outcome bound_formulas() {
  bool mono = true;
  double prev_a = INFINITY, prev_g = INFINITY;
  for (int q = 32; q <= 4096; ++q) {
    const double a = a_of_q(q, kDefaultAlphaPrime), g = log_glued_a(q);
    mono &= a < prev_a && g < prev_g;
    prev_a = a;
    prev_g = g;
  }
  const BigInt q0 = glued_a_threshold();
  const bool first = log_glued_a_big(q0) < 0 && log_glued_a_big(q0 - 1) >= 0;
  std::ostringstream qs;
  qs << q0;
  return {mono && first, fmt("a(64)=%.6g (alpha'=1/72), glued a(64)=%.6g, glued a(4096)=%.6g; both strictly decreasing on [32,4096]: %s; "
                             "smallest q with glued a(q)<1: %s",
                             a_of_q(64, kDefaultAlphaPrime), glued_a(64), glued_a(4096), mono ? "yes" : "no", qs.str().c_str())};
}

struct Rigidity {
  Outcome a, b, c;
};

Rigidity interface_statistics(const std::string& dir, int threads) {
  const auto t0 = Clock::now();
  ExperimentPlan grid;
  grid.ns = {16};
  grid.ls = {16};
  grid.qs = {8, 64};
  grid.betas = {0.5, 1.0, 1.5, 2.0, 2.5};
  grid.seed = 9000;
  grid.sweeps = 3000;
  grid.burn_in = 1000;
  grid.thinning = 20;
  const auto rep = run_experiment(grid, (fs::path(dir) / "rigidity").string(), threads);
  const auto rows = read_results((fs::path(dir) / "rigidity" / "results.csv").string());

  Rigidity out;
  const auto comps = observable_values(rows, "interface_components");
  long with = 0;
  for (double c : comps) with += c >= 1;
  out.a = {rep.ok() && comps.size() >= 1000 && with == static_cast<long>(comps.size()),
           fmt("%ld of %zu sampled configs (N=16, L=16, q in {8,64}, 5 betas) hold >= 1 3D interface", with, comps.size())};

  const auto means = point_means(rows, "rigidity_fraction");
  bool all = rep.ok();
  std::string txt;
  for (double b : grid.betas) {
    const double m8 = means.at({16, 16, 8, b}).first, m64 = means.at({16, 16, 64, b}).first;
    all &= m64 > m8;
    txt += fmt(" b=%.1f %.4f vs %.4f;", b, m64, m8);
  }
  out.b = {all, "mean |R|/N^2 q=64 vs q=8:" + txt};

  // Ordered side of the q=64 transition, where the flat interface dominates.
  ExperimentPlan scan;
  scan.ns = {8};
  scan.ls = {8};
  scan.qs = {64};
  scan.betas = {1.4};
  scan.chains = 4;
  scan.seed = 9100;
  scan.sweeps = 2500;
  scan.burn_in = 500;
  scan.thinning = 4;
  const auto srep = run_experiment(scan, (fs::path(dir) / "peierls").string(), threads);
  const auto w = observable_values(read_results((fs::path(dir) / "peierls" / "results.csv").string()), "weight");
  const auto t = peierls_scan(w, 12, 64.0);
  const double secs = seconds_since(t0);
  out.c = {srep.ok() && t.enough && t.non_increasing() && t.slope < 0 && t.frequency(1) < 0.5,
           fmt("q=64, N=8, L=8, beta=1.4, %ld samples: P(w>=1)=%.4f P(w>=2)=%.4f P(w>=4)=%.4f, non-increasing %s, log slope %.3f; "
               "grid+scan %.0fs",
               t.samples, t.frequency(1), t.frequency(2), t.frequency(4), t.non_increasing() ? "yes" : "no", t.slope, secs)};
  return out;
}

std::set<std::string> parse_ids(const std::string& s) {
  std::set<std::string> out;
  std::stringstream in(s);
  for (std::string tok; std::getline(in, tok, ',');)
    if (!tok.empty()) out.insert(tok);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clocklab acceptance run"};
  std::string out_dir = "acceptance_out", expect = "", report;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  app.add_option("--out", out_dir, "scratch directory for experiment files");
  app.add_option("--expect-fail", expect, "comma list of criteria known to fail, e.g. 5,9b");
  app.add_option("--report", report, "also write the lines to this file");
  app.add_option("--threads", threads)->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  std::vector<std::pair<std::string, Outcome>> lines;
  auto emit = [&](const std::string& id, const Outcome& o) {
    lines.emplace_back(id, o);
    std::cout << "criterion " << id << ' ' << (o.pass ? "PASS" : "FAIL") << ": " << o.detail << std::endl;
  };

  try {
    emit("1", sampler_exactness());
    const auto t0 = Clock::now();
    const auto rep = exhaustive_two(threads);
    emit("2", identity_suite(rep, seconds_since(t0)));
    emit("3", inequality_suite(rep));
    emit("4", explicit_value());
    emit("5", glued_pair());
    emit("6", gluing_transformation());
    emit("7", toy_identity());
    emit("8", bound_formulas());
    const auto r = interface_statistics(out_dir, threads);
    emit("9a", r.a);
    emit("9b", r.b);
    emit("9c", r.c);
  } catch (const std::exception& e) {
    std::cout << "error: " << e.what() << std::endl;
    return 2;
  }

  std::set<std::string> failed;
  for (const auto& [id, o] : lines)
    if (!o.pass) failed.insert(id);
  const auto expected = parse_ids(expect);
  std::string fl;
  for (const auto& id : failed) fl += (fl.empty() ? "" : ",") + id;
  const bool match = failed == expected;
  const std::string summary = fmt("summary: %zu/%zu pass; failing {%s}; expected failing {%s}: %s", lines.size() - failed.size(), lines.size(),
                                  fl.c_str(), expect.c_str(), match ? "as expected" : "MISMATCH");
  std::cout << summary << std::endl;
  if (!report.empty()) {
    std::ofstream f(report);
    for (const auto& [id, o] : lines) f << "criterion " << id << ' ' << (o.pass ? "PASS" : "FAIL") << ": " << o.detail << '\n';
    f << summary << '\n';
  }
  return match ? 0 : 1;
}
