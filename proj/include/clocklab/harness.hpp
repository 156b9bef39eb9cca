#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "bounds.hpp"
#include "chain.hpp"

namespace clocklab {

namespace fs = std::filesystem;

struct PlanError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ExperimentPlan {
  std::vector<int> ns{8}, ls{8}, qs{64};
  std::vector<double> betas{1.0};
  int chains = 1;
  std::uint64_t seed = 1;
  long sweeps = 2000, burn_in = 500, thinning = 10;
  std::string out_dir = "clocklab_out";
  long snapshot_every = 0;

  void validate() const {
    if (ns.empty() || ls.empty() || qs.empty() || betas.empty()) throw PlanError("every grid list needs at least one value");
    if (chains < 1) throw PlanError("chains must be at least 1");
    ChainParams{betas.front(), sweeps, burn_in, seed, thinning}.validate();
    for (int n : ns)
      for (int l : ls)
        for (int q : qs) LatticeSpec{n, l, q}.validate();
    for (double b : betas)
      if (!(b >= 0)) throw PlanError("beta must be non-negative");
  }
};

namespace detail {

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
  std::vector<std::string> parts;
  boost::split(parts, text, boost::is_any_of(", \t"), boost::token_compress_on);
  std::vector<T> out;
  for (auto& p : parts) {
    boost::trim(p);
    if (p.empty()) continue;
    std::istringstream in(p);
    T v;
    if (!(in >> v) || !in.eof()) throw PlanError("bad value '" + p + "' for " + key);
    out.push_back(v);
  }
  if (out.empty()) throw PlanError(key + " is empty");
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline std::string beta_text(double b) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", b);
  return buf;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::ostringstream o;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) o << ", ";
    if constexpr (std::is_floating_point_v<T>) o << beta_text(v[i]);
    else o << v[i];
  }
  return o.str();
}

}  // namespace detail

// INI layout:
//   [grid]   n, l, q, beta (comma-separated lists)
//   [chain]  sweeps, burn_in, thinning, chains, seed
//   [output] dir, snapshot_every
inline ExperimentPlan parse_plan(std::istream& in) {
  boost::property_tree::ptree t;
  try {
    boost::property_tree::read_ini(in, t);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw PlanError(std::string("plan: ") + e.what());
  }
  static const std::set<std::string> known{"grid.n", "grid.l", "grid.q", "grid.beta", "chain.sweeps", "chain.burn_in",
                                           "chain.thinning", "chain.chains", "chain.seed", "output.dir", "output.snapshot_every"};
  for (const auto& [sec, body] : t)
    for (const auto& [key, v] : body)
      if (!known.count(sec + "." + key)) throw PlanError("plan: unknown key " + sec + "." + key);
  ExperimentPlan p;
  auto get = [&](const std::string& k) { return t.get_optional<std::string>(k); };
  if (auto v = get("grid.n")) p.ns = detail::parse_list<int>("grid.n", *v);
  if (auto v = get("grid.l")) p.ls = detail::parse_list<int>("grid.l", *v);
  if (auto v = get("grid.q")) p.qs = detail::parse_list<int>("grid.q", *v);
  if (auto v = get("grid.beta")) p.betas = detail::parse_list<double>("grid.beta", *v);
  try {
    p.sweeps = t.get<long>("chain.sweeps", p.sweeps);
    p.burn_in = t.get<long>("chain.burn_in", p.burn_in);
    p.thinning = t.get<long>("chain.thinning", p.thinning);
    p.chains = t.get<int>("chain.chains", p.chains);
    p.seed = t.get<std::uint64_t>("chain.seed", p.seed);
    p.snapshot_every = t.get<long>("output.snapshot_every", p.snapshot_every);
  } catch (const boost::property_tree::ptree_bad_data& e) {
    throw PlanError(std::string("plan: ") + e.what());
  }
  p.out_dir = t.get<std::string>("output.dir", p.out_dir);
  p.validate();
  return p;
}

inline ExperimentPlan load_plan(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open plan " + path);
  return parse_plan(f);
}

inline void write_plan(std::ostream& o, const ExperimentPlan& p) {
  o << "[grid]\nn = " << detail::join(p.ns) << "\nl = " << detail::join(p.ls) << "\nq = " << detail::join(p.qs)
    << "\nbeta = " << detail::join(p.betas) << "\n\n[chain]\nsweeps = " << p.sweeps << "\nburn_in = " << p.burn_in
    << "\nthinning = " << p.thinning << "\nchains = " << p.chains << "\nseed = " << p.seed << "\n\n[output]\ndir = " << p.out_dir
    << "\nsnapshot_every = " << p.snapshot_every << "\n";
}

struct GridPoint {
  int n, l, q;
  double beta;
  int chain;
  std::uint64_t seed;

  std::string key() const {
    std::ostringstream o;
    o << "n" << n << "_l" << l << "_q" << q << "_b" << detail::beta_text(beta) << "_c" << chain;
    return o.str();
  }
  auto order() const { return std::tuple(n, l, q, beta, chain); }
};

// Grid points in sorted order; each chain's seed is a hash of the plan seed
// and its grid coordinates.
inline std::vector<GridPoint> grid_points(const ExperimentPlan& p) {
  std::vector<GridPoint> out;
  for (int n : p.ns)
    for (int l : p.ls)
      for (int q : p.qs)
        for (double b : p.betas)
          for (int c = 0; c < p.chains; ++c) {
            std::uint64_t h = mix64(p.seed);
            for (std::uint64_t v : {std::uint64_t(n), std::uint64_t(l), std::uint64_t(q), std::uint64_t(std::llround(b * 1e6)), std::uint64_t(c)})
              h = mix64(h ^ v);
            out.push_back({n, l, q, b, c, h});
          }
  std::set<std::uint64_t> seen;
  for (const auto& g : out)
    if (!seen.insert(g.seed).second) throw PlanError("seed collision at " + g.key());
  return out;
}

struct ResultRow {
  int n = 0, l = 0, q = 0;
  double beta = 0;
  std::uint64_t seed = 0;
  long sweep = 0;
  std::string observable;
  double value = 0;
};

inline constexpr const char* kResultsHeader = "n,l,q,beta,seed,sweep,observable,value";

inline void write_row(std::ostream& o, const ResultRow& r) {
  o << r.n << ',' << r.l << ',' << r.q << ',' << detail::beta_text(r.beta) << ',' << r.seed << ',' << r.sweep << ',' << r.observable << ','
    << std::setprecision(17) << r.value << '\n';
}

inline std::vector<ResultRow> read_results(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open results " + path);
  std::string line;
  std::getline(f, line);
  if (line != "schema_version," + std::to_string(kCsvSchemaVersion)) throw IoError(path + ": unsupported schema line '" + line + "'");
  std::getline(f, line);
  if (line != kResultsHeader) throw IoError(path + ": unexpected header '" + line + "'");
  std::vector<ResultRow> rows;
  long lineno = 2;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> c;
    boost::split(c, line, boost::is_any_of(","));
    if (c.size() != 8) throw IoError(path + ":" + std::to_string(lineno) + ": expected 8 fields");
    try {
      rows.push_back({std::stoi(c[0]), std::stoi(c[1]), std::stoi(c[2]), std::stod(c[3]), std::stoull(c[4]), std::stol(c[5]), c[6], std::stod(c[7])});
    } catch (const std::exception&) {
      throw IoError(path + ":" + std::to_string(lineno) + ": malformed row");
    }
  }
  return rows;
}

// Observables of one configuration. The height pairs share M' = (0,0):
// adjacent M'' = (1,0), antipodal M'' = (N/2, N/2).
inline std::vector<std::pair<std::string, double>> sample_observables(const SpinConfig& c, long energy) {
  const auto d = extract_interface(c);
  const auto cw = ceilings_walls_heights(c.spec(), d.surface);
  const auto s = summarize(d, cw);
  const int n = c.spec().n;
  const double nn = static_cast<double>(n) * n;
  auto same = [&](int x, int y) {
    const auto& a = cw.heights.at(0, 0);
    const auto& b = cw.heights.at(x, y);
    return a && b && *a == *b ? 1.0 : 0.0;
  };
  return {{"energy", static_cast<double>(energy)},
          {"ordered_fraction", ordered_fraction(c).value()},
          {"rigidity_fraction", static_cast<double>(s.rigid_area) / nn},
          {"interface_components", static_cast<double>(s.interface_components)},
          {"contours", static_cast<double>(s.contours)},
          {"height_mode", static_cast<double>(s.height_mode.value_or(-1))},
          {"surface_size", static_cast<double>(s.surface_size)},
          {"weight", static_cast<double>(s.weight)},
          {"winding_walls", static_cast<double>(s.winding_walls)},
          {"height_eq_adjacent", same(1, 0)},
          {"height_eq_antipodal", same(n / 2, n / 2)}};
}

inline std::vector<ResultRow> run_point(const ExperimentPlan& plan, const GridPoint& g, const std::string& snapshot_dir = "") {
  const LatticeSpec spec{g.n, g.l, g.q};
  const ChainParams params{g.beta, plan.sweeps, plan.burn_in, g.seed, plan.thinning};
  ChainOptions opt;
  opt.interface_observables = false;
  opt.snapshot_every = snapshot_dir.empty() ? 0 : plan.snapshot_every;
  opt.snapshot_dir = snapshot_dir;
  std::vector<ResultRow> rows;
  const auto rep = run_chain(spec, params, opt, [&](const SpinConfig& c, const ChainSample& s) {
    for (auto& [name, v] : sample_observables(c, s.energy)) rows.push_back({g.n, g.l, g.q, g.beta, g.seed, s.sweep, name, v});
  });
  rows.push_back({g.n, g.l, g.q, g.beta, g.seed, plan.sweeps, "acceptance_rate", rep.acceptance_rate()});
  return rows;
}

inline void write_results(const std::string& path, const std::vector<ResultRow>& rows) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << "schema_version," << kCsvSchemaVersion << '\n' << kResultsHeader << '\n';
  for (const auto& r : rows) write_row(f, r);
  if (!f) throw IoError("write failed: " + path);
}

struct ExperimentReport {
  std::string dir;
  long points = 0, rows = 0;
  std::vector<std::string> failures;  // "key: message"
  bool ok() const { return failures.empty(); }
};

// Grid points run in a pool of `threads` workers, each into its own file
// under points/; results.csv is then merged in grid order.
inline ExperimentReport run_experiment(const ExperimentPlan& plan, const std::string& dir, int threads = 1) {
  plan.validate();
  const auto points = grid_points(plan);
  fs::create_directories(fs::path(dir) / "points");
  {
    std::ofstream f(fs::path(dir) / "plan.ini");
    write_plan(f, plan);
  }
  ExperimentReport rep{dir, static_cast<long>(points.size()), 0, {}};
  std::vector<std::string> errors(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < points.size();) {
      const auto& g = points[i];
      const auto file = fs::path(dir) / "points" / (g.key() + ".csv");
      try {
        const auto snaps = plan.snapshot_every > 0 ? (fs::path(dir) / "snapshots" / g.key()).string() : std::string();
        write_results(file.string(), run_point(plan, g, snaps));
      } catch (const std::exception& e) {
        errors[i] = e.what();
        fs::remove(file);
      }
    }
  };
  const int t = std::max(1, std::min<int>(threads, static_cast<int>(points.size())));
  std::vector<std::thread> pool;
  for (int k = 1; k < t; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::vector<ResultRow> all;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!errors[i].empty()) {
      rep.failures.push_back(points[i].key() + ": " + errors[i]);
      continue;
    }
    auto rows = read_results((fs::path(dir) / "points" / (points[i].key() + ".csv")).string());
    all.insert(all.end(), rows.begin(), rows.end());
  }
  rep.rows = static_cast<long>(all.size());
  write_results((fs::path(dir) / "results.csv").string(), all);
  if (!rep.failures.empty()) {
    std::ofstream f(fs::path(dir) / "failures.txt");
    for (const auto& m : rep.failures) f << m << '\n';
  }
  return rep;
}

// Mean of one observable per (n, l, q, beta), pooled over chains.
inline std::map<std::tuple<int, int, int, double>, std::pair<double, long>> point_means(const std::vector<ResultRow>& rows,
                                                                                       const std::string& observable) {
  std::map<std::tuple<int, int, int, double>, std::pair<double, long>> acc;
  for (const auto& r : rows) {
    if (r.observable != observable) continue;
    auto& a = acc[{r.n, r.l, r.q, r.beta}];
    a.first += r.value;
    a.second += 1;
  }
  for (auto& [k, a] : acc) a.first /= static_cast<double>(a.second);
  return acc;
}

struct PeierlsTable {
  long samples = 0;
  std::vector<long> at_least;  // index w: samples with w(B) >= w
  double slope = 0;  // least-squares slope of log frequency over w with nonzero counts
  double log_a = 0;  // log a(q) for comparison, when q is given
  bool enough = false;
  double frequency(int w) const { return samples ? static_cast<double>(at_least[static_cast<std::size_t>(w)]) / samples : 0; }
  bool non_increasing() const {
    for (std::size_t w = 1; w < at_least.size(); ++w)
      if (at_least[w] > at_least[w - 1]) return false;
    return true;
  }
};

inline constexpr long kPeierlsMinSamples = 50;

inline PeierlsTable peierls_scan(const std::vector<double>& weights, int w_max, std::optional<double> q = std::nullopt,
                                 double alpha_prime = kDefaultAlphaPrime) {
  PeierlsTable t;
  t.samples = static_cast<long>(weights.size());
  t.enough = t.samples >= kPeierlsMinSamples;
  t.at_least.assign(static_cast<std::size_t>(w_max + 1), 0);
  for (double w : weights)
    for (int k = 0; k <= w_max && k <= w; ++k) ++t.at_least[static_cast<std::size_t>(k)];
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long m = 0;
  for (int w = 0; w <= w_max; ++w) {
    if (t.at_least[static_cast<std::size_t>(w)] == 0) continue;
    const double y = std::log(t.frequency(w));
    sx += w;
    sy += y;
    sxx += static_cast<double>(w) * w;
    sxy += w * y;
    ++m;
  }
  if (m >= 2) t.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  if (q) t.log_a = std::log(a_of_q(*q, alpha_prime));
  return t;
}

inline std::vector<double> observable_values(const std::vector<ResultRow>& rows, const std::string& observable,
                                             std::optional<int> q = std::nullopt, std::optional<double> beta = std::nullopt) {
  std::vector<double> v;
  for (const auto& r : rows)
    if (r.observable == observable && (!q || r.q == *q) && (!beta || detail::beta_text(r.beta) == detail::beta_text(*beta))) v.push_back(r.value);
  return v;
}

inline bool same_bytes(const fs::path& a, const fs::path& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  return std::string(std::istreambuf_iterator<char>(fa), {}) == std::string(std::istreambuf_iterator<char>(fb), {});
}

struct ReplayReport {
  long compared = 0;
  std::vector<std::string> mismatches;
  bool ok() const { return compared > 0 && mismatches.empty(); }
};

// Re-run the plan saved in `dir` into `scratch` and compare every CSV byte for byte.
inline ReplayReport replay(const std::string& dir, const std::string& scratch, int threads = 1) {
  const auto plan = load_plan((fs::path(dir) / "plan.ini").string());
  fs::remove_all(scratch);
  run_experiment(plan, scratch, threads);
  ReplayReport r;
  std::vector<fs::path> files{fs::path("results.csv")};
  for (const auto& e : fs::directory_iterator(fs::path(dir) / "points")) files.push_back(fs::path("points") / e.path().filename());
  for (const auto& rel : files) {
    ++r.compared;
    if (!same_bytes(fs::path(dir) / rel, fs::path(scratch) / rel)) r.mismatches.push_back(rel.string());
  }
  return r;
}

}  // namespace clocklab
