#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "clocklab/clocklab.hpp"

using namespace clocklab;

namespace {

// Relative default outputs land under $CLOCKLAB_OUT when it is set.
std::string default_out(const std::string& rel) {
  const char* env = std::getenv("CLOCKLAB_OUT");
  if (!env || !*env || fs::path(rel).is_absolute()) return rel;
  return (fs::path(env) / rel).string();
}

void ensure_parent(const std::string& path) {
  const auto parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

std::string rational_text(const Rational& r) {
  return r.denominator() == 1 ? std::to_string(r.numerator()) : std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

std::pair<int, int> parse_shard(const std::string& s) {
  const auto slash = s.find('/');
  if (slash == std::string::npos) throw InvalidParams("shard must look like i/k");
  return {std::stoi(s.substr(0, slash)), std::stoi(s.substr(slash + 1))};
}

void print_summary(const InterfaceSummary& s, const LatticeSpec& spec) {
  std::cout << "interface_components " << s.interface_components << "\ncontours " << s.contours << "\nsurface_size " << s.surface_size
            << "\nweight " << s.weight << "\nceilings " << s.ceilings << "\nwalls " << s.walls << "\nwinding_walls " << s.winding_walls
            << "\nrigid_fraction " << static_cast<double>(s.rigid_area) / (spec.n * spec.n) << "\nheight_mode ";
  if (s.height_mode) std::cout << *s.height_mode;
  else std::cout << "none";
  std::cout << "\nheights";
  for (const auto& [h, k] : s.height_histogram) std::cout << ' ' << h << ':' << k;
  std::cout << '\n';
}

// Binary PGM of h(x,y); infinite heights are black, finite ones scale to 1..255.
void write_pgm(const std::string& path, const HeightField& h, int l) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << "P5\n" << h.n << ' ' << h.n << "\n255\n";
  for (int y = 0; y < h.n; ++y)
    for (int x = 0; x < h.n; ++x) {
      const auto& v = h.at(x, y);
      const int g = v ? 1 + (254 * std::clamp(*v, 0, l + 1)) / (l + 1) : 0;
      f.put(static_cast<char>(g));
    }
}

const char* end_name(EndKind k) { return k == EndKind::ordered ? "o" : k == EndKind::disordered ? "d" : "b"; }

void print_column(const SpinConfig& c, const ColumnDefects& cd, bool glue) {
  std::cout << "column " << cd.cx << ',' << cd.cy << "  blobs [" << blob_string(cd.blobs) << "]\n";
  for (std::size_t i = 0; i < cd.defects.size(); ++i) {
    const auto& r = cd.defects[i];
    std::cout << "  G" << i << " cubes " << r.lo << ".." << r.hi << " ends " << end_name(r.bottom) << end_name(r.top) << " sign " << r.sign
              << " m " << r.frustrated << ' ' << class_name(r.kind) << '\n';
  }
  if (cd.defects.empty()) return;
  const auto p = pair_defects(cd.defects);
  for (const auto& pr : p.pairs) {
    std::cout << "  pair G" << pr.first << " G" << pr.second << (pr.problematic ? " problematic" : "") << '\n';
    if (glue && pr.problematic) {
      const auto& lo = cd.defects[static_cast<std::size_t>(std::min(pr.first, pr.second))];
      const auto& hi = cd.defects[static_cast<std::size_t>(std::max(pr.first, pr.second))];
      const auto g = glue_pair(c, lo, hi);
      std::cout << "    glue slab " << g.plan.lo << ".." << g.plan.hi << " shift " << g.plan.shift << " energy_gain " << g.energy_gain
                << " inverse_ok " << (invert_glue(g.config, g.plan) == c) << '\n';
    }
  }
  if (p.unpaired) std::cout << "  unpaired G" << *p.unpaired << '\n';
}

void write_row_csv(std::ostream& o, const PatternRow& r) {
  static const std::vector<std::string> names{"components", "height", "slack_d01", "equality_d01", "bulk_dd", "boundary_dd"};
  o << r.hash << ',' << r.bc << ',' << r.d << ',' << r.l_slab << ',' << r.L << ',' << rational_text(r.m) << ',' << r.D << ',' << r.K << ','
    << r.Q << ',' << r.Db << ',' << class_name(r.cls) << ',' << r.residual;
  for (const auto& n : names) {
    o << ',';
    for (const auto& i : r.inequalities)
      if (i.name == n) o << rational_text(i.margin());
  }
  o << '\n';
}

constexpr const char* kLemmaHeader =
    "hash,bc,d,l_slab,L,m,D,K,Q,Db,class,identity_residual,margin_components,margin_height,margin_slack_d01,margin_equality_d01,"
    "margin_bulk_dd,margin_boundary_dd";

void print_report(const VerifyReport& r) {
  std::cout << "patterns " << r.patterns << "\nidentity_failures " << r.identity_failures << "\nmax_abs_residual " << r.max_abs_residual << '\n';
  for (const auto& [k, v] : r.per_family) std::cout << "family " << k << ' ' << v << '\n';
  for (const auto& [k, v] : r.per_class) std::cout << "class " << k << ' ' << v << '\n';
  for (const auto& [k, t] : r.inequalities)
    std::cout << "inequality " << k << " checked " << t.checked << " violations " << t.violations << " min_margin " << rational_text(t.min_margin)
              << '\n';
  for (const auto& h : r.first_failures) std::cout << "failure " << h << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clocklab: Z_q clock model order-disorder interface lab"};
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 1;
  app.add_option("--threads", threads, "worker cap")->check(CLI::PositiveNumber);

  // simulate
  auto* sim = app.add_subcommand("simulate", "run one Metropolis chain and write its samples");
  LatticeSpec spec{8, 8, 64};
  ChainParams cp{1.0, 2000, 500, 1, 10};
  int top = 0;
  std::string out, snapshot, final_snapshot, snapshot_dir = "snapshots";
  long snapshot_every = 0;
  sim->add_option("--n", spec.n, "torus width (even)");
  sim->add_option("--l", spec.l, "free layers");
  sim->add_option("--q", spec.q, "spin states");
  sim->add_option("--beta", cp.beta);
  sim->add_option("--sweeps", cp.sweeps);
  sim->add_option("--burn-in", cp.burn_in);
  sim->add_option("--thinning", cp.thinning);
  sim->add_option("--seed", cp.seed);
  sim->add_option("--top", top, "spin value of the ordered top plane");
  sim->add_option("--out", out, "chain CSV (default chain.csv)");
  sim->add_option("--snapshot-every", snapshot_every);
  sim->add_option("--snapshot-dir", snapshot_dir);
  sim->add_option("--save-final", final_snapshot, "write the last configuration here");

  // analyze
  auto* ana = app.add_subcommand("analyze", "interface summary of a snapshot");
  std::string pgm;
  ana->add_option("--snapshot", snapshot)->required();
  ana->add_option("--pgm", pgm, "write the height map as PGM");

  // defects
  auto* def = app.add_subcommand("defects", "defects, pairing and gluing per column");
  std::string plant;
  int col_x = -1, col_y = -1;
  bool glue = false;
  std::uint64_t plant_seed = 1;
  LatticeSpec plant_spec{4, 12, 64};
  def->add_option("--snapshot", snapshot);
  def->add_option("--plant", plant, "problematic, e_single, e_double or random");
  def->add_option("--n", plant_spec.n);
  def->add_option("--l", plant_spec.l);
  def->add_option("--q", plant_spec.q);
  def->add_option("--seed", plant_seed);
  def->add_option("--x", col_x);
  def->add_option("--y", col_y);
  def->add_flag("--glue", glue, "apply the gluing map to problematic pairs");

  // verify-lemmas
  auto* ver = app.add_subcommand("verify-lemmas", "exhaustive identity and inequality check over column patterns");
  int lmax = 2, vn = 4;
  std::string shard;
  ver->add_option("--lmax", lmax)->check(CLI::Range(1, kExhaustiveCap));
  ver->add_option("--n", vn);
  ver->add_option("--shard", shard, "i/k");
  ver->add_option("--out", out, "per-pattern CSV");

  // bounds
  auto* bnd = app.add_subcommand("bounds", "partition-function bounds and a(q)");
  BoundParams bp;
  std::string bcase = "od";
  int bn = 4;
  bnd->add_option("--q", bp.q);
  bnd->add_option("--beta", bp.beta);
  bnd->add_option("--case", bcase, "od, oo, dd, ddb or glued");
  bnd->add_option("--n", bn, "width of the representative slab");
  bnd->add_option("--alpha-prime", bp.alpha_prime);

  // toy-check
  auto* toyc = app.add_subcommand("toy-check", "exact toy identity on random orbit mixtures");
  int tr = 4, trials = 100;
  std::uint64_t toy_seed = 1;
  toyc->add_option("--r", tr)->check(CLI::Range(1, 8));
  toyc->add_option("--trials", trials);
  toyc->add_option("--seed", toy_seed);

  // experiment
  auto* exp = app.add_subcommand("experiment", "run a plan file over its grid");
  std::string plan_path, replay_dir;
  exp->add_option("--plan", plan_path);
  exp->add_option("--out", out, "output directory (default: the plan's dir)");
  exp->add_option("--replay", replay_dir, "re-run the plan stored in this directory and compare");

  // peierls-scan
  auto* pei = app.add_subcommand("peierls-scan", "exceedance table of w(B) from experiment results");
  std::string results;
  std::optional<int> pq;
  std::optional<double> pbeta;
  int wmax = 40;
  double palpha = kDefaultAlphaPrime;
  pei->add_option("--results", results)->required();
  pei->add_option("--q", pq);
  pei->add_option("--beta", pbeta);
  pei->add_option("--wmax", wmax);
  pei->add_option("--alpha-prime", palpha);

  // replay
  auto* rep = app.add_subcommand("replay", "re-run an experiment directory and compare byte for byte");
  std::string scratch;
  rep->add_option("--dir", replay_dir)->required();
  rep->add_option("--scratch", scratch, "where to re-run (default <dir>.replay)");

  CLI11_PARSE(app, argc, argv);

  auto do_replay = [&]() {
    const auto s = scratch.empty() ? replay_dir + ".replay" : scratch;
    const auto r = replay(replay_dir, s, threads);
    std::cout << "compared " << r.compared << " files\n";
    for (const auto& m : r.mismatches) std::cout << "mismatch " << m << '\n';
    std::cout << (r.ok() ? "identical\n" : "DIFFERENT\n");
    return r.ok() ? 0 : 1;
  };

  try {
    if (*sim) {
      const auto path = out.empty() ? default_out("chain.csv") : out;
      ChainOptions opt;
      opt.threads = threads;
      opt.top_value = top;
      opt.snapshot_every = snapshot_every;
      opt.snapshot_dir = snapshot_every > 0 ? default_out(snapshot_dir) : "";
      SpinConfig last(spec);
      const auto r = run_chain(spec, cp, opt, [&](const SpinConfig& c, const ChainSample&) { last = c; });
      ensure_parent(path);
      save_chain_csv(path, r);
      if (!final_snapshot.empty()) save_snapshot(final_snapshot, last);
      double of = 0, rf = 0;
      for (const auto& s : r.samples) {
        of += s.ordered_fraction;
        rf += s.rigidity_fraction;
      }
      const double k = r.samples.empty() ? 1 : static_cast<double>(r.samples.size());
      std::cout << "samples " << r.samples.size() << "\nacceptance_rate " << r.acceptance_rate() << "\nmean_ordered_fraction " << of / k
                << "\nmean_rigidity_fraction " << rf / k << "\nwrote " << path << '\n';
      return 0;
    }
    if (*ana) {
      const auto c = load_snapshot(snapshot);
      const auto d = extract_interface(c);
      const auto cw = ceilings_walls_heights(c.spec(), d.surface);
      std::cout << "frustrated_cubes " << frustrated_cubes(c).size() << '\n';
      print_summary(summarize(d, cw), c.spec());
      if (!pgm.empty()) write_pgm(pgm, cw.heights, c.spec().l);
      return 0;
    }
    if (*def) {
      if (snapshot.empty() == plant.empty()) throw InvalidParams("give exactly one of --snapshot or --plant");
      SpinConfig c(plant_spec);
      if (!snapshot.empty()) {
        c = load_snapshot(snapshot);
      } else {
        SplitMix rng(plant_seed);
        std::optional<PlantedVariant> v;
        if (plant == "problematic") v = PlantedVariant::problematic;
        else if (plant == "e_single") v = PlantedVariant::e_single;
        else if (plant == "e_double") v = PlantedVariant::e_double;
        else if (plant != "random") throw InvalidParams("unknown plant variant " + plant);
        c = plant_pair(plant_spec, rng, v).config;
      }
      const auto d = extract_interface(c);
      const auto a = assign_to_columns(d);
      const int n = c.spec().n;
      for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
          if ((col_x >= 0 && x != col_x) || (col_y >= 0 && y != col_y)) continue;
          if (a.at(x, y).size() < 2) continue;
          print_column(c, extract_and_extend_defects(c, d, a, x, y), glue);
        }
      if (!a.tie_broken.empty()) std::cout << "tie_broken_plaquettes " << a.tie_broken.size() << '\n';
      return 0;
    }
    if (*ver) {
      VerifyReport total;
      const bool single = !shard.empty();
      int first = 0, k = std::max(1, threads);
      if (single) std::tie(first, k) = parse_shard(shard);
      const int runs = single ? 1 : k;
      std::vector<VerifyReport> reps(static_cast<std::size_t>(runs));
      std::vector<std::string> parts(static_cast<std::size_t>(runs));
      if (!out.empty()) ensure_parent(out);
      auto work = [&](int i) {
        std::ofstream part;
        if (!out.empty()) {
          parts[static_cast<std::size_t>(i)] = out + ".part" + std::to_string(i);
          part.open(parts[static_cast<std::size_t>(i)]);
        }
        reps[static_cast<std::size_t>(i)] = verify_shard(lmax, vn, single ? first : i, k, [&](const PatternRow& r) {
          if (part.is_open()) write_row_csv(part, r);
        });
      };
      std::vector<std::thread> pool;
      for (int i = 1; i < runs; ++i) pool.emplace_back(work, i);
      work(0);
      for (auto& t : pool) t.join();
      for (const auto& r : reps) total.merge(r);
      if (!out.empty()) {
        std::ofstream f(out);
        f << "schema_version," << kCsvSchemaVersion << '\n' << kLemmaHeader << '\n';
        for (const auto& p : parts) {
          std::ifstream in(p);
          f << in.rdbuf();
          in.close();
          fs::remove(p);
        }
      }
      print_report(total);
      return total.identity_failures == 0 && total.violations() == 0 ? 0 : 1;
    }
    if (*bnd) {
      const auto c = parse_case(bcase);
      const auto s = representative_stats(c, bn);
      std::cout << "case " << case_name(c) << "\nslab_L " << s.l << "\nm " << rational_text(s.m()) << "\nD " << s.D << "\nK " << s.K << "\nQ "
                << s.Q << '\n';
      for (const auto& v : evaluate_bounds(c, s, bp)) std::cout << v.name << ' ' << std::setprecision(12) << v.value << '\n';
      std::cout << "glued_a_threshold_q " << glued_a_threshold() << '\n';
      return 0;
    }
    if (*toyc) {
      const auto r = toy::run_toy_check(tr, trials, toy_seed);
      std::cout << "R " << r.r << "\ntrials " << r.trials << "\nexact " << r.passed << "\nperiodic_subsets " << r.periodic_subsets << '\n'
                << (r.ok() ? "PASS" : "FAIL") << '\n';
      return r.ok() ? 0 : 1;
    }
    if (*exp) {
      if (!replay_dir.empty()) return do_replay();
      if (plan_path.empty()) throw InvalidParams("experiment needs --plan or --replay");
      const auto plan = load_plan(plan_path);
      const auto dir = out.empty() ? default_out(plan.out_dir) : out;
      const auto r = run_experiment(plan, dir, threads);
      std::cout << "points " << r.points << "\nrows " << r.rows << "\ndir " << r.dir << '\n';
      for (const auto& f : r.failures) std::cout << "failed " << f << '\n';
      return r.ok() ? 0 : 1;
    }
    if (*pei) {
      const auto rows = read_results(results);
      const auto w = observable_values(rows, "weight", pq, pbeta);
      const auto t = peierls_scan(w, wmax, pq ? std::optional<double>(*pq) : std::nullopt, palpha);
      if (!t.enough) std::cerr << "warning: only " << t.samples << " samples (want " << kPeierlsMinSamples << ")\n";
      std::cout << "samples " << t.samples << "\nw at_least frequency\n";
      for (int k = 0; k <= wmax; ++k) {
        if (t.at_least[static_cast<std::size_t>(k)] == 0) break;
        std::cout << k << ' ' << t.at_least[static_cast<std::size_t>(k)] << ' ' << t.frequency(k) << '\n';
      }
      std::cout << "non_increasing " << t.non_increasing() << "\nlog_slope " << t.slope << '\n';
      if (pq) std::cout << "log_a " << t.log_a << '\n';
      return 0;
    }
    if (*rep) return do_replay();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
