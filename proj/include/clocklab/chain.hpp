#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "interface.hpp"
#include "sampler.hpp"
#include "snapshot.hpp"

namespace clocklab {

inline constexpr int kCsvSchemaVersion = 1;

struct ChainSample {
  long sweep = 0;
  long energy = 0;
  double ordered_fraction = 0;
  double rigidity_fraction = 0;
  long interface_components = 0;
  int height_mode = -1;  // -1: no finite height
  long surface_size = 0;
  long weight = 0;
  long winding_walls = 0;
  friend bool operator==(const ChainSample&, const ChainSample&) = default;
};

struct ChainReport {
  LatticeSpec spec;
  ChainParams params;
  std::vector<ChainSample> samples;
  long accepted = 0;
  long proposed = 0;
  double acceptance_rate() const { return proposed ? static_cast<double>(accepted) / proposed : 0.0; }
  friend bool operator==(const ChainReport& a, const ChainReport& b) {
    return a.samples == b.samples && a.accepted == b.accepted && a.proposed == b.proposed;
  }
};

struct ChainOptions {
  int threads = 1;
  bool interface_observables = true;
  long snapshot_every = 0;  // 0: never
  std::string snapshot_dir;
  int top_value = 0;
};

inline ChainSample observe(const SpinConfig& c, long sweep, long energy, bool with_interface) {
  ChainSample s;
  s.sweep = sweep;
  s.energy = energy;
  s.ordered_fraction = ordered_fraction(c).value();
  if (with_interface) {
    const auto sum = analyze(c);
    const double nn = static_cast<double>(c.spec().n) * c.spec().n;
    s.rigidity_fraction = static_cast<double>(sum.rigid_area) / nn;
    s.interface_components = sum.interface_components;
    s.height_mode = sum.height_mode.value_or(-1);
    s.surface_size = sum.surface_size;
    s.weight = sum.weight;
    s.winding_walls = sum.winding_walls;
  }
  return s;
}

// Samples after burn-in every `thinning` sweeps. The running energy is checked
// against a full recount every 1000 sweeps and the frozen layers at every
// snapshot.
template <class Visit>
ChainReport run_chain(const LatticeSpec& spec, const ChainParams& params, const ChainOptions& opt, Visit&& visit) {
  spec.validate();
  params.validate();
  ChainReport r{spec, params, {}, 0, 0};
  SpinConfig c = make_config(spec, opt.top_value);
  const SpinConfig initial = c;
  const Metropolis mh(spec, params.beta, params.seed, opt.threads);
  long energy = total_energy(c);
  if (opt.snapshot_every > 0) std::filesystem::create_directories(opt.snapshot_dir);
  for (long s = 1; s <= params.sweeps; ++s) {
    const auto res = mh.sweep(c, static_cast<std::uint64_t>(s));
    r.accepted += res.accepted;
    r.proposed += res.proposed;
    energy += res.energy_delta;
    if (s % 1000 == 0 && energy != total_energy(c))
      throw std::logic_error("running energy drifted from the recount at sweep " + std::to_string(s));
    if (s > params.burn_in && (s - params.burn_in) % params.thinning == 0) {
      r.samples.push_back(observe(c, s, energy, opt.interface_observables));
      visit(c, r.samples.back());
    }
    if (opt.snapshot_every > 0 && s % opt.snapshot_every == 0) {
      if (!boundaries_match(c, initial)) throw std::logic_error("boundary layer changed during the chain");
      std::ostringstream name;
      name << opt.snapshot_dir << "/sweep_" << std::setw(9) << std::setfill('0') << s << ".txt";
      save_snapshot(name.str(), c);
    }
  }
  return r;
}

inline ChainReport run_chain(const LatticeSpec& spec, const ChainParams& params, const ChainOptions& opt = {}) {
  return run_chain(spec, params, opt, [](const SpinConfig&, const ChainSample&) {});
}

inline void write_chain_csv(std::ostream& out, const ChainReport& r) {
  out << "schema_version," << kCsvSchemaVersion << '\n';
  out << "sweep,energy,ordered_fraction,rigidity_fraction,n_interface_components,height_mode\n";
  out << std::setprecision(17);
  for (const auto& s : r.samples)
    out << s.sweep << ',' << s.energy << ',' << s.ordered_fraction << ',' << s.rigidity_fraction << ','
        << s.interface_components << ',' << s.height_mode << '\n';
}

inline void save_chain_csv(const std::string& path, const ChainReport& r) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_chain_csv(out, r);
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace clocklab
