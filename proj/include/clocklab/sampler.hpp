#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "lattice.hpp"
#include "rng.hpp"

namespace clocklab {

struct InvalidParams : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ChainParams {
  double beta = 1.0;
  long sweeps = 1000;
  long burn_in = 0;
  std::uint64_t seed = 1;
  long thinning = 1;

  void validate() const {
    if (!(beta >= 0.0)) throw InvalidParams("beta must be non-negative");
    if (burn_in < 0) throw InvalidParams("burn-in must be non-negative");
    if (sweeps <= burn_in) throw InvalidParams("sweeps must exceed burn-in");
    if (thinning < 1) throw InvalidParams("thinning must be at least 1");
  }
};

struct SweepResult {
  long accepted = 0;
  long proposed = 0;
  long energy_delta = 0;  // H(after) - H(before)
};

// Checkerboard single-site Metropolis with uniform proposals on Z_q.
// Free sites of one parity class never neighbour each other, so a class can
// be split across threads; draws are keyed by (seed, sweep, site).
class Metropolis {
 public:
  Metropolis(const LatticeSpec& spec, double beta, std::uint64_t seed, int threads = 1)
      : spec_(spec), beta_(beta), rng_{seed}, threads_(threads < 1 ? 1 : threads) {
    spec_.validate();
    if (!(beta >= 0.0)) throw InvalidParams("beta must be non-negative");
    for (int d = 0; d <= 6; ++d) accept_[d] = std::exp(-beta * d);
    const int n = spec.n;
    SpinConfig probe(spec);
    for (int z = 1; z <= spec.l; ++z)
      for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
          Neighbourhood nb;
          nb.site = static_cast<std::uint32_t>(probe.index(x, y, z));
          nb.around = {static_cast<std::uint32_t>(probe.index(wrap(x + 1, n), y, z)),
                       static_cast<std::uint32_t>(probe.index(wrap(x - 1, n), y, z)),
                       static_cast<std::uint32_t>(probe.index(x, wrap(y + 1, n), z)),
                       static_cast<std::uint32_t>(probe.index(x, wrap(y - 1, n), z)),
                       static_cast<std::uint32_t>(probe.index(x, y, z + 1)),
                       static_cast<std::uint32_t>(probe.index(x, y, z - 1))};
          classes_[(x + y + z) & 1].push_back(nb);
        }
  }

  double beta() const { return beta_; }

  SweepResult sweep(SpinConfig& c, std::uint64_t sweep_index) const {
    return sweep(c, sweep_index, [](const SpinConfig&) {});
  }

  // `after_site` sees the configuration after every single-site step; only
  // honoured on the single-threaded path.
  template <class Visit>
  SweepResult sweep(SpinConfig& c, std::uint64_t sweep_index, Visit&& after_site) const {
    SweepResult total;
    auto& spins = c.raw();
    for (const auto& cls : classes_) {
      if (threads_ == 1 || cls.size() < 64) {
        update_range(spins, cls, 0, cls.size(), sweep_index, total, after_site, c);
        continue;
      }
      std::vector<SweepResult> part(static_cast<std::size_t>(threads_));
      std::vector<std::thread> pool;
      const std::size_t chunk = (cls.size() + threads_ - 1) / threads_;
      for (int t = 0; t < threads_; ++t) {
        const std::size_t lo = std::min(cls.size(), chunk * t), hi = std::min(cls.size(), lo + chunk);
        pool.emplace_back([&, t, lo, hi] {
          auto skip = [](const SpinConfig&) {};
          update_range(spins, cls, lo, hi, sweep_index, part[t], skip, c);
        });
      }
      for (auto& th : pool) th.join();
      for (const auto& p : part) {
        total.accepted += p.accepted;
        total.proposed += p.proposed;
        total.energy_delta += p.energy_delta;
      }
    }
    return total;
  }

 private:
  struct Neighbourhood {
    std::uint32_t site;
    std::array<std::uint32_t, 6> around;
  };

  bool close(int a, int b) const {
    const int d = a > b ? a - b : b - a;
    return d <= 1 || d >= spec_.q - 1;
  }

  template <class Visit>
  void update_range(std::vector<Spin>& spins, const std::vector<Neighbourhood>& cls, std::size_t lo, std::size_t hi,
                    std::uint64_t sweep_index, SweepResult& out, Visit& after_site, const SpinConfig& c) const {
    for (std::size_t k = lo; k < hi; ++k) {
      const auto& nb = cls[k];
      const int old = spins[nb.site];
      const int proposal = static_cast<int>(rng_.below(static_cast<std::uint32_t>(spec_.q), sweep_index, nb.site, 0));
      ++out.proposed;
      int before = 0, after = 0;
      for (auto j : nb.around) {
        before += close(old, spins[j]);
        after += close(proposal, spins[j]);
      }
      const int delta = before - after;
      if (delta <= 0 || rng_.unit(sweep_index, nb.site, 1) < accept_[delta]) {
        spins[nb.site] = static_cast<Spin>(proposal);
        ++out.accepted;
        out.energy_delta += delta;
      }
      after_site(c);
    }
  }

  LatticeSpec spec_;
  double beta_;
  CounterRng rng_;
  int threads_;
  std::array<double, 7> accept_{};
  std::array<std::vector<Neighbourhood>, 2> classes_;
};

inline SweepResult metropolis_sweep(SpinConfig& c, double beta, std::uint64_t seed, std::uint64_t sweep_index) {
  return Metropolis(c.spec(), beta, seed).sweep(c, sweep_index);
}

// Exact Gibbs weights over every free-layer configuration for tiny boxes.
// State code: free sites in storage order (z = 1..L, then y, then x) as base-q digits,
// first site least significant.
struct ExactTable {
  LatticeSpec spec;
  SpinConfig frame;  // boundary layers used for every state
  std::vector<double> probability;
  std::vector<long> energy;
};

inline constexpr double kEnumerationLimit = 1e7;

inline double state_space_size(const LatticeSpec& s) {
  return std::pow(static_cast<double>(s.q), static_cast<double>(s.free_sites()));
}

inline std::size_t state_code(const SpinConfig& c) {
  const auto& s = c.spec();
  const std::size_t nn = static_cast<std::size_t>(s.n) * s.n;
  std::size_t code = 0;
  for (std::size_t i = static_cast<std::size_t>(s.free_sites()); i-- > 0;) code = code * s.q + c.raw()[nn + i];
  return code;
}

inline void decode_state(SpinConfig& c, std::size_t code) {
  const auto& s = c.spec();
  const std::size_t nn = static_cast<std::size_t>(s.n) * s.n;
  for (std::size_t i = 0; i < static_cast<std::size_t>(s.free_sites()); ++i) {
    c.raw()[nn + i] = static_cast<Spin>(code % s.q);
    code /= s.q;
  }
}

inline ExactTable exact_distribution(const LatticeSpec& spec, double beta, int top_value = 0) {
  spec.validate();
  if (!(beta >= 0.0)) throw InvalidParams("beta must be non-negative");
  const double states = state_space_size(spec);
  if (states > kEnumerationLimit)
    throw InvalidParams("state space q^(N^2 L) = " + std::to_string(states) + " exceeds the enumeration bound 1e7");
  ExactTable t{spec, make_config(spec, top_value), {}, {}};
  const auto count = static_cast<std::size_t>(states + 0.5);
  t.energy.resize(count);
  SpinConfig c = t.frame;
  long emin = 0;
  for (std::size_t code = 0; code < count; ++code) {
    decode_state(c, code);
    t.energy[code] = total_energy(c);
    if (code == 0 || t.energy[code] < emin) emin = t.energy[code];
  }
  t.probability.resize(count);
  long double z = 0;
  for (std::size_t code = 0; code < count; ++code) {
    const double w = std::exp(-beta * static_cast<double>(t.energy[code] - emin));
    t.probability[code] = w;
    z += w;
  }
  for (auto& p : t.probability) p = static_cast<double>(p / z);
  return t;
}

inline double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

// Empirical state distribution of a chain, counting the state after every
// single-site step (each step preserves the Gibbs measure).
inline std::vector<double> empirical_distribution(const LatticeSpec& spec, double beta, long sweeps, std::uint64_t seed,
                                                  long burn_in = 100, int top_value = 0) {
  const double states = state_space_size(spec);
  if (states > kEnumerationLimit) throw InvalidParams("state space too large for an empirical table");
  std::vector<double> hist(static_cast<std::size_t>(states + 0.5), 0.0);
  SpinConfig c = make_config(spec, top_value);
  Metropolis mh(spec, beta, seed);
  for (long s = 0; s < burn_in; ++s) mh.sweep(c, static_cast<std::uint64_t>(s));
  long steps = 0;
  auto tally = [&](const SpinConfig& cur) {
    hist[state_code(cur)] += 1.0;
    ++steps;
  };
  for (long s = 0; s < sweeps; ++s) mh.sweep(c, static_cast<std::uint64_t>(burn_in + s), tally);
  for (auto& h : hist) h /= static_cast<double>(steps);
  return hist;
}

}  // namespace clocklab
