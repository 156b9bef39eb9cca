#pragma once

#include <cstdint>

namespace clocklab {

// Stateless keyed hash: every (seed, sweep, site, stream) tuple gets its own
// draw, so a sweep produces the same numbers regardless of how sites are split
// across threads.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct CounterRng {
  std::uint64_t seed = 0;

  std::uint64_t bits(std::uint64_t sweep, std::uint64_t site, std::uint64_t stream) const {
    return mix64(mix64(mix64(seed ^ 0x5bd1e9955bd1e995ULL) ^ sweep) ^ (site * 4 + stream));
  }

  // Uniform on [0, bound).
  std::uint32_t below(std::uint32_t bound, std::uint64_t sweep, std::uint64_t site, std::uint64_t stream) const {
    const unsigned __int128 wide = static_cast<unsigned __int128>(bits(sweep, site, stream)) * bound;
    return static_cast<std::uint32_t>(wide >> 64);
  }

  // Uniform on [0, 1) with 53 bits.
  double unit(std::uint64_t sweep, std::uint64_t site, std::uint64_t stream) const {
    return static_cast<double>(bits(sweep, site, stream) >> 11) * 0x1.0p-53;
  }
};

// Sequential stream for generators that do not need per-site addressing.
class SplitMix {
 public:
  explicit SplitMix(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() { return mix64(state_++); }
  std::uint32_t below(std::uint32_t bound) {
    const unsigned __int128 wide = static_cast<unsigned __int128>(next()) * bound;
    return static_cast<std::uint32_t>(wide >> 64);
  }
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  bool coin() { return next() >> 63; }

  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return next(); }

 private:
  std::uint64_t state_;
};

}  // namespace clocklab
