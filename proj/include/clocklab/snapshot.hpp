#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "lattice.hpp"

namespace clocklab {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// "N L q" header, then L+2 blocks of N rows of N values, z ascending.
inline void write_snapshot(std::ostream& out, const SpinConfig& c) {
  const auto& s = c.spec();
  out << s.n << ' ' << s.l << ' ' << s.q << '\n';
  for (int z = 0; z < s.layers(); ++z)
    for (int y = 0; y < s.n; ++y) {
      for (int x = 0; x < s.n; ++x) {
        if (x) out << ' ';
        out << c.at(x, y, z);
      }
      out << '\n';
    }
}

inline SpinConfig read_snapshot(std::istream& in) {
  LatticeSpec s;
  if (!(in >> s.n >> s.l >> s.q)) throw IoError("snapshot: missing 'N L q' header");
  s.validate();
  SpinConfig c(s);
  for (int z = 0; z < s.layers(); ++z)
    for (int y = 0; y < s.n; ++y)
      for (int x = 0; x < s.n; ++x) {
        long v;
        if (!(in >> v)) throw IoError("snapshot: truncated at z=" + std::to_string(z) + " y=" + std::to_string(y));
        if (v < 0 || v >= s.q) throw IoError("snapshot: spin " + std::to_string(v) + " outside [0, q)");
        c.set(x, y, z, static_cast<int>(v));
      }
  std::string rest;
  if (in >> rest) throw IoError("snapshot: trailing data '" + rest + "'");
  return c;
}

inline void save_snapshot(const std::string& path, const SpinConfig& c) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path + " for writing");
  write_snapshot(f, c);
  if (!f) throw IoError("write failed: " + path);
}

inline SpinConfig load_snapshot(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  try {
    return read_snapshot(f);
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

}  // namespace clocklab
