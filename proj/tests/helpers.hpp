#pragma once

// Shared shorthand for building test fixtures.

#include <complex>
#include <random>
#include <utility>
#include <vector>

#include "csl/model.hpp"

namespace helpers {

inline csl::Configuration conf(std::vector<csl::Particle> particles) {
  return csl::Configuration(std::move(particles));
}

inline csl::Particle nucleon_at(csl::Vec3 pos) { return {{"n", 1.0}, pos}; }

inline csl::Particle at(csl::Vec3 pos, double mass, const char* name = "p") {
  return {{name, mass}, pos};
}

// Unit-mass particles scattered uniformly in a cube of the given side
// centred on `center`.
inline std::vector<csl::Particle> random_cloud(std::size_t n, double side, csl::Vec3 center,
                                               std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.5 * side, 0.5 * side);
  std::vector<csl::Particle> ps;
  ps.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    ps.push_back(nucleon_at({center.x + u(rng), center.y + u(rng), center.z + u(rng)}));
  }
  return ps;
}

}  // namespace helpers
