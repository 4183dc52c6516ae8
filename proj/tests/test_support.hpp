#pragma once

#include <cstdint>
#include <vector>

#include "kcsep/lattice.hpp"
#include "kcsep/model_spec.hpp"
#include "kcsep/rng.hpp"

namespace kcsep::testing {

// Hand-rolled generators for the property tests. Every generator is driven by
// an explicit Rng so failures replay from the printed seed.

inline Configuration random_configuration(Rng& rng, int n_sites, double density = 0.5) {
  Configuration cfg(n_sites);
  for (int x = 0; x < n_sites; ++x) cfg.set(x, rng.uniform() < density ? 1 : 0);
  return cfg;
}

inline int random_int(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(rng.next() % static_cast<std::uint64_t>(hi - lo + 1));
}

/// The models of the exhaustive gradient battery.
inline std::vector<ModelSpec> gradient_battery() {
  std::vector<ModelSpec> out{ModelSpec::ssep(), ModelSpec::pmm(1), ModelSpec::pmm(2), ModelSpec::pmm(3),
                             ModelSpec::bernstein(1, 2), ModelSpec::bernstein(1, 3), ModelSpec::bernstein(2, 3)};
  for (double m : {0.0, 0.25, 0.5, 0.75, 1.0}) out.push_back(ModelSpec::interpolating(1, m, 4));
  return out;
}

}  // namespace kcsep::testing
