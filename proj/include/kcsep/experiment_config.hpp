#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "kcsep/model_spec.hpp"
#include "kcsep/simulator.hpp"

namespace kcsep {

/// An archived experiment: flat `key = value` lines plus one `model { ... }` block.
///
///   N_list = 64, 256
///   T = 0.05
///   model {
///     family = interpolating
///     n = 1
///     m = 0.5
///     ell = auto
///   }
///
/// `#` starts a comment. Unknown keys, repeated keys and malformed values are
/// ConfigErrors whose message starts with "line <k>:".
struct ExperimentConfig {
  std::optional<ModelSpec> model;
  std::vector<int> n_list;
  double horizon = 0.0;
  std::vector<double> obs_times;
  double eps = 1.0 / 32;
  int realizations = 1;
  std::uint64_t master_seed = 0;
  std::string output;
  /// "constant a" or "sine a b" (a + b sin(2 pi u)).
  std::string profile_kind = "constant";
  std::vector<double> profile_params{0.5};
  int cells = 256;
  int cutoff = 12;
  std::vector<int> cutoff_list;
  double tol = 1e-10;
  int points = 11;
  std::string cluster;
  /// "phi_L" (tabulated Phi at cutoff L) or "closed_form".
  std::string flux = "phi_L";
  std::vector<std::string> inputs;
  std::string empirical;
  std::set<std::string> given;

  bool has(const std::string& key) const { return given.count(key) > 0; }
  /// The single lattice size; ConfigError unless exactly one was given.
  int single_n() const;
  const ModelSpec& require_model() const;
};

ExperimentConfig parse_experiment_config(std::string_view text);
ExperimentConfig load_experiment_config(const std::string& path);

Profile make_profile(const std::string& kind, const std::vector<double>& params);
inline Profile make_profile(const ExperimentConfig& c) { return make_profile(c.profile_kind, c.profile_params); }

}  // namespace kcsep
