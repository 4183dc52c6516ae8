#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kcsep/constraints.hpp"
#include "kcsep/lattice.hpp"
#include "kcsep/model_spec.hpp"
#include "kcsep/parallel.hpp"
#include "kcsep/rate_index.hpp"
#include "kcsep/rng.hpp"

namespace kcsep {

using Profile = std::function<double(double)>;
using TestFunction = std::function<double(double)>;

/// Box averages of a configuration, box b covering sites [b*box_size, (b+1)*box_size).
struct DensityProfile {
  int box_size = 1;
  std::vector<double> values;

  double mean() const;
  bool operator==(const DensityProfile&) const = default;
};

/// Needs box_size dividing N.
DensityProfile coarse_grain(const Configuration& cfg, int box_size);
/// ceil(eps N); ConfigError unless it divides N.
int box_size_for(int n_sites, double eps);

/// Independent Bernoulli(profile(x/N)) occupations.
Configuration sample_initial(const Profile& profile, int n_sites, std::uint64_t seed);

struct StepResult {
  double wait = 0.0;
  int bond = -1;
  bool absorbed = false;
};

/// Exact continuous-time dynamics with bond rates N^2 (c + p_N) 1{discordant}.
/// Time is macroscopic.
class Simulation {
 public:
  Simulation(const ModelSpec& spec, Configuration initial, Rng rng);

  /// One event: exponential wait, bond drawn proportionally to rate, exchange,
  /// local rate update. Leaves the state untouched when absorbed.
  StepResult step();
  /// Runs events up to macroscopic time t; the clock ends exactly at t.
  void advance_to(double t);

  double time() const { return time_; }
  bool absorbed() const { return absorbed_; }
  std::int64_t events() const { return events_; }
  const Configuration& configuration() const { return cfg_; }
  const RateIndex& rates() const { return index_; }
  const ModelSpec& spec() const { return spec_; }
  double perturbation() const { return perturbation_; }
  /// Rate of a bond recomputed from the live configuration.
  double fresh_rate(int bond) const;
  /// Largest relative gap between stored and recomputed rates, total included.
  double rate_drift() const;

  static constexpr std::int64_t kRebuildInterval = 1'000'000;

 private:
  void rebuild();
  void apply(int bond);

  ModelSpec spec_;
  ConstraintKernel kernel_;
  Configuration cfg_;
  Rng rng_;
  RateIndex index_;
  double scale_;
  double perturbation_;
  double time_ = 0.0;
  bool absorbed_ = false;
  std::int64_t events_ = 0;
};

struct Trajectory {
  ModelSpec model;
  int n_sites = 0;
  std::uint64_t seed = 0;
  int box_size = 1;
  std::vector<double> times;
  std::vector<DensityProfile> profiles;
  std::vector<int> particle_counts;
  std::int64_t events = 0;
  bool absorbed = false;
};

struct RunConfig {
  int n_sites = 0;
  double horizon = 0.0;
  std::vector<double> obs_times;
  double eps = 1.0 / 32;
};

Trajectory run(const ModelSpec& spec, const RunConfig& config, const Profile& profile, std::uint64_t seed);

/// Realization r uses seed realization_seed(master_seed, r); the output does not
/// depend on the number of threads.
std::vector<Trajectory> run_realizations(const ModelSpec& spec, const RunConfig& config, const Profile& profile,
                                         std::uint64_t master_seed, int realizations, Exec exec = Exec::kParallel);

/// Per (time, box) mean and standard error over realizations.
struct AggregateProfile {
  std::string model;
  int n_sites = 0;
  int box_size = 1;
  int realizations = 0;
  std::vector<double> times;
  std::vector<std::vector<double>> mean;
  std::vector<std::vector<double>> stderr_;
};

/// Needs at least two trajectories on identical time and box grids.
AggregateProfile aggregate(const std::vector<Trajectory>& runs);

/// (1/M) sum_b G((b + 1/2)/M) value_b over the M boxes.
double pair_with_test_function(const DensityProfile& profile, const TestFunction& G);
/// (1/N) sum_x G(x/N) eta(x)
double pair_with_test_function(const Configuration& cfg, const TestFunction& G);

}  // namespace kcsep
