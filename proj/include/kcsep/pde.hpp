#pragma once

#include <functional>
#include <string>
#include <vector>

#include "kcsep/model_spec.hpp"
#include "kcsep/simulator.hpp"

namespace kcsep {

/// Nondecreasing flux Phi on [0, 1].
class Flux {
 public:
  static constexpr int kTablePoints = 1025;

  /// Values at alpha_i = i/(n-1), linearly interpolated. ConfigError when the
  /// table decreases anywhere.
  static Flux table(std::vector<double> values);
  /// Exact callback; the slope bound feeds the time step.
  static Flux callback(std::function<double(double)> phi, double max_slope);

  double operator()(double rho) const;
  double max_slope() const { return max_slope_; }
  bool is_table() const { return !phi_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
  std::function<double(double)> phi_;
  double max_slope_ = 0.0;
};

/// Tabulated Phi_L of a spec, or its closed-form limit when L == 0.
Flux flux_for(const ModelSpec& spec, int L);

struct PdeState {
  double time = 0.0;
  /// Cell averages at centers (i + 1/2)/M.
  std::vector<double> grid;
};

struct PdeOptions {
  int cells = 256;
  double horizon = 0.0;
  /// Times at which to record a state; the horizon is always recorded last.
  std::vector<double> snapshot_times;
  double cfl = 0.4;
  /// Record the state after every step (needed by weak_residual).
  bool record_every_step = false;
};

struct PdeSolution {
  std::vector<PdeState> states;
  double dt = 0.0;
  long steps = 0;
};

/// Explicit conservative scheme rho_i += lambda (Phi(rho_{i+1}) - 2 Phi(rho_i) + Phi(rho_{i-1}))
/// on the torus, lambda = dt M^2 with lambda max Phi' <= cfl. The step before a
/// snapshot is shortened to land on it. states[0] is the initial grid.
PdeSolution solve(const Flux& phi, const Profile& rho_ini, const PdeOptions& options);

double mass(const std::vector<double>& grid);

/// G(u, t) with the derivatives the weak formulation needs.
struct SpaceTimeTest {
  std::function<double(double, double)> value;
  std::function<double(double, double)> d_t;
  std::function<double(double, double)> d_uu;
};

/// <rho_t, G_t> - <rho_ini, G_0> - int_0^t (<rho_s, d_s G_s> + <Phi(rho_s), d_uu G_s>) ds
/// at the time of the last state: midpoint rule in space, trapezoid rule over
/// the recorded states in time.
double weak_residual(const std::vector<PdeState>& states, const Profile& rho_ini, const SpaceTimeTest& G,
                     const Flux& phi);

/// L1 distance between two piecewise-constant profiles on uniform grids of [0, 1).
double l1_distance(const std::vector<double>& a, const std::vector<double>& b);

struct CompareReport {
  std::vector<double> times;
  std::vector<double> l1;
  std::vector<std::string> test_names;
  /// pairing_gap[k][g] = |pi_t(G_g) - <rho_t, G_g>| at times[k]
  std::vector<std::vector<double>> pairing_gap;
};

/// Test functions 1, cos(2 pi k u), sin(2 pi k u) for k = 1..3.
std::vector<std::pair<std::string, TestFunction>> pairing_battery();

/// Matches each empirical time with a PDE state (ConfigError when one is missing).
CompareReport compare(const std::vector<double>& times, const std::vector<std::vector<double>>& empirical,
                      const std::vector<PdeState>& states);
CompareReport compare(const AggregateProfile& empirical, const std::vector<PdeState>& states);
CompareReport compare(const Trajectory& empirical, const std::vector<PdeState>& states);

}  // namespace kcsep
