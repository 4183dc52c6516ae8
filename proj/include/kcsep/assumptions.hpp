#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "kcsep/lattice.hpp"
#include "kcsep/model_spec.hpp"

namespace kcsep {

enum class Regime { kI, kII, kNeither };
std::string to_string(Regime r);

struct ClusterCheck {
  bool certified = false;
  /// Smallest rate used along the paths found (0 when not certified).
  double r_star = 0.0;
  /// Longest of the shortest paths over all transitions and both exteriors.
  int max_path = 0;
  /// First transition that could not be completed, with the exterior filling.
  std::string failed_transition;
  /// Segment state farthest from the start in the stuck search.
  std::string stuck_state;
};

/// BFS certificate for the mobility and mass-transport transitions
///   C1 <-> 1C,  C0 <-> 0C,  C01 <-> C10,  01C <-> 10C
/// of a cluster pattern C. Each transition is searched inside its own segment,
/// using only positive-rate exchanges between segment sites, with every other
/// site frozen; the search must succeed with the exterior all empty and all full.
ClusterCheck mobile_cluster_check(const ModelSpec& resolved_spec, const Configuration& cluster);

struct RegimeReport {
  Regime regime = Regime::kNeither;
  /// Exact minimum of the constraint over its support (Regime II bound).
  double min_rate = 0.0;
  /// Support pattern with zero constraint, as "left|node|right" occupations.
  std::optional<std::string> blocked;
  std::optional<std::string> cluster;
  std::optional<int> kappa_star;
  std::optional<double> r_star;
  int max_path = 0;
};

/// Regime II when the constraint is bounded below by a positive constant;
/// Regime I when some configuration blocks the node and a mobile cluster exists.
RegimeReport classify_regime(const ModelSpec& resolved_spec, int max_cluster_length = 10);

struct AssumptionReport {
  std::string model;
  std::vector<int> n_list;
  /// ell_N used at each N (series cutoff of the interpolating components).
  std::vector<int> cutoffs;
  std::vector<double> sup_rate_over_N;
  std::vector<double> summed_rate_over_N;
  /// 4n+2 + sum_k |binom(m,k)| (n+k+2), over N; interpolating family only.
  std::vector<double> summed_rate_reference_over_N;
  std::vector<double> h_sup;
  /// 2 sum_{k<=ell_N} |binom(m,k)| + 1/(n+1) for the interpolating family.
  std::vector<double> h_sup_bound;
  /// h_cauchy[a][b] = |h_{ell_a} - h_{ell_b}|_inf
  std::vector<std::vector<double>> h_cauchy;
  std::vector<std::vector<double>> h_cauchy_bound;
  double h_bar = 0.0;
  RegimeReport regime;

  bool sup_rate_decreasing = false;
  bool summed_rate_bounded = false;
  bool h_bounded = false;
  bool h_cauchy_within_bound = false;
  bool passed() const { return sup_rate_decreasing && summed_rate_bounded && h_bounded && h_cauchy_within_bound; }
};

/// Growth conditions, h bounds and h regularity over a list of lattice sizes.
/// The summed-rate column is bounded above by sum over windows of (W+2) |r^j|_inf.
AssumptionReport check_assumptions(const ModelSpec& spec, const std::vector<int>& n_list,
                                   double summed_rate_cap = 1.0);

/// Exact sup and inf of h for a resolved spec, by dynamic programming over the
/// nested box counts h depends on.
struct Range {
  double lo = 0.0;
  double hi = 0.0;
  double sup_norm() const { return std::max(std::fabs(lo), std::fabs(hi)); }
};
Range h_range(const ModelSpec& resolved_spec);
/// |h_a - h_b|_inf, exact.
double h_distance(const ModelSpec& a, const ModelSpec& b);
/// Declared N-independent bound on |h|_inf.
double h_bar(const ModelSpec& spec);

}  // namespace kcsep
