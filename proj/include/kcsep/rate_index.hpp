#pragma once

#include <vector>

namespace kcsep {

/// Per-bond rates in a Fenwick tree: O(log N) point update, prefix sum and
/// sampling proportional to rate.
class RateIndex {
 public:
  explicit RateIndex(int n_bonds = 0);

  /// Replaces every rate and rebuilds the tree from scratch.
  void assign(const std::vector<double>& rates);
  void update(int bond, double rate);

  double rate(int bond) const { return rates_[static_cast<std::size_t>(bond)]; }
  const std::vector<double>& rates() const { return rates_; }
  int size() const { return static_cast<int>(rates_.size()); }
  /// Sum of rates of bonds [0, bond).
  double prefix(int bond) const;
  double total() const { return prefix(size()); }
  /// Bond b with prefix(b) <= u < prefix(b+1), for u in [0, total()). Never
  /// returns a zero-rate bond.
  int find(double u) const;

 private:
  std::vector<double> rates_;
  std::vector<double> tree_;
  int top_bit_ = 0;
};

}  // namespace kcsep
