#include "kcsep/rate_index.hpp"

#include <bit>

namespace kcsep {

RateIndex::RateIndex(int n_bonds)
    : rates_(static_cast<std::size_t>(n_bonds), 0.0),
      tree_(static_cast<std::size_t>(n_bonds) + 1, 0.0),
      top_bit_(n_bonds > 0 ? static_cast<int>(std::bit_floor(static_cast<unsigned>(n_bonds))) : 0) {}

void RateIndex::assign(const std::vector<double>& rates) {
  rates_ = rates;
  const std::size_t n = rates_.size();
  tree_.assign(n + 1, 0.0);
  top_bit_ = n > 0 ? static_cast<int>(std::bit_floor(n)) : 0;
  for (std::size_t i = 1; i <= n; ++i) {
    tree_[i] += rates_[i - 1];
    const std::size_t parent = i + (i & (~i + 1));
    if (parent <= n) tree_[parent] += tree_[i];
  }
}

void RateIndex::update(int bond, double rate) {
  const double delta = rate - rates_[static_cast<std::size_t>(bond)];
  rates_[static_cast<std::size_t>(bond)] = rate;
  if (delta == 0.0) return;
  const std::size_t n = rates_.size();
  for (std::size_t i = static_cast<std::size_t>(bond) + 1; i <= n; i += i & (~i + 1)) tree_[i] += delta;
}

double RateIndex::prefix(int bond) const {
  double s = 0.0;
  for (std::size_t i = static_cast<std::size_t>(bond); i > 0; i -= i & (~i + 1)) s += tree_[i];
  return s;
}

int RateIndex::find(double u) const {
  std::size_t pos = 0;
  double rest = u;
  for (std::size_t step = static_cast<std::size_t>(top_bit_); step > 0; step >>= 1) {
    const std::size_t next = pos + step;
    if (next <= rates_.size() && tree_[next] <= rest) {
      pos = next;
      rest -= tree_[next];
    }
  }
  // Rounding can land past the last positive bond or on an empty one.
  int bond = static_cast<int>(pos < rates_.size() ? pos : rates_.size() - 1);
  if (rates_[static_cast<std::size_t>(bond)] > 0.0) return bond;
  for (int b = bond; b >= 0; --b) {
    if (rates_[static_cast<std::size_t>(b)] > 0.0) return b;
  }
  for (int b = bond + 1; b < size(); ++b) {
    if (rates_[static_cast<std::size_t>(b)] > 0.0) return b;
  }
  return bond;
}

}  // namespace kcsep
