#pragma once

#include <vector>

namespace kcsep {

/// Generalized binomial coefficient m (m-1) ... (m-k+1) / k!.
/// Exactly zero when m is a nonnegative integer below k.
double gen_binom(double m, int k);

/// binom(m, k) for k = 0..ell, built with the product recurrence.
class BinomialTable {
 public:
  BinomialTable(double m, int ell);

  double m() const { return m_; }
  int ell() const { return static_cast<int>(coeff_.size()) - 1; }
  double operator[](int k) const { return coeff_[static_cast<std::size_t>(k)]; }
  const std::vector<double>& coefficients() const { return coeff_; }

  /// sum_{k=from}^{to} |binom(m, k)|
  double abs_sum(int from, int to) const;

 private:
  double m_;
  std::vector<double> coeff_;
};

/// Ordinary binomial coefficient for small nonnegative integers, as a double.
double choose(int n, int k);

}  // namespace kcsep
