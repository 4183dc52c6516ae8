#include "kcsep/binomial.hpp"

#include <cmath>

#include "kcsep/errors.hpp"

namespace kcsep {

double gen_binom(double m, int k) {
  if (k < 0) return 0.0;
  double out = 1.0;
  for (int i = 0; i < k; ++i) out *= (m - i) / (i + 1);
  return out;
}

BinomialTable::BinomialTable(double m, int ell) : m_(m) {
  if (ell < 0) throw ConfigError("binomial table needs ell >= 0");
  coeff_.resize(static_cast<std::size_t>(ell) + 1);
  coeff_[0] = 1.0;
  for (int k = 1; k <= ell; ++k) coeff_[k] = coeff_[k - 1] * (m - k + 1) / k;
}

double BinomialTable::abs_sum(int from, int to) const {
  double s = 0.0;
  for (int k = from; k <= to && k <= ell(); ++k) s += std::fabs(coeff_[k]);
  return s;
}

double choose(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0.0;
  if (k > n - k) k = n - k;
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return std::round(out);
}

}  // namespace kcsep
