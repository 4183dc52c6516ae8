#pragma once

#include <cstdint>
#include <vector>

#include "kcsep/lattice.hpp"
#include "kcsep/model_spec.hpp"
#include "kcsep/parallel.hpp"

namespace kcsep {

/// One window width of a constraint written in count form.
///
/// Every built-in family is a nonnegative combination of terms
///   sum_{j=0}^{W} f(n_j^W)
/// where n_j^W counts particles in [-j, -j+W+1] minus the node {0, 1}. The table
/// `f` has W+1 entries and already carries the family weight and the 1/(W+1)
/// window average.
struct CountTerm {
  int width = 0;
  std::vector<double> f;
};

/// Count-form terms of a resolved spec, one per width, sorted by width.
std::vector<CountTerm> count_terms(const ModelSpec& spec);

/// Fast evaluator of c(tau_x eta) built once from a resolved spec.
/// Immutable after construction and safe to share between threads.
class ConstraintKernel {
 public:
  explicit ConstraintKernel(const ModelSpec& resolved_spec);

  /// c(tau_x eta).
  double at(const Configuration& cfg, std::int64_t x) const;
  /// Constraint for the node-free support packed as bits: bit i (i < W) is
  /// site -W+i, bit W+i is site 2+i, where W = max_width().
  double at_support(std::uint64_t support_bits) const;
  /// Same as at(), evaluated from left/right occupation arrays:
  /// left[a] = eta(x-1-a), right[b] = eta(x+2+b) for a, b < max_width().
  double from_sides(const std::uint8_t* left, const std::uint8_t* right) const;
  /// Same as at_support() with the two sides already split (max_width() <= 64):
  /// bit i of `left` is site -W+i, bit b of `right` is site 2+b.
  double from_masks(std::uint64_t left, std::uint64_t right) const;

  int max_width() const { return max_width_; }
  int radius() const { return max_width_ + 1; }
  const std::vector<CountTerm>& terms() const { return terms_; }
  /// sum over terms of (W+1) max f: upper bound on the constraint.
  double sup_bound() const;
  /// sum over terms of (W+1) min f: lower bound on the constraint.
  double inf_bound() const;

 private:
  std::vector<CountTerm> terms_;
  int max_width_ = 0;
};

// Reference evaluators, written directly from the definitions with
// window_count. Used as oracles for the kernel and by bond_rate.

/// (1/(L+1)) sum_{j=0}^{L} 1{n_j^L = n}
double bernstein_constraint(const Configuration& cfg, std::int64_t x, int n, int L);
/// PMM(n) as b_{n,n}.
double pmm_constraint(const Configuration& cfg, std::int64_t x, int n);
/// p_{n,k}: (1/(n+k+1)) sum_j binom(n_j, n)/binom(n+k, n) 1{n_j >= n+1}, width n+k.
double interp_aux_constraint(const Configuration& cfg, std::int64_t x, int n, int k);
/// p_n + sum_{k=1}^{ell} binom(m,k) (-1)^k (p_n - p_{n,k}).
double interp_constraint(const Configuration& cfg, std::int64_t x, int n, double m, int ell);
/// Constraint of any resolved spec, via the reference evaluators.
double constraint_value(const Configuration& cfg, std::int64_t x, const ModelSpec& spec);

/// (c(tau_x eta) + p_N) 1{eta(x) != eta(x+1)}: total exchange rate of the bond
/// {x, x+1} in microscopic time units. p_N is resolved for cfg.size().
double bond_rate(const Configuration& cfg, std::int64_t x, const ModelSpec& spec);

/// E_{nu_alpha}[c] by enumerating all 2^S occupations of the node-free support
/// (S = 2 * max_width <= 24).
double exact_expectation(const ModelSpec& spec, double alpha, Exec exec = Exec::kParallel);
/// The same expectation from binomial window-count laws; no size limit.
double expectation_by_counts(const ModelSpec& spec, double alpha);

/// binom(L, n) alpha^n (1-alpha)^(L-n)
double bernstein_basis(int n, int L, double alpha);

}  // namespace kcsep
