#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kcsep/constraints.hpp"
#include "kcsep/lattice.hpp"
#include "kcsep/model_spec.hpp"
#include "kcsep/parallel.hpp"

namespace kcsep {

/// Which correction term g to pair with h in H = h + g.
///
/// kTelescoping moves every window component back to the reference node along
/// the bonds 0..j-1 with a leading minus sign. kShiftedUnsigned takes the
/// alternative closed form (bonds -1..-j, no leading minus);
/// it is kept for comparison and does not produce a gradient.
enum class GVariant { kTelescoping, kShiftedUnsigned };

// Closed-form pieces of the interpolating potential, evaluated at reference site x.

/// (1/(n+1)) prod_{i=0}^{n} eta(x+i)
double v_n(const Configuration& cfg, int n, std::int64_t x = 0);
/// (1/(n+k+1)) sum_{nu=n+1}^{n+k} binom(nu,n)/binom(n+k,k) 1{P_{n+k} >= nu+1},
/// with P_{n+k} the particle count in [x, x+n+k].
double v_nk(const Configuration& cfg, int n, int k, std::int64_t x = 0);
/// v_n + sum_{k=1}^{L} binom(m,k) (-1)^k (v_n - v_{n,k})
double h_function(const Configuration& cfg, int n, double m, int L, std::int64_t x = 0);

/// H = h + g for a resolved spec in count form.
///
/// h depends only on the prefix-box counts P_W = #particles in [x, x+W]; g
/// collects the currents of shifted window components.
class GradientPotential {
 public:
  explicit GradientPotential(const ModelSpec& resolved_spec, GVariant variant = GVariant::kTelescoping);

  double h(const Configuration& cfg, std::int64_t x) const;
  double g(const Configuration& cfg, std::int64_t x) const;
  double H(const Configuration& cfg, std::int64_t x) const { return h(cfg, x) + g(cfg, x); }

  const ConstraintKernel& kernel() const { return kernel_; }
  /// h_W(q) = sum_{s<q} f_W(s) for each term, q = 0..W+1.
  const std::vector<std::vector<double>>& h_tables() const { return h_tables_; }

 private:
  ConstraintKernel kernel_;
  GVariant variant_;
  std::vector<std::vector<double>> h_tables_;
};

double g_function(const Configuration& cfg, const ModelSpec& resolved_spec,
                  GVariant variant = GVariant::kTelescoping, std::int64_t x = 0);

/// H tabulated on occupation patterns of the sites [x-half_width, x+half_width].
struct TabulatedPotential {
  int half_width = 0;
  std::vector<double> values;
  std::vector<std::uint8_t> known;

  std::uint64_t pattern(const Configuration& cfg, std::int64_t x) const {
    return cfg.extract(x - half_width, 2 * half_width + 1);
  }
  double at(const Configuration& cfg, std::int64_t x) const {
    return values[static_cast<std::size_t>(pattern(cfg, x))];
  }
};

struct GradientReport {
  std::string model;
  int lattice_size = 0;
  double tolerance = 0.0;
  double max_residual = 0.0;
  bool passed = false;
  GVariant variant = GVariant::kTelescoping;
  /// Configuration and bond of the largest residual.
  std::string witness;
  int witness_bond = -1;
  std::optional<TabulatedPotential> solved_h;
};

/// Exhaustive check of c(tau_x eta)(eta(x+1) - eta(x)) = H(tau_{x+1} eta) - H(tau_x eta)
/// over all 2^N configurations and all bonds. Needs 2 W + 2 <= N <= 20.
GradientReport verify_gradient(const ModelSpec& spec, int n_sites, double tol = 1e-10, Exec exec = Exec::kParallel,
                               GVariant variant = GVariant::kTelescoping);

/// Result of solving for H directly from the constraint.
struct GradientSolve {
  bool gradient = false;
  double max_residual = 0.0;
  /// Root-mean-square residual of the least-squares solution.
  double ls_rms_residual = 0.0;
  std::int64_t unknowns = 0;
  std::int64_t equations = 0;
  int components = 0;
  TabulatedPotential potential;
  std::string witness;
  int witness_bond = -1;
};

using ConstraintFn = std::function<double(const Configuration&, std::int64_t)>;

/// Solves H(tau_{x+1} eta) - H(tau_x eta) = c(tau_x eta)(eta(x+1) - eta(x)) for
/// all eta in Omega_N and all x, with H a function of the sites [x-w, x+w].
///
/// Each equation links two window patterns, so the system is a potential problem
/// on a graph: potentials are assigned along a spanning forest and every other
/// equation is checked against them. A nonzero mismatch is a cycle with nonzero
/// circulation, i.e. a proof that no such H exists; the least-squares residual is
/// then reported as well.
GradientSolve solve_gradient(const ConstraintFn& constraint, int half_width, int n_sites, double tol = 1e-10);
GradientSolve solve_gradient(const ModelSpec& spec, int n_sites, double tol = 1e-10);

/// max over eta and x of |D(tau_{x+1} eta) - D(tau_x eta)| with D = (h + g) - solved.
/// Zero when the two potentials differ by a shift-invariant function.
double difference_gradient(const ModelSpec& spec, const TabulatedPotential& solved, int n_sites,
                           Exec exec = Exec::kParallel);

/// Phi_L(alpha) = E_{nu_alpha}[h_L], interpolating series cut at L.
double phi_L(const ModelSpec& spec, int L, double alpha);
/// Phi_L on the uniform grid alpha_i = i/(points-1).
std::vector<double> phi_L_table(const ModelSpec& spec, int L, int points);
/// Number of sites L* in the union of the component ranges of the cut spec.
int phi_support(const ModelSpec& spec, int L);
/// The flux alpha^{p+1}/(p+1) for the limit diffusivity alpha^p of a family
/// (p = n for PMM, n+m for the interpolating model, 0 for SSEP).
double phi_closed_form(const ModelSpec& spec, double alpha);
/// The limit of E[c] under nu_alpha: alpha^n (PMM), binom(L,n) alpha^n (1-alpha)^(L-n)
/// (Bernstein), alpha^(n+m) (interpolating), 1 (SSEP).
double diffusivity_closed_form(const ModelSpec& spec, double alpha);
/// Bound on |E[c] - diffusivity_closed_form| from the truncated series,
/// sum_{k>ell} |binom(m,k)| per interpolating component.
double diffusivity_truncation_bound(const ModelSpec& resolved_spec);

}  // namespace kcsep
