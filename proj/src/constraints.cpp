#include "kcsep/constraints.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <map>

#include "kcsep/binomial.hpp"
#include "kcsep/errors.hpp"

namespace kcsep {

namespace {

CountTerm bernstein_term(int n, int L, double weight) {
  CountTerm t{L, std::vector<double>(static_cast<std::size_t>(L) + 1, 0.0)};
  t.f[static_cast<std::size_t>(n)] = weight / (L + 1);
  return t;
}

CountTerm aux_term(int n, int k, double weight) {
  const int width = n + k;
  CountTerm t{width, std::vector<double>(static_cast<std::size_t>(width) + 1, 0.0)};
  const double norm = choose(width, n);
  for (int s = n + 1; s <= width; ++s) t.f[static_cast<std::size_t>(s)] = weight * choose(s, n) / norm / (width + 1);
  return t;
}

void collect_terms(const ModelSpec& spec, double weight, std::vector<CountTerm>& out) {
  switch (spec.family) {
    case Family::kSsep:
      out.push_back(CountTerm{0, {weight}});
      return;
    case Family::kPmm:
      out.push_back(bernstein_term(spec.n, spec.n, weight));
      return;
    case Family::kBernstein:
      out.push_back(bernstein_term(spec.n, spec.L, weight));
      return;
    case Family::kInterpolating: {
      if (spec.m == 0.0) {
        out.push_back(bernstein_term(spec.n, spec.n, weight));
        return;
      }
      if (spec.m == 1.0) {
        out.push_back(bernstein_term(spec.n + 1, spec.n + 1, weight));
        return;
      }
      if (spec.ell == 0) throw ConfigError("interpolating model has an unresolved ell");
      const BinomialTable binom(spec.m, spec.ell);
      // c = delta p_n + sum_k a_k p_{n,k},  a_k = -(-1)^k binom(m, k) >= 0
      double delta = 1.0;
      for (int k = 1; k <= spec.ell; ++k) {
        const double a = -((k % 2) ? -binom[k] : binom[k]);
        delta -= a;
        out.push_back(aux_term(spec.n, k, weight * a));
      }
      out.push_back(bernstein_term(spec.n, spec.n, weight * delta));
      return;
    }
    case Family::kSuperposition:
      for (const auto& p : spec.parts) collect_terms(p.model, weight * p.weight, out);
      return;
  }
}

}  // namespace

std::vector<CountTerm> count_terms(const ModelSpec& spec) {
  spec.validate();
  std::vector<CountTerm> raw;
  collect_terms(spec, 1.0, raw);
  std::map<int, CountTerm> merged;
  for (auto& t : raw) {
    auto [it, fresh] = merged.try_emplace(t.width, t);
    if (!fresh) {
      for (std::size_t s = 0; s < t.f.size(); ++s) it->second.f[s] += t.f[s];
    }
  }
  std::vector<CountTerm> out;
  for (auto& [w, t] : merged) out.push_back(std::move(t));
  return out;
}

ConstraintKernel::ConstraintKernel(const ModelSpec& resolved_spec) : terms_(count_terms(resolved_spec)) {
  for (const auto& t : terms_) max_width_ = std::max(max_width_, t.width);
}

double ConstraintKernel::from_sides(const std::uint8_t* left, const std::uint8_t* right) const {
  constexpr int kStack = 128;
  std::array<int, kStack> lc_stack{};
  std::array<int, kStack> rc_stack{};
  std::vector<int> lc_heap;
  std::vector<int> rc_heap;
  int* lc = lc_stack.data();
  int* rc = rc_stack.data();
  if (max_width_ + 1 > kStack) {
    lc_heap.resize(static_cast<std::size_t>(max_width_) + 1);
    rc_heap.resize(static_cast<std::size_t>(max_width_) + 1);
    lc = lc_heap.data();
    rc = rc_heap.data();
  }
  lc[0] = 0;
  rc[0] = 0;
  for (int a = 0; a < max_width_; ++a) {
    lc[a + 1] = lc[a] + left[a];
    rc[a + 1] = rc[a] + right[a];
  }
  double total = 0.0;
  for (const auto& t : terms_) {
    const double* f = t.f.data();
    const int w = t.width;
    double s = 0.0;
    for (int j = 0; j <= w; ++j) s += f[lc[j] + rc[w - j]];
    total += s;
  }
  return total;
}

double ConstraintKernel::from_masks(std::uint64_t left, std::uint64_t right) const {
  const int w = max_width_;
  std::array<int, 65> lc{};
  std::array<int, 65> rc{};
  // lc[a]: particles at sites -1..-a, the top a bits of `left`
  for (int a = 1; a <= w; ++a) {
    lc[a] = std::popcount(left >> (w - a));
    rc[a] = std::popcount(a == 64 ? right : right & ((std::uint64_t{1} << a) - 1));
  }
  double total = 0.0;
  for (const auto& t : terms_) {
    const double* f = t.f.data();
    const int tw = t.width;
    double s = 0.0;
    for (int j = 0; j <= tw; ++j) s += f[lc[j] + rc[tw - j]];
    total += s;
  }
  return total;
}

double ConstraintKernel::at(const Configuration& cfg, std::int64_t x) const {
  const int w = max_width_;
  if (w <= 64 && 2 * w + 2 <= cfg.size()) return from_masks(cfg.extract(x - w, w), cfg.extract(x + 2, w));
  std::vector<std::uint8_t> left(static_cast<std::size_t>(w));
  std::vector<std::uint8_t> right(static_cast<std::size_t>(w));
  for (int a = 0; a < w; ++a) {
    left[a] = static_cast<std::uint8_t>(cfg.occupation(x - 1 - a));
    right[a] = static_cast<std::uint8_t>(cfg.occupation(x + 2 + a));
  }
  return from_sides(left.data(), right.data());
}

double ConstraintKernel::at_support(std::uint64_t bits) const {
  const int w = max_width_;
  if (2 * w > 64) throw SizeError("at_support packs at most 64 sites");
  const std::uint64_t left = w == 0 ? 0 : bits & ((std::uint64_t{1} << w) - 1);
  const std::uint64_t right = w == 0 ? 0 : bits >> w;
  return from_masks(left, right);
}

double ConstraintKernel::sup_bound() const {
  double s = 0.0;
  for (const auto& t : terms_) s += (t.width + 1) * *std::max_element(t.f.begin(), t.f.end());
  return s;
}

double ConstraintKernel::inf_bound() const {
  double s = 0.0;
  for (const auto& t : terms_) s += (t.width + 1) * *std::min_element(t.f.begin(), t.f.end());
  return s;
}

double bernstein_constraint(const Configuration& cfg, std::int64_t x, int n, int L) {
  if (n < 0 || L < n) throw ConfigError("bernstein constraint needs 0 <= n <= L");
  int hits = 0;
  for (int j = 0; j <= L; ++j) hits += window_count(cfg, x, node_window(j, L)) == n;
  return static_cast<double>(hits) / (L + 1);
}

double pmm_constraint(const Configuration& cfg, std::int64_t x, int n) {
  if (n < 1) throw ConfigError("pmm constraint needs n >= 1");
  return bernstein_constraint(cfg, x, n, n);
}

double interp_aux_constraint(const Configuration& cfg, std::int64_t x, int n, int k) {
  if (n < 1 || k < 1) throw ConfigError("auxiliary constraint needs n >= 1 and k >= 1");
  const int width = n + k;
  const double norm = choose(width, n);
  double s = 0.0;
  for (int j = 0; j <= width; ++j) {
    const int cnt = window_count(cfg, x, node_window(j, width));
    if (cnt >= n + 1) s += choose(cnt, n) / norm;
  }
  return s / (width + 1);
}

double interp_constraint(const Configuration& cfg, std::int64_t x, int n, double m, int ell) {
  if (n < 1) throw ConfigError("interpolating constraint needs n >= 1");
  if (!(m >= 0.0 && m <= 1.0)) throw ConfigError("interpolating constraint needs m in [0, 1]");
  if (ell < 2) throw ConfigError("interpolating constraint needs ell >= 2");
  const double pn = pmm_constraint(cfg, x, n);
  double c = pn;
  double b = 1.0;
  for (int k = 1; k <= ell; ++k) {
    b *= (m - k + 1) / k;
    if (b == 0.0) break;
    const double sign = (k % 2) ? -1.0 : 1.0;
    c += b * sign * (pn - interp_aux_constraint(cfg, x, n, k));
  }
  return c;
}

double constraint_value(const Configuration& cfg, std::int64_t x, const ModelSpec& spec) {
  switch (spec.family) {
    case Family::kSsep:
      return 1.0;
    case Family::kPmm:
      return pmm_constraint(cfg, x, spec.n);
    case Family::kBernstein:
      return bernstein_constraint(cfg, x, spec.n, spec.L);
    case Family::kInterpolating: {
      const int ell = spec.ell == 0 ? default_ell(cfg.size()) : spec.ell;
      return interp_constraint(cfg, x, spec.n, spec.m, ell);
    }
    case Family::kSuperposition: {
      double c = 0.0;
      for (const auto& p : spec.parts) {
        if (p.weight != 0.0) c += p.weight * constraint_value(cfg, x, p.model);
      }
      return c;
    }
  }
  return 0.0;
}

double bond_rate(const Configuration& cfg, std::int64_t x, const ModelSpec& spec) {
  if (cfg.occupation(x) == cfg.occupation(x + 1)) return 0.0;
  return constraint_value(cfg, x, spec) + perturbation_strength(spec, cfg.size());
}

double exact_expectation(const ModelSpec& spec, double alpha, Exec exec) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
  const ConstraintKernel kernel(spec);
  const int sites = 2 * kernel.max_width();
  if (sites > 24) throw SizeError("constraint support of " + std::to_string(sites) + " sites exceeds 24");
  std::vector<double> weight(static_cast<std::size_t>(sites) + 1);
  for (int k = 0; k <= sites; ++k) weight[k] = std::pow(alpha, k) * std::pow(1.0 - alpha, sites - k);
  return reduce_sum(std::int64_t{1} << sites, exec, [&](std::int64_t mask) {
    const auto bits = static_cast<std::uint64_t>(mask);
    return kernel.at_support(bits) * weight[static_cast<std::size_t>(std::popcount(bits))];
  });
}

double bernstein_basis(int n, int L, double alpha) {
  return choose(L, n) * std::pow(alpha, n) * std::pow(1.0 - alpha, L - n);
}

double expectation_by_counts(const ModelSpec& spec, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
  double total = 0.0;
  for (const auto& t : count_terms(spec)) {
    double s = 0.0;
    for (int c = 0; c <= t.width; ++c) s += t.f[static_cast<std::size_t>(c)] * bernstein_basis(c, t.width, alpha);
    total += (t.width + 1) * s;
  }
  return total;
}

}  // namespace kcsep
