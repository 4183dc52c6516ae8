#include "kcsep/gradient.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <cmath>
#include <deque>

#include "kcsep/binomial.hpp"
#include "kcsep/errors.hpp"

namespace kcsep {

double v_n(const Configuration& cfg, int n, std::int64_t x) {
  for (int i = 0; i <= n; ++i) {
    if (!cfg.occupation(x + i)) return 0.0;
  }
  return 1.0 / (n + 1);
}

double v_nk(const Configuration& cfg, int n, int k, std::int64_t x) {
  const int count = cfg.count_range(x, n + k + 1);
  const double norm = choose(n + k, k);
  double s = 0.0;
  for (int nu = n + 1; nu <= n + k; ++nu) {
    if (count >= nu + 1) s += choose(nu, n) / norm;
  }
  return s / (n + k + 1);
}

double h_function(const Configuration& cfg, int n, double m, int L, std::int64_t x) {
  const double vn = v_n(cfg, n, x);
  double h = vn;
  double b = 1.0;
  for (int k = 1; k <= L; ++k) {
    b *= (m - k + 1) / k;
    if (b == 0.0) break;
    h += b * ((k % 2) ? -1.0 : 1.0) * (vn - v_nk(cfg, n, k, x));
  }
  return h;
}

GradientPotential::GradientPotential(const ModelSpec& resolved_spec, GVariant variant)
    : kernel_(resolved_spec), variant_(variant) {
  for (const auto& t : kernel_.terms()) {
    std::vector<double> table(static_cast<std::size_t>(t.width) + 2, 0.0);
    for (int q = 1; q <= t.width + 1; ++q) table[q] = table[q - 1] + t.f[static_cast<std::size_t>(q - 1)];
    h_tables_.push_back(std::move(table));
  }
}

double GradientPotential::h(const Configuration& cfg, std::int64_t x) const {
  double total = 0.0;
  const auto& terms = kernel_.terms();
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const int count = cfg.count_range(x, terms[t].width + 1);
    total += h_tables_[t][static_cast<std::size_t>(count)];
  }
  return total;
}

namespace {

// Occupations of [lo, lo + len) with prefix sums, so window counts are O(1).
struct LocalView {
  std::int64_t lo;
  std::vector<std::uint8_t> occ;
  std::vector<int> prefix;

  LocalView(const Configuration& cfg, std::int64_t lo_, int len) : lo(lo_), occ(len), prefix(len + 1, 0) {
    for (int i = 0; i < len; ++i) {
      occ[i] = static_cast<std::uint8_t>(cfg.occupation(lo + i));
      prefix[i + 1] = prefix[i] + occ[i];
    }
  }
  int at(std::int64_t y) const { return occ[static_cast<std::size_t>(y - lo)]; }
  // particles in [a, b]
  int count(std::int64_t a, std::int64_t b) const {
    return prefix[static_cast<std::size_t>(b - lo + 1)] - prefix[static_cast<std::size_t>(a - lo)];
  }
  // n_j^W at bond y: box [y-j, y-j+W+1] minus the node sites y, y+1
  int window(std::int64_t y, int j, int w) const { return count(y - j, y - j + w + 1) - at(y) - at(y + 1); }
};

}  // namespace

double GradientPotential::g(const Configuration& cfg, std::int64_t x) const {
  const int wmax = kernel_.max_width();
  if (wmax == 0) return 0.0;
  const LocalView view(cfg, x - 2 * wmax - 1, 4 * wmax + 4);
  double total = 0.0;
  for (const auto& t : kernel_.terms()) {
    const int w = t.width;
    for (int j = 1; j <= w; ++j) {
      if (variant_ == GVariant::kTelescoping) {
        // -sum_{i=0}^{j-1} c^j(tau_{x+i} eta) (eta(x+i+1) - eta(x+i))
        for (int i = 0; i < j; ++i) {
          const std::int64_t y = x + i;
          const int current = view.at(y + 1) - view.at(y);
          if (current != 0) total -= t.f[static_cast<std::size_t>(view.window(y, j, w))] * current;
        }
      } else {
        // +sum_{i=1}^{j} c^j(tau_{x-i} eta) (eta(x-i) - eta(x-i+1))
        for (int i = 1; i <= j; ++i) {
          const std::int64_t y = x - i;
          const int current = view.at(y) - view.at(y + 1);
          if (current != 0) total += t.f[static_cast<std::size_t>(view.window(y, j, w))] * current;
        }
      }
    }
  }
  return total;
}

double g_function(const Configuration& cfg, const ModelSpec& resolved_spec, GVariant variant, std::int64_t x) {
  return GradientPotential(resolved_spec, variant).g(cfg, x);
}

GradientReport verify_gradient(const ModelSpec& spec, int n_sites, double tol, Exec exec, GVariant variant) {
  const ModelSpec resolved = spec.resolve(n_sites);
  const GradientPotential potential(resolved, variant);
  const int w = potential.kernel().max_width();
  if (n_sites > 20) throw SizeError("verify_gradient enumerates 2^N configurations; N must be <= 20");
  if (n_sites < 2 * w + 2)
    throw SizeError("verify_gradient needs N >= 2W+2 = " + std::to_string(2 * w + 2) + " for " + resolved.to_string());

  const std::int64_t configs = std::int64_t{1} << n_sites;
  auto residual_of = [&](std::int64_t mask, int& bond) {
    const Configuration cfg = Configuration::from_mask(n_sites, static_cast<std::uint64_t>(mask));
    std::vector<double> H(static_cast<std::size_t>(n_sites));
    for (int x = 0; x < n_sites; ++x) H[x] = potential.H(cfg, x);
    double worst = -1.0;
    for (int x = 0; x < n_sites; ++x) {
      const double current = potential.kernel().at(cfg, x) * (cfg.occupation(x + 1) - cfg.occupation(x));
      const double r = std::fabs(current - (H[(x + 1) % n_sites] - H[x]));
      if (r > worst) {
        worst = r;
        bond = x;
      }
    }
    return worst;
  };
  const ArgMax best = reduce_max(configs, exec, [&](std::int64_t mask) {
    int bond = 0;
    return residual_of(mask, bond);
  });

  GradientReport report;
  report.model = resolved.to_string();
  report.lattice_size = n_sites;
  report.tolerance = tol;
  report.variant = variant;
  report.max_residual = best.value;
  report.passed = best.value <= tol;
  int bond = 0;
  residual_of(best.index, bond);
  report.witness = Configuration::from_mask(n_sites, static_cast<std::uint64_t>(best.index)).to_string();
  report.witness_bond = bond;
  return report;
}

GradientSolve solve_gradient(const ConstraintFn& constraint, int half_width, int n_sites, double tol) {
  const int pattern_bits = 2 * half_width + 1;
  if (pattern_bits > 22) throw SizeError("solve_gradient supports potentials on at most 22 sites");
  if (n_sites > 20) throw SizeError("solve_gradient enumerates 2^N configurations; N must be <= 20");
  if (n_sites < pattern_bits + 1) throw SizeError("solve_gradient needs N >= 2w + 2");

  struct Edge {
    std::uint32_t from;
    std::uint32_t to;
    double value;
  };
  const std::int64_t configs = std::int64_t{1} << n_sites;
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(configs * n_sites));
  std::vector<std::int64_t> edge_config;
  edge_config.reserve(edges.capacity());
  for (std::int64_t mask = 0; mask < configs; ++mask) {
    const Configuration cfg = Configuration::from_mask(n_sites, static_cast<std::uint64_t>(mask));
    for (int x = 0; x < n_sites; ++x) {
      const double value = constraint(cfg, x) * (cfg.occupation(x + 1) - cfg.occupation(x));
      const auto from = static_cast<std::uint32_t>(cfg.extract(x - half_width, pattern_bits));
      const auto to = static_cast<std::uint32_t>(cfg.extract(x + 1 - half_width, pattern_bits));
      edges.push_back({from, to, value});
      edge_config.push_back(mask * n_sites + x);
    }
  }

  const std::size_t nodes = std::size_t{1} << pattern_bits;
  std::vector<std::uint32_t> offset(nodes + 1, 0);
  for (const auto& e : edges) {
    ++offset[e.from + 1];
    ++offset[e.to + 1];
  }
  for (std::size_t i = 0; i < nodes; ++i) offset[i + 1] += offset[i];
  std::vector<std::uint32_t> adj(offset.back());
  std::vector<std::uint32_t> fill(offset.begin(), offset.end() - 1);
  for (std::uint32_t k = 0; k < edges.size(); ++k) {
    adj[fill[edges[k].from]++] = k;
    adj[fill[edges[k].to]++] = k;
  }

  GradientSolve out;
  out.potential.half_width = half_width;
  out.potential.values.assign(nodes, 0.0);
  out.potential.known.assign(nodes, 0);
  auto& H = out.potential.values;
  auto& known = out.potential.known;
  for (std::uint32_t root = 0; root < nodes; ++root) {
    if (known[root] || offset[root] == offset[root + 1]) continue;
    ++out.components;
    known[root] = 1;
    std::deque<std::uint32_t> queue{root};
    while (!queue.empty()) {
      const std::uint32_t u = queue.front();
      queue.pop_front();
      for (std::uint32_t p = offset[u]; p < offset[u + 1]; ++p) {
        const Edge& e = edges[adj[p]];
        const std::uint32_t v = (e.from == u) ? e.to : e.from;
        if (known[v]) continue;
        H[v] = (e.from == u) ? H[u] + e.value : H[u] - e.value;
        known[v] = 1;
        queue.push_back(v);
      }
    }
  }

  std::size_t worst = 0;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const double r = std::fabs(H[edges[k].to] - H[edges[k].from] - edges[k].value);
    if (r > out.max_residual) {
      out.max_residual = r;
      worst = k;
    }
  }
  std::int64_t used = 0;
  for (auto flag : known) used += flag;
  out.unknowns = used;
  out.equations = static_cast<std::int64_t>(edges.size());
  out.gradient = out.max_residual <= tol;
  out.witness = Configuration::from_mask(n_sites, static_cast<std::uint64_t>(edge_config[worst] / n_sites)).to_string();
  out.witness_bond = static_cast<int>(edge_config[worst] % n_sites);

  if (out.gradient) {
    double ss = 0.0;
    for (const auto& e : edges) ss += std::pow(H[e.to] - H[e.from] - e.value, 2);
    out.ls_rms_residual = std::sqrt(ss / static_cast<double>(edges.size()));
    return out;
  }

  // Inconsistent system: report the least-squares fit as well.
  std::vector<std::int64_t> column(nodes, -1);
  std::int64_t cols = 0;
  for (std::size_t i = 0; i < nodes; ++i) {
    if (known[i]) column[i] = cols++;
  }
  Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(edges.size()), cols);
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(edges.size()));
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (edges[k].from != edges[k].to) {
      triplets.emplace_back(static_cast<int>(k), static_cast<int>(column[edges[k].to]), 1.0);
      triplets.emplace_back(static_cast<int>(k), static_cast<int>(column[edges[k].from]), -1.0);
    }
    rhs[static_cast<Eigen::Index>(k)] = edges[k].value;
  }
  A.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::LeastSquaresConjugateGradient<Eigen::SparseMatrix<double>> solver;
  solver.setTolerance(1e-12);
  solver.setMaxIterations(20000);
  solver.compute(A);
  Eigen::VectorXd start(cols);
  for (std::size_t i = 0; i < nodes; ++i) {
    if (column[i] >= 0) start[column[i]] = H[i];
  }
  const Eigen::VectorXd sol = solver.solveWithGuess(rhs, start);
  out.ls_rms_residual = (A * sol - rhs).norm() / std::sqrt(static_cast<double>(edges.size()));
  for (std::size_t i = 0; i < nodes; ++i) {
    if (column[i] >= 0) H[i] = sol[column[i]];
  }
  return out;
}

GradientSolve solve_gradient(const ModelSpec& spec, int n_sites, double tol) {
  const ModelSpec resolved = spec.resolve(n_sites);
  const ConstraintKernel kernel(resolved);
  return solve_gradient([&](const Configuration& cfg, std::int64_t x) { return kernel.at(cfg, x); },
                        kernel.max_width(), n_sites, tol);
}

namespace {

// E[h] with P_W ~ Binomial(W+1, alpha) for each term.
double expected_h(const GradientPotential& potential, double alpha) {
  const auto& terms = potential.kernel().terms();
  double total = 0.0;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const int box = terms[t].width + 1;
    for (int q = 0; q <= box; ++q) total += potential.h_tables()[t][q] * bernstein_basis(q, box, alpha);
  }
  return total;
}

}  // namespace

double difference_gradient(const ModelSpec& spec, const TabulatedPotential& solved, int n_sites, Exec exec) {
  const GradientPotential potential(spec.resolve(n_sites));
  const ArgMax worst = reduce_max(std::int64_t{1} << n_sites, exec, [&](std::int64_t mask) {
    const Configuration cfg = Configuration::from_mask(n_sites, static_cast<std::uint64_t>(mask));
    std::vector<double> d(static_cast<std::size_t>(n_sites));
    for (int x = 0; x < n_sites; ++x) d[x] = potential.H(cfg, x) - solved.at(cfg, x);
    double w = 0.0;
    for (int x = 0; x < n_sites; ++x) w = std::max(w, std::fabs(d[(x + 1) % n_sites] - d[x]));
    return w;
  });
  return worst.value;
}

double phi_L(const ModelSpec& spec, int L, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
  if (L < 1) throw ConfigError("cutoff L must be >= 1");
  return expected_h(GradientPotential(spec.with_cutoff(L)), alpha);
}

std::vector<double> phi_L_table(const ModelSpec& spec, int L, int points) {
  if (L < 1) throw ConfigError("cutoff L must be >= 1");
  if (points < 2) throw ConfigError("a flux table needs at least two points");
  const GradientPotential potential(spec.with_cutoff(L));
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) out[i] = expected_h(potential, static_cast<double>(i) / (points - 1));
  return out;
}

int phi_support(const ModelSpec& spec, int L) { return 2 * spec.with_cutoff(L).max_width() + 2; }

double phi_closed_form(const ModelSpec& spec, double alpha) {
  switch (spec.family) {
    case Family::kSsep:
      return alpha;
    case Family::kPmm:
      return std::pow(alpha, spec.n + 1) / (spec.n + 1);
    case Family::kInterpolating: {
      const double p = spec.n + spec.m + 1.0;
      return std::pow(alpha, p) / p;
    }
    case Family::kBernstein: {
      // integral of binom(L,n) a^n (1-a)^(L-n): (1/(L+1)) sum_{q>n} B_{q,L+1}(alpha)
      double s = 0.0;
      for (int q = spec.n + 1; q <= spec.L + 1; ++q) s += bernstein_basis(q, spec.L + 1, alpha);
      return s / (spec.L + 1);
    }
    case Family::kSuperposition: {
      double s = 0.0;
      for (const auto& p : spec.parts) s += p.weight * phi_closed_form(p.model, alpha);
      return s;
    }
  }
  return 0.0;
}

double diffusivity_closed_form(const ModelSpec& spec, double alpha) {
  switch (spec.family) {
    case Family::kSsep:
      return 1.0;
    case Family::kPmm:
      return std::pow(alpha, spec.n);
    case Family::kBernstein:
      return bernstein_basis(spec.n, spec.L, alpha);
    case Family::kInterpolating:
      return std::pow(alpha, spec.n + spec.m);
    case Family::kSuperposition: {
      double s = 0.0;
      for (const auto& p : spec.parts) s += p.weight * diffusivity_closed_form(p.model, alpha);
      return s;
    }
  }
  return 0.0;
}

double diffusivity_truncation_bound(const ModelSpec& resolved_spec) {
  switch (resolved_spec.family) {
    case Family::kInterpolating:
      if (resolved_spec.m == 0.0 || resolved_spec.m == 1.0) return 0.0;
      // sum_{k>=1} |binom(m,k)| = 1 for m in (0,1)
      return std::max(0.0, 1.0 - BinomialTable(resolved_spec.m, resolved_spec.ell).abs_sum(1, resolved_spec.ell));
    case Family::kSuperposition: {
      double s = 0.0;
      for (const auto& p : resolved_spec.parts) s += p.weight * diffusivity_truncation_bound(p.model);
      return s;
    }
    default:
      return 0.0;
  }
}

}  // namespace kcsep
