#include "kcsep/assumptions.hpp"

#include <bit>
#include <deque>
#include <limits>
#include <map>

#include "kcsep/binomial.hpp"
#include "kcsep/constraints.hpp"
#include "kcsep/errors.hpp"
#include "kcsep/gradient.hpp"

namespace kcsep {

std::string to_string(Regime r) {
  switch (r) {
    case Regime::kI:
      return "I";
    case Regime::kII:
      return "II";
    case Regime::kNeither:
      return "neither";
  }
  return "neither";
}

namespace {

constexpr double kRateFloor = 1e-12;
constexpr int kMaxExhaustiveSupport = 22;

struct Transition {
  std::string name;
  std::string from;
  std::string to;
};

struct SearchResult {
  bool reached = false;
  double r_star = std::numeric_limits<double>::infinity();
  int length = 0;
  std::string stuck;
};

// BFS over the occupations of `seg` sites placed at [pad, pad+seg) of a torus
// with the remaining sites frozen at `exterior`.
SearchResult search_segment(const ConstraintKernel& kernel, const std::string& from, const std::string& to,
                            int exterior, int pad, int torus) {
  const int seg = static_cast<int>(from.size());
  auto encode = [](const std::string& s) {
    std::uint32_t mask = 0;
    for (std::size_t i = 0; i < s.size(); ++i) mask |= static_cast<std::uint32_t>(s[i] == '1') << i;
    return mask;
  };
  const std::uint32_t start = encode(from);
  const std::uint32_t target = encode(to);
  const std::size_t states = std::size_t{1} << seg;
  std::vector<std::int64_t> parent(states, -1);
  std::vector<double> via_rate(states, 0.0);
  std::vector<int> depth(states, 0);
  parent[start] = start;

  Configuration cfg(torus, exterior == 1);
  std::deque<std::uint32_t> queue{start};
  std::uint32_t last = start;
  while (!queue.empty()) {
    const std::uint32_t u = queue.front();
    queue.pop_front();
    last = u;
    if (u == target) break;
    for (int i = 0; i < seg; ++i) cfg.set(pad + i, static_cast<int>((u >> i) & 1U));
    for (int i = 0; i + 1 < seg; ++i) {
      const int a = static_cast<int>((u >> i) & 1U);
      const int b = static_cast<int>((u >> (i + 1)) & 1U);
      if (a == b) continue;
      const std::uint32_t v = u ^ (3U << i);
      if (parent[v] >= 0) continue;
      const double rate = kernel.at(cfg, pad + i);
      if (rate <= kRateFloor) continue;
      parent[v] = u;
      via_rate[v] = rate;
      depth[v] = depth[u] + 1;
      queue.push_back(v);
    }
  }

  SearchResult out;
  if (parent[target] < 0) {
    std::string s(static_cast<std::size_t>(seg), '0');
    for (int i = 0; i < seg; ++i) s[i] = ((last >> i) & 1U) ? '1' : '0';
    out.stuck = s;
    return out;
  }
  out.reached = true;
  out.length = depth[target];
  for (std::uint32_t v = target; v != start; v = static_cast<std::uint32_t>(parent[v])) {
    out.r_star = std::min(out.r_star, via_rate[v]);
  }
  return out;
}

std::string support_string(std::uint64_t bits, int w) {
  std::string left;
  std::string right;
  // bit i < w is site -w+i, bit w+i is site 2+i
  for (int i = 0; i < w; ++i) left += ((bits >> i) & 1U) ? '1' : '0';
  for (int i = 0; i < w; ++i) right += ((bits >> (w + i)) & 1U) ? '1' : '0';
  return left + "|10|" + right;
}

struct SignedTable {
  int width;
  std::vector<double> values;  // indexed by the count in [0, width]
};

// Exact range of sum_t table_t(P_{W_t}), P_W = particles in [0, W], over all
// occupations: a walk over sites with the running count as state.
Range walk_range(std::vector<SignedTable> tables) {
  std::map<int, std::vector<double>> by_width;
  for (auto& t : tables) {
    auto [it, fresh] = by_width.try_emplace(t.width, t.values);
    if (!fresh) {
      for (std::size_t q = 0; q < t.values.size(); ++q) it->second[q] += t.values[q];
    }
  }
  if (by_width.empty()) return {};
  const int last = by_width.rbegin()->first;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> hi{0.0, 0.0};
  std::vector<double> lo{0.0, 0.0};
  for (int site = 0; site <= last; ++site) {
    if (site > 0) {
      std::vector<double> nhi(site + 2, -inf);
      std::vector<double> nlo(site + 2, inf);
      for (int c = 0; c <= site; ++c) {
        for (int add = 0; add <= 1; ++add) {
          nhi[c + add] = std::max(nhi[c + add], hi[c]);
          nlo[c + add] = std::min(nlo[c + add], lo[c]);
        }
      }
      hi.swap(nhi);
      lo.swap(nlo);
    }
    auto it = by_width.find(site);
    if (it == by_width.end()) continue;
    for (int c = 0; c <= site + 1; ++c) {
      hi[c] += it->second[c];
      lo[c] += it->second[c];
    }
  }
  Range r{inf, -inf};
  for (std::size_t c = 0; c < hi.size(); ++c) {
    r.hi = std::max(r.hi, hi[c]);
    r.lo = std::min(r.lo, lo[c]);
  }
  return r;
}

std::vector<SignedTable> h_tables_of(const ModelSpec& resolved, double sign) {
  const GradientPotential potential(resolved);
  std::vector<SignedTable> out;
  const auto& terms = potential.kernel().terms();
  for (std::size_t t = 0; t < terms.size(); ++t) {
    SignedTable st{terms[t].width, potential.h_tables()[t]};
    for (auto& v : st.values) v *= sign;
    out.push_back(std::move(st));
  }
  return out;
}

// 2 sum_{k=lo+1}^{hi} |binom(m,k)| per interpolating component, weighted.
double cauchy_bound(const ModelSpec& a, const ModelSpec& b) {
  if (a.family == Family::kInterpolating && a.m != 0.0 && a.m != 1.0) {
    const int lo = std::min(a.ell, b.ell);
    const int hi = std::max(a.ell, b.ell);
    return 2.0 * BinomialTable(a.m, hi).abs_sum(lo + 1, hi);
  }
  if (a.family == Family::kSuperposition) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.parts.size(); ++i) s += a.parts[i].weight * cauchy_bound(a.parts[i].model, b.parts[i].model);
    return s;
  }
  return 0.0;
}

}  // namespace

ClusterCheck mobile_cluster_check(const ModelSpec& resolved_spec, const Configuration& cluster) {
  const ConstraintKernel kernel(resolved_spec);
  const std::string c = cluster.to_string();
  const int w = cluster.size();
  if (w < 1 || w + 2 > 22) throw SizeError("cluster pattern must have between 1 and 20 sites");
  const std::vector<Transition> transitions = {
      {"C1<->1C", c + "1", "1" + c},
      {"C0<->0C", c + "0", "0" + c},
      {"C01<->C10", c + "01", c + "10"},
      {"01C<->10C", "01" + c, "10" + c},
  };
  const int pad = kernel.radius() + 2;

  ClusterCheck out;
  out.r_star = std::numeric_limits<double>::infinity();
  for (int exterior = 0; exterior <= 1; ++exterior) {
    for (const auto& t : transitions) {
      const int seg = static_cast<int>(t.from.size());
      const int torus = std::max(seg + 2 * pad, 2 * w + 6);
      const SearchResult r = search_segment(kernel, t.from, t.to, exterior, pad, torus);
      if (!r.reached) {
        out.certified = false;
        out.r_star = 0.0;
        out.failed_transition = t.name + " (exterior " + std::to_string(exterior) + ")";
        out.stuck_state = r.stuck;
        return out;
      }
      out.r_star = std::min(out.r_star, r.r_star);
      out.max_path = std::max(out.max_path, r.length);
    }
  }
  out.certified = true;
  if (std::isinf(out.r_star)) out.r_star = 0.0;
  return out;
}

RegimeReport classify_regime(const ModelSpec& resolved_spec, int max_cluster_length) {
  const ConstraintKernel kernel(resolved_spec);
  const int w = kernel.max_width();
  RegimeReport report;

  double min_rate = std::numeric_limits<double>::infinity();
  std::uint64_t argmin = 0;
  if (2 * w <= kMaxExhaustiveSupport) {
    const std::uint64_t count = std::uint64_t{1} << (2 * w);
    for (std::uint64_t bits = 0; bits < count; ++bits) {
      const double v = kernel.at_support(bits);
      if (v < min_rate) {
        min_rate = v;
        argmin = bits;
      }
    }
  } else {
    // Too wide to enumerate: the empty support decides Regime I, a positive
    // count-form lower bound decides Regime II.
    min_rate = kernel.at_support(0);
    if (min_rate > kRateFloor) {
      if (kernel.inf_bound() <= kRateFloor) return report;
      min_rate = kernel.inf_bound();
    }
  }
  report.min_rate = min_rate;
  if (min_rate > kRateFloor) {
    report.regime = Regime::kII;
    return report;
  }
  report.blocked = support_string(argmin, w);

  for (int len = 2; len <= max_cluster_length; ++len) {
    for (int particles = len - 1; particles >= 1; --particles) {
      // descending lexicographic order of the pattern string (site 0 first)
      for (std::int64_t rev = (std::int64_t{1} << len) - 1; rev >= 0; --rev) {
        std::string pattern(static_cast<std::size_t>(len), '0');
        for (int i = 0; i < len; ++i) pattern[i] = ((rev >> (len - 1 - i)) & 1) ? '1' : '0';
        if (std::count(pattern.begin(), pattern.end(), '1') != particles) continue;
        const ClusterCheck check = mobile_cluster_check(resolved_spec, Configuration::from_string(pattern));
        if (!check.certified) continue;
        report.regime = Regime::kI;
        report.cluster = pattern;
        report.kappa_star = len;
        report.r_star = check.r_star;
        report.max_path = check.max_path;
        return report;
      }
    }
  }
  return report;
}

Range h_range(const ModelSpec& resolved_spec) { return walk_range(h_tables_of(resolved_spec, 1.0)); }

double h_distance(const ModelSpec& a, const ModelSpec& b) {
  auto tables = h_tables_of(a, 1.0);
  for (auto& t : h_tables_of(b, -1.0)) tables.push_back(std::move(t));
  return walk_range(std::move(tables)).sup_norm();
}

double h_bar(const ModelSpec& spec) {
  switch (spec.family) {
    case Family::kSsep:
      return 1.0;
    case Family::kPmm:
      return 1.0 / (spec.n + 1);
    case Family::kBernstein:
      return 1.0 / (spec.L + 1);
    case Family::kInterpolating:
      if (spec.m == 0.0) return 1.0 / (spec.n + 1);
      if (spec.m == 1.0) return 1.0 / (spec.n + 2);
      return 1.0 / (spec.n + 1) + 2.0;
    case Family::kSuperposition: {
      double s = 0.0;
      for (const auto& p : spec.parts) s += p.weight * h_bar(p.model);
      return s;
    }
  }
  return 0.0;
}

AssumptionReport check_assumptions(const ModelSpec& spec, const std::vector<int>& n_list, double summed_rate_cap) {
  if (n_list.empty()) throw ConfigError("check_assumptions needs at least one lattice size");
  AssumptionReport report;
  report.model = spec.to_string();
  report.n_list = n_list;
  report.h_bar = h_bar(spec);
  constexpr double kSlack = 1e-12;

  std::vector<ModelSpec> resolved;
  for (int N : n_list) resolved.push_back(spec.resolve(N));

  for (std::size_t a = 0; a < n_list.size(); ++a) {
    const double N = n_list[a];
    const ModelSpec& r = resolved[a];
    const ConstraintKernel kernel(r);
    report.cutoffs.push_back(r.family == Family::kInterpolating ? r.ell : kernel.max_width());

    // |r_N|_inf: the constraint is node independent, so its sup over discordant
    // nodes is its sup; sup_bound is attained at the full support for every
    // built-in family, otherwise it is an upper bound.
    report.sup_rate_over_N.push_back(kernel.sup_bound() / N);

    // Each window j of width W spans W+2 sites, so it is translated W+2 times.
    double summed = 0.0;
    for (const auto& t : kernel.terms()) {
      summed += (t.width + 1) * (t.width + 2) * *std::max_element(t.f.begin(), t.f.end());
    }
    report.summed_rate_over_N.push_back(summed / N);

    const double hs = h_range(r).sup_norm();
    report.h_sup.push_back(hs);
    if (r.family == Family::kInterpolating) {
      const BinomialTable binom(r.m, r.ell);
      double reference = 4.0 * r.n + 2.0;
      for (int k = 1; k <= r.ell; ++k) reference += std::fabs(binom[k]) * (r.n + k + 2);
      report.summed_rate_reference_over_N.push_back(reference / N);
      report.h_sup_bound.push_back(2.0 * binom.abs_sum(1, r.ell) + 1.0 / (r.n + 1));
    } else {
      report.h_sup_bound.push_back(report.h_bar);
    }
  }

  const std::size_t k = n_list.size();
  report.h_cauchy.assign(k, std::vector<double>(k, 0.0));
  report.h_cauchy_bound.assign(k, std::vector<double>(k, 0.0));
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      const double d = h_distance(resolved[a], resolved[b]);
      const double bound = cauchy_bound(resolved[a], resolved[b]);
      report.h_cauchy[a][b] = report.h_cauchy[b][a] = d;
      report.h_cauchy_bound[a][b] = report.h_cauchy_bound[b][a] = bound;
    }
  }

  report.sup_rate_decreasing = true;
  for (std::size_t a = 1; a < k; ++a) {
    if (!(report.sup_rate_over_N[a] < report.sup_rate_over_N[a - 1])) report.sup_rate_decreasing = false;
  }
  report.summed_rate_bounded = true;
  for (double v : report.summed_rate_over_N) {
    if (!(v <= summed_rate_cap)) report.summed_rate_bounded = false;
  }
  report.h_bounded = true;
  for (std::size_t a = 0; a < k; ++a) {
    if (report.h_sup[a] > report.h_bar + kSlack || report.h_sup[a] > report.h_sup_bound[a] + kSlack)
      report.h_bounded = false;
  }
  report.h_cauchy_within_bound = true;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      if (report.h_cauchy[a][b] > report.h_cauchy_bound[a][b] + kSlack) report.h_cauchy_within_bound = false;
    }
  }

  // Regime at the smallest lattice, where the support is smallest.
  std::size_t smallest = 0;
  for (std::size_t a = 1; a < k; ++a) {
    if (n_list[a] < n_list[smallest]) smallest = a;
  }
  report.regime = classify_regime(resolved[smallest]);
  return report;
}

}  // namespace kcsep
