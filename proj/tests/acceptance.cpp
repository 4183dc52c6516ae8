// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Pass criterion numbers as arguments to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kcsep/assumptions.hpp"
#include "kcsep/binomial.hpp"
#include "kcsep/constraints.hpp"
#include "kcsep/gradient.hpp"
#include "kcsep/pde.hpp"
#include "kcsep/simulator.hpp"

using namespace kcsep;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<ModelSpec> gradient_battery() {
  std::vector<ModelSpec> out{ModelSpec::ssep(), ModelSpec::pmm(1), ModelSpec::pmm(2), ModelSpec::pmm(3),
                             ModelSpec::bernstein(1, 2), ModelSpec::bernstein(1, 3), ModelSpec::bernstein(2, 3)};
  for (double m : {0.0, 0.25, 0.5, 0.75, 1.0}) out.push_back(ModelSpec::interpolating(1, m, 4));
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome gradient_identity() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::string worst_model;
  for (const auto& spec : gradient_battery()) {
    const auto r = verify_gradient(spec, 12, 1e-10);
    if (r.max_residual >= worst) {
      worst = r.max_residual;
      worst_model = r.model;
    }
  }
  const double elapsed = seconds_since(t0);
  return {worst <= 1e-10 && elapsed <= 60.0, "max residual " + fmt("%.2e", worst) + " (" + worst_model + "), " +
                                                  fmt("%.1f", elapsed) + " s for 12 models"};
}

Outcome oracle_agreement() {
  double worst_solve = 0.0;
  double worst_diff = 0.0;
  bool all_gradient = true;
  for (const auto& spec : gradient_battery()) {
    const auto s = solve_gradient(spec, 12, 1e-10);
    all_gradient = all_gradient && s.gradient;
    worst_solve = std::max(worst_solve, s.max_residual);
    worst_diff = std::max(worst_diff, difference_gradient(spec, s.potential, 12));
  }
  return {all_gradient && worst_solve <= 1e-10 && worst_diff <= 1e-10,
          "solve residual " + fmt("%.2e", worst_solve) + ", gradient of (h+g) - solved " + fmt("%.2e", worst_diff)};
}

Outcome endpoint_identities() {
  constexpr int kN = 12;
  double worst_m0 = 0.0;
  double worst_m1 = 0.0;
  bool bernstein_exact = true;
  for (int n = 1; n <= 2; ++n) {
    const ConstraintKernel k0(ModelSpec::interpolating(n, 0.0, 3));
    const ConstraintKernel k1(ModelSpec::interpolating(n, 1.0, 3));
    const ConstraintKernel pn(ModelSpec::pmm(n));
    const ConstraintKernel pn1(ModelSpec::pmm(n + 1));
    const ConstraintKernel bnn(ModelSpec::bernstein(n, n));
    for (std::uint64_t mask = 0; mask < (1U << kN); ++mask) {
      const auto cfg = Configuration::from_mask(kN, mask);
      for (int x = 0; x < kN; ++x) {
        const double p = pmm_constraint(cfg, x, n);
        const double p1 = pmm_constraint(cfg, x, n + 1);
        // the series evaluator and the production kernel, both against PMM
        worst_m0 = std::max({worst_m0, std::fabs(interp_constraint(cfg, x, n, 0.0, 3) - p), std::fabs(k0.at(cfg, x) - pn.at(cfg, x))});
        worst_m1 = std::max({worst_m1, std::fabs(interp_constraint(cfg, x, n, 1.0, 3) - p1), std::fabs(k1.at(cfg, x) - pn1.at(cfg, x))});
        bernstein_exact = bernstein_exact && bernstein_constraint(cfg, x, n, n) == p && bnn.at(cfg, x) == pn.at(cfg, x);
      }
    }
  }
  return {worst_m0 <= 1e-12 && worst_m1 <= 1e-12 && bernstein_exact,
          "m=0 gap " + fmt("%.1e", worst_m0) + ", m=1 gap " + fmt("%.1e", worst_m1) +
              (bernstein_exact ? ", B(n,n) = PMM(n) exactly" : ", B(n,n) != PMM(n)")};
}

Outcome diffusivity_formula() {
  double worst = 0.0;
  for (auto [n, L] : {std::pair{0, 2}, std::pair{1, 2}, std::pair{1, 3}, std::pair{2, 3}}) {
    for (int i = 0; i <= 10; ++i) {
      const double a = i / 10.0;
      const double expected = choose(L, n) * std::pow(a, n) * std::pow(1.0 - a, L - n);
      worst = std::max(worst, std::fabs(exact_expectation(ModelSpec::bernstein(n, L), a) - expected));
    }
  }
  return {worst <= 1e-12, "max deviation " + fmt("%.1e", worst) + " on 4 models x 11 points"};
}

Outcome phi_convergence() {
  const auto spec = ModelSpec::interpolating(1, 0.5);
  constexpr int kPoints = 101;
  const auto phi8 = phi_L_table(spec, 8, kPoints);
  const auto phi16 = phi_L_table(spec, 16, kPoints);
  double gap8 = 0.0;
  double gap16 = 0.0;
  double cauchy = 0.0;
  for (int i = 0; i < kPoints; ++i) {
    const double a = static_cast<double>(i) / (kPoints - 1);
    const double target = std::pow(a, 2.5) / 2.5;
    gap8 = std::max(gap8, std::fabs(phi8[i] - target));
    gap16 = std::max(gap16, std::fabs(phi16[i] - target));
    cauchy = std::max(cauchy, std::fabs(phi16[i] - phi8[i]));
  }
  const double bound = 2.0 * BinomialTable(0.5, 16).abs_sum(9, 16);
  return {gap16 < gap8 && cauchy <= bound, "sup gap L=8 " + fmt("%.3e", gap8) + ", L=16 " + fmt("%.3e", gap16) +
                                               "; |Phi16-Phi8| " + fmt("%.3e", cauchy) + " <= " + fmt("%.3e", bound)};
}

Outcome assumption_bundle() {
  constexpr double kCap = 1.0;
  const auto r = check_assumptions(ModelSpec::interpolating(1, 0.5), {64, 256, 1024, 4096}, kCap);
  std::ostringstream d;
  d << "|r|/N";
  for (double v : r.sup_rate_over_N) d << ' ' << fmt("%.3g", v);
  d << "; summed/N";
  for (double v : r.summed_rate_over_N) d << ' ' << fmt("%.3g", v);
  d << " (cap " << kCap << ")";
  return {r.sup_rate_decreasing && r.summed_rate_bounded, d.str()};
}

Outcome regime_certificates() {
  const auto ssep = classify_regime(ModelSpec::ssep());
  const auto pmm2 = classify_regime(ModelSpec::pmm(2));
  bool cluster_ok = false;
  double r_star = 0.0;
  if (pmm2.cluster) {
    const auto check = mobile_cluster_check(ModelSpec::pmm(2), Configuration::from_string(*pmm2.cluster));
    cluster_ok = check.certified && check.r_star > 0.0;
    r_star = check.r_star;
  }
  const bool ok = ssep.regime == Regime::kII && ssep.min_rate == 1.0 && pmm2.regime == Regime::kI &&
                  pmm2.blocked.has_value() && cluster_ok;
  return {ok, "SSEP " + to_string(ssep.regime) + " m=" + fmt("%g", ssep.min_rate) + "; PMM(2) " +
                  to_string(pmm2.regime) + " blocked " + pmm2.blocked.value_or("-") + ", cluster " +
                  pmm2.cluster.value_or("-") + ", r* " + fmt("%.4g", r_star)};
}

Outcome conservation_and_stationarity() {
  constexpr int kN = 256;
  constexpr int kSeeds = 20;
  const Profile half = [](double) { return 0.5; };
  RunConfig config{kN, 0.1, {}, 1.0 / 32};
  for (int i = 0; i <= 10; ++i) config.obs_times.push_back(0.01 * i);
  // binomial spread of one initial density, over the mean of 20 seeds
  const double sigma_global = std::sqrt(0.25 / kN) / std::sqrt(static_cast<double>(kSeeds));
  const double sigma_box = std::sqrt(0.25 / (kN / 32)) / std::sqrt(static_cast<double>(kSeeds));

  bool ok = true;
  std::ostringstream d;
  d << "sigma " << fmt("%.4f", sigma_global);
  for (const auto& [label, mode, param] :
       {std::tuple{"p=1/N", Perturbation::Mode::kPower, 1.0}, std::tuple{"p=N^-1/2", Perturbation::Mode::kPower, 0.5}}) {
    ModelSpec spec = ModelSpec::pmm(2);
    spec.perturbation = {mode, param};
    const auto runs = run_realizations(spec, config, half, 2024, kSeeds);
    bool conserved = true;
    double global = 0.0;
    double box0 = 0.0;
    for (const auto& t : runs) {
      for (int c : t.particle_counts) conserved = conserved && c == t.particle_counts.front();
      double g = 0.0;
      double b = 0.0;
      for (const auto& p : t.profiles) {
        g += p.mean();
        b += p.values[0];
      }
      global += g / static_cast<double>(t.profiles.size());
      box0 += b / static_cast<double>(t.profiles.size());
    }
    global /= kSeeds;
    box0 /= kSeeds;
    const bool pass = conserved && std::fabs(global - 0.5) <= 3 * sigma_global && std::fabs(box0 - 0.5) <= 3 * sigma_box;
    ok = ok && pass;
    d << "; " << label << ": conserved " << (conserved ? "yes" : "no") << ", global " << fmt("%.4f", global)
      << ", box0 " << fmt("%.4f", box0);
  }
  return {ok, d.str()};
}

Outcome hydrodynamic_convergence() {
  const auto t0 = std::chrono::steady_clock::now();
  const Profile ini = [](double u) { return 0.5 + 0.25 * std::sin(2.0 * std::numbers::pi * u); };
  constexpr int kCells = 512;
  bool ok = true;
  std::ostringstream d;
  for (const auto& spec : {ModelSpec::pmm(2), ModelSpec::interpolating(1, 0.5)}) {
    PdeOptions opt;
    opt.cells = kCells;
    opt.horizon = 0.05;
    const auto pde = solve(flux_for(spec, 12), ini, opt);
    std::vector<double> l1;
    for (int n : {128, 256, 512}) {
      const RunConfig config{n, 0.05, {0.05}, 1.0 / 32};
      const auto agg = aggregate(run_realizations(spec, config, ini, 11, 20));
      l1.push_back(compare(agg, pde.states).l1.front());
    }
    const bool pass = l1[1] < l1[0] && l1[2] < l1[1] && l1[2] <= 0.05;
    ok = ok && pass;
    d << (d.tellp() > 0 ? "; " : "") << spec.to_string().substr(0, spec.to_string().find(' ')) << " L1 "
      << fmt("%.4f", l1[0]) << " " << fmt("%.4f", l1[1]) << " " << fmt("%.4f", l1[2]);
  }
  d << "; " << fmt("%.0f", seconds_since(t0)) << " s";
  return {ok, d.str()};
}

Outcome pde_self_checks() {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  const Profile ini = [](double u) { return 0.5 + 0.25 * std::sin(kTwoPi * u); };
  const std::vector<std::pair<std::string, Flux>> fluxes = {
      {"rho", Flux::callback([](double r) { return r; }, 1.0)},
      {"rho^3/3", Flux::callback([](double r) { return r * r * r / 3.0; }, 1.0)},
      {"Phi_12", flux_for(ModelSpec::interpolating(1, 0.5), 12)}};
  // In phase with the initial mode, so the pairing does not vanish by symmetry.
  const SpaceTimeTest G{[=](double u, double t) { return std::sin(kTwoPi * u) * (1.0 + t); },
                        [=](double u, double) { return std::sin(kTwoPi * u); },
                        [=](double u, double t) { return -kTwoPi * kTwoPi * std::sin(kTwoPi * u) * (1.0 + t); }};
  bool ok = true;
  double worst_mass = 0.0;
  std::ostringstream d;
  for (const auto& [name, phi] : fluxes) {
    constexpr int kMassCells = 64;
    const double dt = 0.4 / (kMassCells * kMassCells * phi.max_slope());
    const auto long_run = solve(phi, ini, {kMassCells, 1e5 * dt, {}});
    worst_mass = std::max(worst_mass, std::fabs(mass(long_run.states.back().grid) - mass(long_run.states.front().grid)));
    ok = ok && long_run.steps >= 100000;

    // (M, 1/dt) doubled together: the CFL number doubles with M.
    std::vector<double> res;
    for (auto [M, cfl] : {std::pair{32, 0.025}, std::pair{64, 0.05}, std::pair{128, 0.1}}) {
      const auto sol = solve(phi, ini, {M, 0.02, {}, cfl, true});
      res.push_back(std::fabs(weak_residual(sol.states, ini, G, phi)));
    }
    const double r1 = res[1] / res[0];
    const double r2 = res[2] / res[1];
    ok = ok && r1 <= 0.55 && r2 <= 0.55;
    d << name << " ratios " << fmt("%.3f", r1) << " " << fmt("%.3f", r2) << "; ";
  }
  ok = ok && worst_mass <= 1e-12;
  d << "mass drift " << fmt("%.1e", worst_mass) << " over 1e5 steps";
  return {ok, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"gradient identity", gradient_identity},
      {"oracle agreement", oracle_agreement},
      {"endpoint identities", endpoint_identities},
      {"diffusivity formula", diffusivity_formula},
      {"phi convergence", phi_convergence},
      {"assumption bundle", assumption_bundle},
      {"regime certificates", regime_certificates},
      {"conservation and stationarity", conservation_and_stationarity},
      {"hydrodynamic convergence", hydrodynamic_convergence},
      {"pde self-checks", pde_self_checks},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.passed ? 0 : 1;
    std::printf("%s [%2d] %s: %s\n", o.passed ? "PASS" : "FAIL", id, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
