#include "kcsep/pde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kcsep/errors.hpp"
#include "kcsep/gradient.hpp"

namespace kcsep {

Flux Flux::table(std::vector<double> values) {
  if (values.size() < 2) throw ConfigError("flux table needs at least two points");
  Flux f;
  const double h = 1.0 / static_cast<double>(values.size() - 1);
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double slope = (values[i] - values[i - 1]) / h;
    if (slope < -1e-12) throw ConfigError("flux table is not nondecreasing near alpha = " + std::to_string(i * h));
    f.max_slope_ = std::max(f.max_slope_, slope);
  }
  f.values_ = std::move(values);
  return f;
}

Flux Flux::callback(std::function<double(double)> phi, double max_slope) {
  if (!(max_slope >= 0.0)) throw ConfigError("flux slope bound must be nonnegative");
  Flux f;
  f.phi_ = std::move(phi);
  f.max_slope_ = max_slope;
  return f;
}

double Flux::operator()(double rho) const {
  if (phi_) return phi_(rho);
  const double x = std::clamp(rho, 0.0, 1.0) * static_cast<double>(values_.size() - 1);
  const auto i = std::min(static_cast<std::size_t>(x), values_.size() - 2);
  const double w = x - static_cast<double>(i);
  return values_[i] + w * (values_[i + 1] - values_[i]);
}

Flux flux_for(const ModelSpec& spec, int L) {
  if (L > 0) return Flux::table(phi_L_table(spec, L, Flux::kTablePoints));
  std::vector<double> values(Flux::kTablePoints);
  for (int i = 0; i < Flux::kTablePoints; ++i) values[i] = phi_closed_form(spec, i / (Flux::kTablePoints - 1.0));
  return Flux::table(std::move(values));
}

double mass(const std::vector<double>& grid) {
  double s = 0.0;
  for (double v : grid) s += v;
  return s / static_cast<double>(grid.size());
}

PdeSolution solve(const Flux& phi, const Profile& rho_ini, const PdeOptions& options) {
  const int M = options.cells;
  if (M < 3) throw ConfigError("PDE grid needs at least 3 cells");
  if (!(options.horizon >= 0.0)) throw ConfigError("PDE horizon must be nonnegative");
  if (!(options.cfl > 0.0 && options.cfl <= 0.5)) throw ConfigError("CFL factor must lie in (0, 0.5]");
  std::vector<double> targets;
  for (double t : options.snapshot_times) {
    if (!(t >= 0.0 && t <= options.horizon)) throw ConfigError("snapshot times must lie in [0, T]");
    targets.push_back(t);
  }
  targets.push_back(options.horizon);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  PdeSolution out;
  std::vector<double> rho(static_cast<std::size_t>(M));
  for (int i = 0; i < M; ++i) {
    rho[i] = rho_ini((i + 0.5) / M);
    if (!(rho[i] >= 0.0 && rho[i] <= 1.0)) throw ConfigError("initial profile must take values in [0, 1]");
  }
  const double m2 = static_cast<double>(M) * M;
  out.dt = phi.max_slope() > 0.0 ? options.cfl / (m2 * phi.max_slope()) : options.horizon;
  out.states.push_back({0.0, rho});

  std::vector<double> flux(static_cast<std::size_t>(M));
  double t = 0.0;
  for (double target : targets) {
    while (t < target) {
      const double dt = std::min(out.dt, target - t);
      const double lambda = dt * m2;
      for (int i = 0; i < M; ++i) flux[i] = phi(rho[i]);
      for (int i = 0; i < M; ++i) {
        const int l = i == 0 ? M - 1 : i - 1;
        const int r = i == M - 1 ? 0 : i + 1;
        rho[i] += lambda * (flux[r] - 2.0 * flux[i] + flux[l]);
      }
      // landing exactly on the target avoids a sliver step from rounding
      t = (target - t - dt <= 1e-15 * std::max(1.0, target)) ? target : t + dt;
      ++out.steps;
      if (options.record_every_step && t < target) out.states.push_back({t, rho});
    }
    if (out.states.back().time != target) out.states.push_back({target, rho});
  }
  return out;
}

double weak_residual(const std::vector<PdeState>& states, const Profile& rho_ini, const SpaceTimeTest& G,
                     const Flux& phi) {
  if (states.empty()) throw ConfigError("weak_residual needs at least one state");
  const std::size_t M = states.front().grid.size();
  auto pair = [&](const std::vector<double>& f, auto&& g) {
    double s = 0.0;
    for (std::size_t i = 0; i < M; ++i) s += f[i] * g((i + 0.5) / M);
    return s / static_cast<double>(M);
  };
  auto integrand = [&](const PdeState& st) {
    std::vector<double> flux(M);
    for (std::size_t i = 0; i < M; ++i) flux[i] = phi(st.grid[i]);
    return pair(st.grid, [&](double u) { return G.d_t(u, st.time); }) +
           pair(flux, [&](double u) { return G.d_uu(u, st.time); });
  };

  std::vector<double> ini(M);
  for (std::size_t i = 0; i < M; ++i) ini[i] = rho_ini((i + 0.5) / M);
  const PdeState& last = states.back();
  double residual = pair(last.grid, [&](double u) { return G.value(u, last.time); }) -
                    pair(ini, [&](double u) { return G.value(u, 0.0); });

  double integral = 0.0;
  double prev_t = 0.0;
  double prev_f = 0.0;
  bool have_prev = false;
  for (const auto& st : states) {
    const double f = integrand(st);
    if (have_prev) integral += 0.5 * (st.time - prev_t) * (f + prev_f);
    prev_t = st.time;
    prev_f = f;
    have_prev = true;
  }
  return residual - integral;
}

double l1_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw ConfigError("cannot compare empty profiles");
  // merge the breakpoints i/|a| and j/|b| with integer arithmetic on the common grid |a||b|
  const long na = static_cast<long>(a.size());
  const long nb = static_cast<long>(b.size());
  long i = 0;
  long j = 0;
  long pos = 0;
  double total = 0.0;
  while (i < na && j < nb) {
    const long end_a = (i + 1) * nb;
    const long end_b = (j + 1) * na;
    const long end = std::min(end_a, end_b);
    total += std::fabs(a[i] - b[j]) * static_cast<double>(end - pos);
    pos = end;
    if (end == end_a) ++i;
    if (end == end_b) ++j;
  }
  return total / static_cast<double>(na * nb);
}

std::vector<std::pair<std::string, TestFunction>> pairing_battery() {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::vector<std::pair<std::string, TestFunction>> out;
  out.emplace_back("1", [](double) { return 1.0; });
  for (int k = 1; k <= 3; ++k) {
    out.emplace_back("cos" + std::to_string(k), [k](double u) { return std::cos(two_pi * k * u); });
    out.emplace_back("sin" + std::to_string(k), [k](double u) { return std::sin(two_pi * k * u); });
  }
  return out;
}

CompareReport compare(const std::vector<double>& times, const std::vector<std::vector<double>>& empirical,
                      const std::vector<PdeState>& states) {
  if (times.size() != empirical.size()) throw ConfigError("empirical times and profiles differ in length");
  CompareReport report;
  const auto battery = pairing_battery();
  for (const auto& [name, g] : battery) report.test_names.push_back(name);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const auto match = std::find_if(states.begin(), states.end(), [&](const PdeState& s) {
      return std::fabs(s.time - times[k]) <= 1e-9 * std::max(1.0, std::fabs(times[k]));
    });
    if (match == states.end()) throw ConfigError("no PDE state at time " + format_double(times[k]));
    report.times.push_back(times[k]);
    report.l1.push_back(l1_distance(empirical[k], match->grid));
    DensityProfile emp{1, empirical[k]};
    DensityProfile pde{1, match->grid};
    std::vector<double> gaps;
    for (const auto& [name, g] : battery) {
      gaps.push_back(std::fabs(pair_with_test_function(emp, g) - pair_with_test_function(pde, g)));
    }
    report.pairing_gap.push_back(std::move(gaps));
  }
  return report;
}

CompareReport compare(const AggregateProfile& empirical, const std::vector<PdeState>& states) {
  return compare(empirical.times, empirical.mean, states);
}

CompareReport compare(const Trajectory& empirical, const std::vector<PdeState>& states) {
  std::vector<std::vector<double>> values;
  for (const auto& p : empirical.profiles) values.push_back(p.values);
  return compare(empirical.times, values, states);
}

}  // namespace kcsep
