#include "kcsep/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "kcsep/errors.hpp"

namespace kcsep {

double DensityProfile::mean() const {
  if (values.empty()) return 0.0;
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

int box_size_for(int n_sites, double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw ConfigError("eps must lie in (0, 1]");
  const int box = static_cast<int>(std::ceil(eps * n_sites - 1e-9));
  if (box < 1 || n_sites % box != 0)
    throw ConfigError("box width ceil(eps N) = " + std::to_string(box) + " does not divide N = " +
                      std::to_string(n_sites));
  return box;
}

DensityProfile coarse_grain(const Configuration& cfg, int box_size) {
  if (box_size < 1 || cfg.size() % box_size != 0) throw ConfigError("box size must divide N");
  DensityProfile p;
  p.box_size = box_size;
  const int boxes = cfg.size() / box_size;
  p.values.resize(static_cast<std::size_t>(boxes));
  for (int b = 0; b < boxes; ++b) p.values[b] = static_cast<double>(cfg.count_range(b * box_size, box_size)) / box_size;
  return p;
}

Configuration sample_initial(const Profile& profile, int n_sites, std::uint64_t seed) {
  if (n_sites < 1) throw ConfigError("N must be positive");
  Rng rng = Rng::stream(seed, 0);
  Configuration cfg(n_sites);
  for (int x = 0; x < n_sites; ++x) {
    const double p = profile(static_cast<double>(x) / n_sites);
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("initial profile must take values in [0, 1]");
    // always draw, so the stream position does not depend on the profile
    const double u = rng.uniform();
    cfg.set(x, u < p ? 1 : 0);
  }
  return cfg;
}

Simulation::Simulation(const ModelSpec& spec, Configuration initial, Rng rng)
    : spec_(spec.resolve(initial.size())),
      kernel_(spec_),
      cfg_(std::move(initial)),
      rng_(rng),
      index_(cfg_.size()),
      scale_(static_cast<double>(cfg_.size()) * cfg_.size()),
      perturbation_(perturbation_strength(spec_, cfg_.size())) {
  rebuild();
}

double Simulation::fresh_rate(int bond) const {
  if (cfg_.occupation(bond) == cfg_.occupation(bond + 1)) return 0.0;
  return scale_ * (kernel_.at(cfg_, bond) + perturbation_);
}

void Simulation::rebuild() {
  std::vector<double> rates(static_cast<std::size_t>(cfg_.size()));
  for (int b = 0; b < cfg_.size(); ++b) rates[b] = fresh_rate(b);
  index_.assign(rates);
}

double Simulation::rate_drift() const {
  double worst = 0.0;
  double total = 0.0;
  for (int b = 0; b < cfg_.size(); ++b) {
    const double fresh = fresh_rate(b);
    total += fresh;
    const double gap = std::fabs(fresh - index_.rate(b));
    worst = std::max(worst, fresh > 0.0 ? gap / fresh : gap);
  }
  const double total_gap = std::fabs(total - index_.total());
  return std::max(worst, total > 0.0 ? total_gap / total : total_gap);
}

void Simulation::apply(int bond) {
  cfg_.exchange(bond, bond + 1);
  // Sites bond and bond+1 changed; a constraint at b reads [b-W, b+W+1].
  const int radius = kernel_.radius();
  const int span = std::min(2 * radius + 1, cfg_.size());
  for (int d = 0; d < span; ++d) {
    const int b = cfg_.wrap(static_cast<std::int64_t>(bond) - radius + d);
    index_.update(b, fresh_rate(b));
  }
  ++events_;
  if (events_ % kRebuildInterval == 0) rebuild();
}

StepResult Simulation::step() {
  StepResult r;
  const double total = index_.total();
  if (!(total > 0.0)) {
    absorbed_ = true;
    r.absorbed = true;
    return r;
  }
  r.wait = rng_.exponential(total);
  r.bond = index_.find(rng_.uniform() * total);
  time_ += r.wait;
  apply(r.bond);
  return r;
}

void Simulation::advance_to(double t) {
  while (time_ < t) {
    const double total = index_.total();
    if (!(total > 0.0)) {
      absorbed_ = true;
      time_ = t;
      return;
    }
    const double wait = rng_.exponential(total);
    if (time_ + wait > t) {
      // memoryless: the overshooting wait is discarded
      time_ = t;
      return;
    }
    time_ += wait;
    apply(index_.find(rng_.uniform() * total));
  }
}

Trajectory run(const ModelSpec& spec, const RunConfig& config, const Profile& profile, std::uint64_t seed) {
  if (config.n_sites < 1) throw ConfigError("N must be positive");
  if (!(config.horizon >= 0.0)) throw ConfigError("T must be nonnegative");
  for (std::size_t i = 0; i < config.obs_times.size(); ++i) {
    const double t = config.obs_times[i];
    if (!(t >= 0.0 && t <= config.horizon)) throw ConfigError("observation times must lie in [0, T]");
    if (i > 0 && !(t > config.obs_times[i - 1])) throw ConfigError("observation times must be strictly increasing");
  }
  const int box = box_size_for(config.n_sites, config.eps);

  Simulation sim(spec, sample_initial(profile, config.n_sites, seed), Rng::stream(seed, 1));
  Trajectory traj;
  traj.model = sim.spec();
  traj.n_sites = config.n_sites;
  traj.seed = seed;
  traj.box_size = box;
  for (double t : config.obs_times) {
    sim.advance_to(t);
    traj.times.push_back(t);
    traj.profiles.push_back(coarse_grain(sim.configuration(), box));
    traj.particle_counts.push_back(sim.configuration().particle_count());
  }
  sim.advance_to(config.horizon);
  traj.events = sim.events();
  traj.absorbed = sim.absorbed();
  return traj;
}

std::vector<Trajectory> run_realizations(const ModelSpec& spec, const RunConfig& config, const Profile& profile,
                                         std::uint64_t master_seed, int realizations, Exec exec) {
  if (realizations < 1) throw ConfigError("realizations must be >= 1");
  std::vector<Trajectory> out(static_cast<std::size_t>(realizations));
  // validate once on the calling thread so errors surface as exceptions here
  box_size_for(config.n_sites, config.eps);
  spec.resolve(config.n_sites);
  if (exec == Exec::kSerial) {
    for (int r = 0; r < realizations; ++r) out[r] = run(spec, config, profile, realization_seed(master_seed, r));
    return out;
  }
#pragma omp parallel for schedule(dynamic, 1)
  for (int r = 0; r < realizations; ++r) out[r] = run(spec, config, profile, realization_seed(master_seed, r));
  return out;
}

AggregateProfile aggregate(const std::vector<Trajectory>& runs) {
  if (runs.size() < 2) throw ConfigError("aggregate needs at least two realizations");
  const Trajectory& first = runs.front();
  for (const auto& t : runs) {
    bool same = t.times == first.times && t.box_size == first.box_size && t.n_sites == first.n_sites;
    for (std::size_t k = 0; same && k < t.profiles.size(); ++k)
      same = t.profiles[k].values.size() == first.profiles[k].values.size();
    if (!same) throw ConfigError("realizations have different time or box grids");
  }
  AggregateProfile agg;
  agg.model = first.model.to_string();
  agg.n_sites = first.n_sites;
  agg.box_size = first.box_size;
  agg.realizations = static_cast<int>(runs.size());
  agg.times = first.times;
  const double r = static_cast<double>(runs.size());
  for (std::size_t k = 0; k < first.times.size(); ++k) {
    const std::size_t boxes = first.profiles[k].values.size();
    std::vector<double> mean(boxes, 0.0);
    std::vector<double> err(boxes, 0.0);
    for (std::size_t b = 0; b < boxes; ++b) {
      double s = 0.0;
      for (const auto& t : runs) s += t.profiles[k].values[b];
      const double m = s / r;
      double ss = 0.0;
      for (const auto& t : runs) ss += (t.profiles[k].values[b] - m) * (t.profiles[k].values[b] - m);
      mean[b] = m;
      err[b] = std::sqrt(ss / (r - 1.0) / r);
    }
    agg.mean.push_back(std::move(mean));
    agg.stderr_.push_back(std::move(err));
  }
  return agg;
}

double pair_with_test_function(const DensityProfile& profile, const TestFunction& G) {
  const std::size_t m = profile.values.size();
  double s = 0.0;
  for (std::size_t b = 0; b < m; ++b) s += G((static_cast<double>(b) + 0.5) / m) * profile.values[b];
  return s / static_cast<double>(m);
}

double pair_with_test_function(const Configuration& cfg, const TestFunction& G) {
  double s = 0.0;
  for (int x = 0; x < cfg.size(); ++x) {
    if (cfg.occupation(x)) s += G(static_cast<double>(x) / cfg.size());
  }
  return s / cfg.size();
}

}  // namespace kcsep
