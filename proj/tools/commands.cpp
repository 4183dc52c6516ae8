#include "commands.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <sstream>

#include "kcsep/assumptions.hpp"
#include "kcsep/constraints.hpp"
#include "kcsep/csv_io.hpp"
#include "kcsep/errors.hpp"
#include "kcsep/gradient.hpp"
#include "kcsep/pde.hpp"
#include "kcsep/simulator.hpp"

namespace kcsep::cli {

using nlohmann::json;

namespace {

// Primary output: config.output when set, the given stream otherwise.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      stream_ = &fallback;
      return;
    }
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw ConfigError("cannot write '" + path + "'");
    stream_ = file_.get();
  }
  std::ostream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

// A spec usable without a lattice: resolved at the given N, or at the smallest
// lattice that fits when every parameter is explicit.
ModelSpec resolved_model(const ExperimentConfig& c) {
  const ModelSpec& spec = c.require_model();
  if (!c.n_list.empty()) return spec.resolve(c.single_n());
  if (!spec.is_resolved()) throw ConfigError("the model has ell = auto; give 'N' to fix it");
  int n = 2 * spec.max_width() + 4;
  for (;;) {
    try {
      return spec.resolve(n);
    } catch (const SizeError&) {
      ++n;
    } catch (const ConfigError&) {
      ++n;
    }
    if (n > 4096) throw ConfigError("no admissible lattice size for " + spec.to_string());
  }
}

std::vector<int> lattice_sizes(const ExperimentConfig& c) {
  if (c.n_list.empty()) throw ConfigError("this command needs 'N' or 'N_list'");
  return c.n_list;
}

std::vector<double> alpha_grid(int points) {
  std::vector<double> a(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) a[i] = static_cast<double>(i) / (points - 1);
  return a;
}

void write_json(std::ostream& out, const json& j) { out << j.dump(2) << "\n"; }

int verify_gradient_cmd(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
  json results = json::array();
  bool all = true;
  for (int n : lattice_sizes(c)) {
    const GradientReport r = verify_gradient(c.require_model(), n, c.tol);
    results.push_back({{"model", r.model},
                       {"N", r.lattice_size},
                       {"max_residual", r.max_residual},
                       {"tolerance", r.tolerance},
                       {"passed", r.passed},
                       {"witness", r.witness},
                       {"witness_bond", r.witness_bond}});
    if (!r.passed) {
      all = false;
      err << "gradient identity fails for " << r.model << " at N=" << n << ": residual " << r.max_residual
          << " at configuration " << r.witness << ", bond " << r.witness_bond << "\n";
    }
  }
  write_json(out, {{"command", "verify-gradient"}, {"passed", all}, {"results", results}});
  return all ? kExitOk : kExitCheckFailed;
}

int solve_gradient_cmd(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
  json results = json::array();
  bool all = true;
  for (int n : lattice_sizes(c)) {
    const ModelSpec spec = c.require_model().resolve(n);
    const GradientSolve s = solve_gradient(spec, n, c.tol);
    json row = {{"model", spec.to_string()},
                {"N", n},
                {"gradient", s.gradient},
                {"max_residual", s.max_residual},
                {"ls_rms_residual", s.ls_rms_residual},
                {"unknowns", s.unknowns},
                {"equations", s.equations},
                {"components", s.components}};
    if (s.gradient) {
      row["difference_gradient"] = difference_gradient(spec, s.potential, n);
    } else {
      all = false;
      row["witness"] = s.witness;
      row["witness_bond"] = s.witness_bond;
      err << "no local potential for " << spec.to_string() << " at N=" << n << ": circulation " << s.max_residual
          << " through configuration " << s.witness << ", bond " << s.witness_bond << "\n";
    }
    results.push_back(row);
  }
  write_json(out, {{"command", "solve-gradient"}, {"passed", all}, {"results", results}});
  return all ? kExitOk : kExitCheckFailed;
}

json regime_json(const RegimeReport& r) {
  json j = {{"regime", to_string(r.regime)}, {"min_rate", r.min_rate}, {"max_path", r.max_path}};
  if (r.blocked) j["blocked"] = *r.blocked;
  if (r.cluster) j["cluster"] = *r.cluster;
  if (r.kappa_star) j["kappa_star"] = *r.kappa_star;
  if (r.r_star) j["r_star"] = *r.r_star;
  return j;
}

int check_assumptions_cmd(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
  const AssumptionReport r = check_assumptions(c.require_model(), lattice_sizes(c));
  write_json(out, {{"command", "check-assumptions"},
                   {"model", r.model},
                   {"N", r.n_list},
                   {"cutoffs", r.cutoffs},
                   {"sup_rate_over_N", r.sup_rate_over_N},
                   {"summed_rate_over_N", r.summed_rate_over_N},
                   {"summed_rate_reference_over_N", r.summed_rate_reference_over_N},
                   {"h_sup", r.h_sup},
                   {"h_sup_bound", r.h_sup_bound},
                   {"h_bar", r.h_bar},
                   {"h_cauchy", r.h_cauchy},
                   {"h_cauchy_bound", r.h_cauchy_bound},
                   {"regime", regime_json(r.regime)},
                   {"sup_rate_decreasing", r.sup_rate_decreasing},
                   {"summed_rate_bounded", r.summed_rate_bounded},
                   {"h_bounded", r.h_bounded},
                   {"h_cauchy_within_bound", r.h_cauchy_within_bound},
                   {"passed", r.passed()}});
  if (!r.passed()) err << "assumption check failed for " << r.model << "\n";
  return r.passed() ? kExitOk : kExitCheckFailed;
}

int classify_regime_cmd(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
  const ModelSpec spec = resolved_model(c);
  const RegimeReport r = classify_regime(spec);
  json j = regime_json(r);
  j["command"] = "classify-regime";
  j["model"] = spec.to_string();
  write_json(out, j);
  if (r.regime == Regime::kNeither) {
    err << "no regime certificate for " << spec.to_string();
    if (r.blocked) err << " (blocked support " << *r.blocked << ", no mobile cluster found)";
    err << "\n";
    return kExitCheckFailed;
  }
  return kExitOk;
}

int mobile_cluster_cmd(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
  if (c.cluster.empty()) throw ConfigError("mobile-cluster needs 'cluster = <0/1 pattern>'");
  const ModelSpec spec = resolved_model(c);
  const ClusterCheck r = mobile_cluster_check(spec, Configuration::from_string(c.cluster));
  json j = {{"command", "mobile-cluster"}, {"model", spec.to_string()}, {"cluster", c.cluster},
            {"certified", r.certified},     {"r_star", r.r_star},         {"max_path", r.max_path}};
  if (!r.certified) {
    j["failed_transition"] = r.failed_transition;
    j["stuck_state"] = r.stuck_state;
    err << "cluster " << c.cluster << " is not mobile: " << r.failed_transition << " stuck at " << r.stuck_state
        << "\n";
  }
  write_json(out, j);
  return r.certified ? kExitOk : kExitCheckFailed;
}

int diffusivity_cmd(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
  const ModelSpec spec = resolved_model(c);
  const double bound = diffusivity_truncation_bound(spec);
  const bool enumerable = 2 * spec.max_width() <= 24;
  out << "# model: " << spec.to_string() << "\n";
  out << "alpha,exact,closed_form,abs_diff,bound\n";
  double worst = 0.0;
  for (double a : alpha_grid(c.points)) {
    const double exact = enumerable ? exact_expectation(spec, a) : expectation_by_counts(spec, a);
    const double closed = diffusivity_closed_form(spec, a);
    const double diff = std::fabs(exact - closed);
    worst = std::max(worst, diff - bound);
    out << csv_number(a) << ',' << csv_number(exact) << ',' << csv_number(closed) << ',' << csv_number(diff) << ','
        << csv_number(bound) << '\n';
  }
  if (worst > c.tol) {
    err << "diffusivity differs from the closed form by " << worst << " beyond the truncation bound\n";
    return kExitCheckFailed;
  }
  return kExitOk;
}

int phi_table_cmd(const ExperimentConfig& c, std::ostream& out, std::ostream&) {
  const ModelSpec& spec = c.require_model();
  const std::vector<int> cutoffs = c.cutoff_list.empty() ? std::vector<int>{c.cutoff} : c.cutoff_list;
  std::vector<std::vector<double>> columns;
  for (int L : cutoffs) columns.push_back(phi_L_table(spec, L, c.points));
  out << "# model: " << spec.to_string() << "\n";
  out << "alpha";
  for (int L : cutoffs) out << ",phi_" << L;
  out << ",closed_form\n";
  const auto alphas = alpha_grid(c.points);
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    out << csv_number(alphas[i]);
    for (const auto& col : columns) out << ',' << csv_number(col[i]);
    out << ',' << csv_number(phi_closed_form(spec, alphas[i])) << '\n';
  }
  return kExitOk;
}

RunConfig run_config(const ExperimentConfig& c) {
  RunConfig r;
  r.n_sites = c.single_n();
  r.horizon = c.horizon;
  r.obs_times = c.obs_times.empty() ? std::vector<double>{c.horizon} : c.obs_times;
  r.eps = c.eps;
  return r;
}

int simulate_cmd(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
  const RunConfig rc = run_config(c);
  const auto runs = run_realizations(c.require_model(), rc, make_profile(c), c.master_seed, c.realizations);
  bool conserved = true;
  json summary = json::array();
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto& t = runs[r];
    for (int count : t.particle_counts) conserved = conserved && count == t.particle_counts.front();
    summary.push_back({{"realization", r}, {"seed", t.seed}, {"events", t.events}, {"absorbed", t.absorbed}});
    if (!c.output.empty()) {
      std::ofstream f(c.output + ".r" + std::to_string(r) + ".csv");
      if (!f) throw ConfigError("cannot write trajectory files with prefix '" + c.output + "'");
      write_trajectory_csv(f, t);
    }
  }
  if (!c.output.empty()) {
    if (runs.size() >= 2) {
      std::ofstream f(c.output + ".aggregate.csv");
      write_aggregate_csv(f, aggregate(runs));
    }
    write_json(out, {{"command", "simulate"},
                     {"model", runs.front().model.to_string()},
                     {"N", rc.n_sites},
                     {"master_seed", c.master_seed},
                     {"conserved", conserved},
                     {"realizations", summary}});
  } else if (runs.size() >= 2) {
    write_aggregate_csv(out, aggregate(runs));
  } else {
    write_trajectory_csv(out, runs.front());
  }
  if (!conserved) {
    err << "particle count changed along a trajectory\n";
    return kExitCheckFailed;
  }
  return kExitOk;
}

Flux config_flux(const ExperimentConfig& c, const ModelSpec& spec) {
  return flux_for(spec, c.flux == "closed_form" ? 0 : c.cutoff);
}

int pde_cmd(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
  const Flux phi = config_flux(c, c.require_model());
  PdeOptions o;
  o.cells = c.cells;
  o.horizon = c.horizon;
  o.snapshot_times = c.obs_times;
  const PdeSolution s = solve(phi, make_profile(c), o);
  write_pde_csv(out, s.states);
  err << "pde: " << s.steps << " steps, dt " << s.dt << ", mass drift "
      << std::fabs(mass(s.states.back().grid) - mass(s.states.front().grid)) << "\n";
  return kExitOk;
}

int compare_cmd(const ExperimentConfig& c, std::ostream& out, std::ostream&) {
  if (c.empirical.empty()) throw ConfigError("compare needs 'empirical = <trajectory or aggregate CSV>'");
  std::ifstream probe(c.empirical);
  if (!probe) throw ConfigError("cannot open " + c.empirical);
  std::string line;
  bool is_aggregate = false;
  while (std::getline(probe, line)) {
    if (!line.empty() && line[0] != '#') {
      is_aggregate = line.find("mean") != std::string::npos;
      break;
    }
  }
  std::vector<double> times;
  std::vector<std::vector<double>> profiles;
  std::string model_text;
  if (is_aggregate) {
    const AggregateProfile a = load_aggregate(c.empirical);
    times = a.times;
    profiles = a.mean;
    model_text = a.model;
  } else {
    const Trajectory t = load_trajectory(c.empirical);
    times = t.times;
    for (const auto& p : t.profiles) profiles.push_back(p.values);
    model_text = t.model.to_string();
  }
  const ModelSpec spec = c.model ? *c.model : ModelSpec::parse(model_text);
  PdeOptions o;
  o.cells = c.cells;
  o.horizon = times.empty() ? 0.0 : times.back();
  o.snapshot_times = times;
  const PdeSolution s = solve(config_flux(c, spec), make_profile(c), o);
  const CompareReport r = compare(times, profiles, s.states);
  write_json(out, {{"command", "compare"},
                   {"model", spec.to_string()},
                   {"times", r.times},
                   {"l1", r.l1},
                   {"test_functions", r.test_names},
                   {"pairing_gap", r.pairing_gap}});
  return kExitOk;
}

int aggregate_cmd(const ExperimentConfig& c, std::ostream& out, std::ostream&) {
  if (c.inputs.size() < 2) throw ConfigError("aggregate needs at least two 'inputs'");
  std::vector<Trajectory> runs;
  for (const auto& path : c.inputs) runs.push_back(load_trajectory(path));
  write_aggregate_csv(out, aggregate(runs));
  return kExitOk;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {
      "verify-gradient", "solve-gradient", "check-assumptions", "classify-regime", "mobile-cluster", "diffusivity",
      "phi-table",       "simulate",       "pde",               "compare",         "aggregate"};
  return names;
}

int run_command(const std::string& command, const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  // simulate with an output prefix writes its own files and reports on `out`
  const bool own_files = command == "simulate";
  Sink sink(own_files ? std::string() : config.output, out);
  std::ostream& o = sink.get();
  if (command == "verify-gradient") return verify_gradient_cmd(config, o, err);
  if (command == "solve-gradient") return solve_gradient_cmd(config, o, err);
  if (command == "check-assumptions") return check_assumptions_cmd(config, o, err);
  if (command == "classify-regime") return classify_regime_cmd(config, o, err);
  if (command == "mobile-cluster") return mobile_cluster_cmd(config, o, err);
  if (command == "diffusivity") return diffusivity_cmd(config, o, err);
  if (command == "phi-table") return phi_table_cmd(config, o, err);
  if (command == "simulate") return simulate_cmd(config, o, err);
  if (command == "pde") return pde_cmd(config, o, err);
  if (command == "compare") return compare_cmd(config, o, err);
  if (command == "aggregate") return aggregate_cmd(config, o, err);
  throw ConfigError("unknown command '" + command + "'");
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kinetically constrained exclusion processes: verifiers, simulator and PDE solver"};
  std::string command;
  std::string config_path;
  std::uint64_t seed = 0;
  app.add_option("command", command, "one of: verify-gradient solve-gradient check-assumptions classify-regime "
                                     "mobile-cluster diffusivity phi-table simulate pde compare aggregate")
      ->required()
      ->check(CLI::IsMember(command_names()));
  app.add_option("config", config_path, "experiment config file")->required();
  auto* seed_opt = app.add_option("--seed", seed, "override master_seed");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }

  if (const char* workers = std::getenv("KCSEP_WORKERS")) {
    const int w = std::atoi(workers);
    if (w < 1) {
      err << "error: KCSEP_WORKERS must be a positive integer\n";
      return kExitConfigError;
    }
    omp_set_num_threads(w);
  }

  try {
    ExperimentConfig config = load_experiment_config(config_path);
    if (*seed_opt) config.master_seed = seed;
    return run_command(command, config, out, err);
  } catch (const ConfigError& e) {
    err << config_path << ": " << e.what() << "\n";
    return kExitConfigError;
  } catch (const SizeError& e) {
    err << config_path << ": " << e.what() << "\n";
    return kExitConfigError;
  }
}

}  // namespace kcsep::cli
