#include "kcsep/experiment_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "kcsep/errors.hpp"

namespace kcsep {

namespace {

[[noreturn]] void fail(int line, const std::string& what) {
  throw ConfigError("line " + std::to_string(line) + ": " + what);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, ',')) {
    const std::string t = trim(cur);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

double to_double(const std::string& s, int line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) fail(line, "not a number: '" + s + "'");
  return v;
}

int to_int(const std::string& s, int line) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) fail(line, "not an integer: '" + s + "'");
  return v;
}

std::uint64_t to_u64(const std::string& s, int line) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) fail(line, "not a nonnegative integer: '" + s + "'");
  return v;
}

struct Entry {
  std::string value;
  int line;
};

ModelSpec build_model(const std::map<std::string, Entry>& block, int open_line) {
  auto get = [&](const std::string& k) -> const Entry* {
    const auto it = block.find(k);
    return it == block.end() ? nullptr : &it->second;
  };
  ModelSpec spec;
  if (const Entry* s = get("spec")) {
    if (block.size() > 1 + (get("perturbation") ? 1 : 0))
      fail(s->line, "'spec' cannot be combined with family parameters");
    try {
      spec = ModelSpec::parse(s->value);
    } catch (const ConfigError& e) {
      fail(s->line, e.what());
    }
  } else {
    const Entry* fam = get("family");
    if (!fam) fail(open_line, "model block needs 'family' or 'spec'");
    auto need_int = [&](const std::string& k) {
      const Entry* e = get(k);
      if (!e) fail(fam->line, "family '" + fam->value + "' needs '" + k + "'");
      return to_int(e->value, e->line);
    };
    const std::string& f = fam->value;
    std::set<std::string> allowed{"family", "perturbation"};
    if (f == "ssep") {
      spec = ModelSpec::ssep();
    } else if (f == "pmm") {
      spec = ModelSpec::pmm(need_int("n"));
      allowed.insert("n");
    } else if (f == "bernstein") {
      spec = ModelSpec::bernstein(need_int("n"), need_int("L"));
      allowed.insert({"n", "L"});
    } else if (f == "interpolating") {
      const Entry* m = get("m");
      if (!m) fail(fam->line, "family 'interpolating' needs 'm'");
      int ell = 0;
      if (const Entry* e = get("ell"); e && e->value != "auto") ell = to_int(e->value, e->line);
      spec = ModelSpec::interpolating(need_int("n"), to_double(m->value, m->line), ell);
      allowed.insert({"n", "m", "ell"});
    } else {
      fail(fam->line, "unknown family '" + f + "' (superpositions go through 'spec')");
    }
    for (const auto& [k, e] : block) {
      if (!allowed.count(k)) fail(e.line, "key '" + k + "' does not apply to family '" + f + "'");
    }
  }
  if (const Entry* p = get("perturbation")) {
    try {
      spec.perturbation = ModelSpec::parse("ssep perturbation=" + p->value).perturbation;
    } catch (const ConfigError& e) {
      fail(p->line, e.what());
    }
  }
  try {
    spec.validate();
  } catch (const ConfigError& e) {
    fail(open_line, e.what());
  }
  return spec;
}

}  // namespace

int ExperimentConfig::single_n() const {
  if (n_list.size() != 1) throw ConfigError("this command needs exactly one lattice size 'N'");
  return n_list.front();
}

const ModelSpec& ExperimentConfig::require_model() const {
  if (!model) throw ConfigError("this command needs a model block");
  return *model;
}

ExperimentConfig parse_experiment_config(std::string_view text) {
  static const std::set<std::string> kTopKeys = {
      "N",      "N_list", "T",  "obs_times", "eps",    "realizations", "master_seed", "output", "profile",
      "M",      "L",      "L_list", "tol",   "points", "cluster",      "flux",        "inputs", "empirical"};
  static const std::set<std::string> kModelKeys = {"family", "n", "L", "m", "ell", "perturbation", "spec"};

  ExperimentConfig c;
  std::map<std::string, Entry> block;
  bool in_block = false;
  bool seen_block = false;
  int block_line = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string t = trim(raw.substr(0, raw.find('#')));
    if (t.empty()) continue;
    if (!in_block && (t == "model {" || t == "model{")) {
      if (seen_block) fail(line, "duplicate model block");
      in_block = seen_block = true;
      block_line = line;
      continue;
    }
    if (t == "}") {
      if (!in_block) fail(line, "'}' without an open block");
      in_block = false;
      c.model = build_model(block, block_line);
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) fail(line, "expected 'key = value'");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (value.empty()) fail(line, "empty value for '" + key + "'");

    if (in_block) {
      if (!kModelKeys.count(key)) fail(line, "unknown model key '" + key + "'");
      if (!block.emplace(key, Entry{value, line}).second) fail(line, "repeated model key '" + key + "'");
      continue;
    }
    if (!kTopKeys.count(key)) fail(line, "unknown key '" + key + "'");
    if (!c.given.insert(key).second) fail(line, "repeated key '" + key + "'");

    if (key == "N") {
      c.n_list = {to_int(value, line)};
    } else if (key == "N_list") {
      c.n_list.clear();
      for (const auto& v : split_list(value)) c.n_list.push_back(to_int(v, line));
    } else if (key == "T") {
      c.horizon = to_double(value, line);
      if (c.horizon < 0.0) fail(line, "T must be nonnegative");
    } else if (key == "obs_times") {
      for (const auto& v : split_list(value)) c.obs_times.push_back(to_double(v, line));
    } else if (key == "eps") {
      c.eps = to_double(value, line);
      if (!(c.eps > 0.0 && c.eps <= 1.0)) fail(line, "eps must lie in (0, 1]");
    } else if (key == "realizations") {
      c.realizations = to_int(value, line);
      if (c.realizations < 1) fail(line, "realizations must be >= 1");
    } else if (key == "master_seed") {
      c.master_seed = to_u64(value, line);
    } else if (key == "output") {
      c.output = value;
    } else if (key == "profile") {
      std::istringstream ps(value);
      ps >> c.profile_kind;
      c.profile_params.clear();
      std::string tok;
      while (ps >> tok) c.profile_params.push_back(to_double(tok, line));
      try {
        make_profile(c.profile_kind, c.profile_params);
      } catch (const ConfigError& e) {
        fail(line, e.what());
      }
    } else if (key == "M") {
      c.cells = to_int(value, line);
      if (c.cells < 3) fail(line, "M must be >= 3");
    } else if (key == "L") {
      c.cutoff = to_int(value, line);
      if (c.cutoff < 0) fail(line, "L must be >= 0");
    } else if (key == "L_list") {
      for (const auto& v : split_list(value)) c.cutoff_list.push_back(to_int(v, line));
    } else if (key == "tol") {
      c.tol = to_double(value, line);
      if (!(c.tol > 0.0)) fail(line, "tol must be positive");
    } else if (key == "points") {
      c.points = to_int(value, line);
      if (c.points < 2) fail(line, "points must be >= 2");
    } else if (key == "cluster") {
      if (value.find_first_not_of("01") != std::string::npos) fail(line, "cluster must be a 0/1 string");
      c.cluster = value;
    } else if (key == "flux") {
      if (value != "phi_L" && value != "closed_form") fail(line, "flux must be 'phi_L' or 'closed_form'");
      c.flux = value;
    } else if (key == "inputs") {
      c.inputs = split_list(value);
    } else if (key == "empirical") {
      c.empirical = value;
    }
    if ((key == "N" || key == "N_list")) {
      if (c.has("N") && c.has("N_list")) fail(line, "give either 'N' or 'N_list', not both");
      for (int n : c.n_list) {
        if (n < 2) fail(line, "lattice sizes must be >= 2");
      }
    }
  }
  if (in_block) fail(line, "unterminated model block");
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

Profile make_profile(const std::string& kind, const std::vector<double>& params) {
  if (kind == "constant") {
    if (params.size() != 1) throw ConfigError("profile 'constant' takes one value");
    const double a = params[0];
    if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("constant profile must lie in [0, 1]");
    return [a](double) { return a; };
  }
  if (kind == "sine") {
    if (params.size() != 2) throw ConfigError("profile 'sine' takes a mean and an amplitude");
    const double a = params[0];
    const double b = params[1];
    if (!(a - std::fabs(b) >= 0.0 && a + std::fabs(b) <= 1.0)) throw ConfigError("sine profile leaves [0, 1]");
    return [a, b](double u) { return a + b * std::sin(2.0 * std::numbers::pi * u); };
  }
  throw ConfigError("unknown profile '" + kind + "' (constant | sine)");
}

}  // namespace kcsep
