#include "kcsep/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "kcsep/errors.hpp"

namespace kcsep {

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

struct CsvFile {
  std::map<std::string, std::string> header;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<int> row_lines;
};

[[noreturn]] void fail(int line, const std::string& what) {
  throw ConfigError("line " + std::to_string(line) + ": " + what);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

double parse_number(const std::string& s, int line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) fail(line, "not a number: '" + s + "'");
  return v;
}

CsvFile read_csv(std::istream& in, const std::vector<std::string>& expected_columns) {
  CsvFile f;
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      const auto colon = t.find(':');
      if (colon == std::string::npos) fail(no, "header line without ':'");
      f.header[trim(t.substr(1, colon - 1))] = trim(t.substr(colon + 1));
      continue;
    }
    if (f.columns.empty()) {
      f.columns = split(t, ',');
      if (f.columns != expected_columns) fail(no, "unexpected column header '" + t + "'");
      continue;
    }
    const auto cells = split(t, ',');
    if (cells.size() != f.columns.size()) fail(no, "expected " + std::to_string(f.columns.size()) + " fields");
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_number(c, no));
    f.rows.push_back(std::move(row));
    f.row_lines.push_back(no);
  }
  if (f.columns.empty()) fail(no, "missing column header");
  return f;
}

const std::string& need(const CsvFile& f, const std::string& key) {
  const auto it = f.header.find(key);
  if (it == f.header.end()) throw ConfigError("missing header '# " + key + ":'");
  return it->second;
}

int header_int(const CsvFile& f, const std::string& key) { return static_cast<int>(parse_number(need(f, key), 0)); }

std::uint64_t header_u64(const CsvFile& f, const std::string& key) {
  const std::string& s = need(f, key);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError("bad header value for " + key);
  return v;
}

// Rows (t, box, values...) grouped by time, boxes 0..B-1 in order.
void group_rows(const CsvFile& f, int value_columns, std::vector<double>& times,
                std::vector<std::vector<std::vector<double>>>& grouped) {
  for (std::size_t r = 0; r < f.rows.size(); ++r) {
    const auto& row = f.rows[r];
    const int box = static_cast<int>(row[1]);
    if (box == 0) {
      if (!times.empty() && !(row[0] > times.back())) fail(f.row_lines[r], "times must increase");
      times.push_back(row[0]);
      grouped.emplace_back(value_columns);
    } else if (times.empty() || row[0] != times.back() ||
               static_cast<int>(grouped.back()[0].size()) != box) {
      fail(f.row_lines[r], "boxes must be listed 0, 1, ... for each time");
    }
    for (int c = 0; c < value_columns; ++c) grouped.back()[c].push_back(row[2 + c]);
  }
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "# model: " << traj.model.to_string() << "\n";
  out << "# N: " << traj.n_sites << "\n";
  out << "# seed: " << traj.seed << "\n";
  out << "# box_size: " << traj.box_size << "\n";
  out << "# events: " << traj.events << "\n";
  out << "# absorbed: " << (traj.absorbed ? 1 : 0) << "\n";
  out << "t,box,density\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const auto& v = traj.profiles[k].values;
    for (std::size_t b = 0; b < v.size(); ++b) out << csv_number(traj.times[k]) << ',' << b << ',' << csv_number(v[b]) << '\n';
  }
}

Trajectory read_trajectory_csv(std::istream& in) {
  const CsvFile f = read_csv(in, {"t", "box", "density"});
  Trajectory traj;
  traj.model = ModelSpec::parse(need(f, "model"));
  traj.n_sites = header_int(f, "N");
  traj.seed = header_u64(f, "seed");
  traj.box_size = header_int(f, "box_size");
  if (f.header.count("events")) traj.events = static_cast<std::int64_t>(header_u64(f, "events"));
  if (f.header.count("absorbed")) traj.absorbed = header_int(f, "absorbed") != 0;
  std::vector<std::vector<std::vector<double>>> grouped;
  group_rows(f, 1, traj.times, grouped);
  for (auto& g : grouped) {
    DensityProfile p{traj.box_size, std::move(g[0])};
    double particles = 0.0;
    for (double v : p.values) particles += v * traj.box_size;
    traj.particle_counts.push_back(static_cast<int>(std::lround(particles)));
    traj.profiles.push_back(std::move(p));
  }
  return traj;
}

void write_aggregate_csv(std::ostream& out, const AggregateProfile& agg) {
  out << "# model: " << agg.model << "\n";
  out << "# N: " << agg.n_sites << "\n";
  out << "# box_size: " << agg.box_size << "\n";
  out << "# realizations: " << agg.realizations << "\n";
  out << "t,box,mean,stderr\n";
  for (std::size_t k = 0; k < agg.times.size(); ++k) {
    for (std::size_t b = 0; b < agg.mean[k].size(); ++b) {
      out << csv_number(agg.times[k]) << ',' << b << ',' << csv_number(agg.mean[k][b]) << ','
          << csv_number(agg.stderr_[k][b]) << '\n';
    }
  }
}

AggregateProfile read_aggregate_csv(std::istream& in) {
  const CsvFile f = read_csv(in, {"t", "box", "mean", "stderr"});
  AggregateProfile agg;
  agg.model = need(f, "model");
  agg.n_sites = header_int(f, "N");
  agg.box_size = header_int(f, "box_size");
  agg.realizations = header_int(f, "realizations");
  std::vector<std::vector<std::vector<double>>> grouped;
  group_rows(f, 2, agg.times, grouped);
  for (auto& g : grouped) {
    agg.mean.push_back(std::move(g[0]));
    agg.stderr_.push_back(std::move(g[1]));
  }
  return agg;
}

void write_pde_csv(std::ostream& out, const std::vector<PdeState>& states) {
  const std::size_t M = states.empty() ? 0 : states.front().grid.size();
  out << "# M: " << M << "\n";
  out << "t,u,rho\n";
  for (const auto& s : states) {
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
      out << csv_number(s.time) << ',' << csv_number((i + 0.5) / static_cast<double>(M)) << ','
          << csv_number(s.grid[i]) << '\n';
    }
  }
}

std::vector<PdeState> read_pde_csv(std::istream& in) {
  const CsvFile f = read_csv(in, {"t", "u", "rho"});
  const int M = header_int(f, "M");
  if (M < 1) throw ConfigError("M must be positive");
  if (f.rows.size() % static_cast<std::size_t>(M) != 0) throw ConfigError("row count is not a multiple of M");
  std::vector<PdeState> states;
  for (std::size_t r = 0; r < f.rows.size(); ++r) {
    if (r % static_cast<std::size_t>(M) == 0) states.push_back({f.rows[r][0], {}});
    if (f.rows[r][0] != states.back().time) fail(f.row_lines[r], "time changes inside a snapshot");
    states.back().grid.push_back(f.rows[r][2]);
  }
  return states;
}

void write_flux_csv(std::ostream& out, const std::vector<double>& values, const std::string& label) {
  out << "# flux: " << label << "\n";
  out << "alpha,phi\n";
  const double n = static_cast<double>(values.size() - 1);
  for (std::size_t i = 0; i < values.size(); ++i) out << csv_number(i / n) << ',' << csv_number(values[i]) << '\n';
}

std::vector<double> read_flux_csv(std::istream& in) {
  const CsvFile f = read_csv(in, {"alpha", "phi"});
  std::vector<double> values;
  for (const auto& row : f.rows) values.push_back(row[1]);
  return values;
}

Trajectory load_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return read_trajectory_csv(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

AggregateProfile load_aggregate(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return read_aggregate_csv(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace kcsep
