#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "kcsep/pde.hpp"
#include "kcsep/simulator.hpp"

namespace kcsep {

/// 17 significant digits, enough for an exact double round trip.
std::string csv_number(double v);

// Every file starts with "# key: value" header lines followed by a column
// header row. Readers throw ConfigError with the offending line number.

void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
Trajectory read_trajectory_csv(std::istream& in);

void write_aggregate_csv(std::ostream& out, const AggregateProfile& agg);
AggregateProfile read_aggregate_csv(std::istream& in);

void write_pde_csv(std::ostream& out, const std::vector<PdeState>& states);
std::vector<PdeState> read_pde_csv(std::istream& in);

/// Rows (alpha, phi) on a uniform alpha grid.
void write_flux_csv(std::ostream& out, const std::vector<double>& values, const std::string& label);
std::vector<double> read_flux_csv(std::istream& in);

Trajectory load_trajectory(const std::string& path);
AggregateProfile load_aggregate(const std::string& path);

}  // namespace kcsep
