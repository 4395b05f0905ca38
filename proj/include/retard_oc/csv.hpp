#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "retard_oc/dde.hpp"
#include "retard_oc/lattice.hpp"

namespace retard_oc {

/// Output times: start + k / per_unit_time up to b, merged with every lattice
/// breakpoint in range. Exact, sorted, no duplicates.
std::vector<Rational> output_grid(const CommensurabilityLattice& lattice, const Rational& start,
                                  int per_unit_time = 500);

/// Writes `t,x_1..x_n,u_1..u_m,eta_1..eta_n`, one row per output time from the
/// start of the state history. Fields are left empty where a trajectory is
/// not defined (eta before a, u before the control history).
void write_trajectories_csv(std::ostream& out, const CommensurabilityLattice& lattice,
                            const Trajectory& state, const Trajectory& control,
                            const AdjointTrajectory* eta, int per_unit_time = 500);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<double> t;
  /// rows x columns without t; empty fields are NaN.
  std::vector<std::vector<double>> values;

  /// Column index among `values`, by header name; throws std::out_of_range.
  std::size_t column(const std::string& name) const;
  /// Linear interpolation between rows; NaN outside the defined stretch.
  double sample(const std::string& name, double at) const;
};

/// Reads what write_trajectories_csv produced. Throws ParseError.
CsvTable read_trajectories_csv(std::istream& in);

/// Piecewise-linear trajectory over [a, b] through the named columns, one
/// segment per lattice cell. A cell uses the rows in [t_i, t_{i+1}) (the last
/// cell includes b), so jumps at breakpoints survive the round trip.
Trajectory csv_trajectory(const CsvTable& table, const std::vector<std::string>& columns,
                          const CommensurabilityLattice& lattice);

}  // namespace retard_oc
