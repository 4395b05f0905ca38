#include "retard_oc/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "retard_oc/errors.hpp"

namespace retard_oc {
namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::vector<Rational> output_grid(const CommensurabilityLattice& lattice, const Rational& start,
                                  int per_unit_time) {
  if (per_unit_time < 1) throw std::invalid_argument("per_unit_time must be positive");
  std::vector<Rational> grid;
  const Rational step(1, per_unit_time);
  for (Rational t = start; t <= lattice.b(); t += step) grid.push_back(t);
  for (std::int64_t i = lattice.cell_of(start); i <= lattice.cells(); ++i) {
    const Rational bp = lattice.breakpoint(i);
    if (start <= bp && bp <= lattice.b()) grid.push_back(bp);
  }
  grid.push_back(lattice.b());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

void write_trajectories_csv(std::ostream& out, const CommensurabilityLattice& lattice,
                            const Trajectory& state, const Trajectory& control,
                            const AdjointTrajectory* eta, int per_unit_time) {
  const int n = state.dimension(), m = control.dimension();
  out << "t";
  for (int i = 1; i <= n; ++i) out << ",x_" << i;
  for (int i = 1; i <= m; ++i) out << ",u_" << i;
  for (int i = 1; i <= n; ++i) out << ",eta_" << i;
  out << "\n";

  for (const Rational& t : output_grid(lattice, state.history_start(), per_unit_time)) {
    out << format(t.to_double());
    const Vector x = state.eval(t);
    for (int i = 0; i < n; ++i) out << ',' << format(x[i]);
    const bool has_u = !control.empty() && control.covers(t);
    const Vector u = has_u ? control.eval(t) : Vector();
    for (int i = 0; i < m; ++i) out << ',' << (has_u ? format(u[i]) : "");
    const bool has_eta = eta && !(t < lattice.a()) && eta->eta.covers(t);
    const Vector e = has_eta ? eta->eta.eval(t) : Vector();
    for (int i = 0; i < n; ++i) out << ',' << (has_eta ? format(e[i]) : "");
    out << "\n";
  }
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t j = 1; j < header.size(); ++j)
    if (header[j] == name) return j - 1;
  throw std::out_of_range("no column '" + name + "'");
}

double CsvTable::sample(const std::string& name, double at) const {
  const std::size_t j = column(name);
  const auto it = std::lower_bound(t.begin(), t.end(), at);
  if (it == t.end()) return kNaN;
  const std::size_t k = static_cast<std::size_t>(it - t.begin());
  if (*it == at || k == 0) return *it == at ? values[k][j] : kNaN;
  const double t0 = t[k - 1], t1 = t[k];
  const double w = (at - t0) / (t1 - t0);
  return (1.0 - w) * values[k - 1][j] + w * values[k][j];
}

CsvTable read_trajectories_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "empty file");
  table.header = split(line);
  if (table.header.empty() || table.header.front() != "t") throw ParseError(1, "first column must be t");
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != table.header.size())
      throw ParseError(lineno, "expected " + std::to_string(table.header.size()) + " fields");
    std::vector<double> row;
    for (std::size_t j = 0; j < fields.size(); ++j) {
      double v = kNaN;
      if (!fields[j].empty()) {
        char* end = nullptr;
        v = std::strtod(fields[j].c_str(), &end);
        if (end != fields[j].c_str() + fields[j].size())
          throw ParseError(lineno, "malformed number '" + fields[j] + "'");
      }
      if (j == 0) {
        if (std::isnan(v)) throw ParseError(lineno, "missing time");
        if (!table.t.empty() && v <= table.t.back()) throw ParseError(lineno, "times must increase");
        table.t.push_back(v);
      } else {
        row.push_back(v);
      }
    }
    table.values.push_back(std::move(row));
  }
  return table;
}

Trajectory csv_trajectory(const CsvTable& table, const std::vector<std::string>& columns,
                          const CommensurabilityLattice& lattice) {
  std::vector<std::size_t> idx;
  for (const auto& c : columns) idx.push_back(table.column(c));
  const int dim = static_cast<int>(idx.size());
  std::vector<Segment> segments;
  for (std::int64_t i = 0; i < lattice.cells(); ++i) {
    const Rational start = lattice.breakpoint(i), end = lattice.breakpoint(i + 1);
    const bool last = i + 1 == lattice.cells();
    const double lo = start.to_double(), hi = end.to_double();
    std::vector<double> nodes;
    std::vector<Vector> vals;
    for (std::size_t k = 0; k < table.t.size(); ++k) {
      const double t = table.t[k];
      if (t < lo || t > hi || (t == hi && !last)) continue;
      Vector v(dim);
      bool ok = true;
      for (int j = 0; j < dim; ++j) {
        v[j] = table.values[k][idx[j]];
        ok = ok && !std::isnan(v[j]);
      }
      if (!ok) continue;
      nodes.push_back(t);
      vals.push_back(v);
    }
    if (nodes.size() < 2) throw Error("not enough rows in cell " + std::to_string(i));
    auto f = [nodes, vals](double t) {
      const auto it = std::upper_bound(nodes.begin(), nodes.end(), t);
      std::size_t k = it == nodes.begin() ? 1 : static_cast<std::size_t>(it - nodes.begin());
      k = std::min(k, nodes.size() - 1);
      const double w = (t - nodes[k - 1]) / (nodes[k] - nodes[k - 1]);
      return Vector((1.0 - w) * vals[k - 1] + w * vals[k]);
    };
    segments.push_back(Segment{start, end, std::make_shared<FunctionCurve>(dim, f)});
  }
  return Trajectory(dim, lattice.a(), std::move(segments));
}

}  // namespace retard_oc
