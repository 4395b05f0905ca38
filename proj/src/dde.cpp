#include "retard_oc/dde.hpp"

#include <algorithm>
#include <stdexcept>

#include "retard_oc/differentiation.hpp"
#include "retard_oc/errors.hpp"

namespace retard_oc {
namespace {

using Rhs = StageRhs;

Trajectory assemble(const CommensurabilityLattice& lat, int n,
                    const std::vector<std::shared_ptr<const NodalCurve>>& cells) {
  std::vector<Segment> segs;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto k = static_cast<std::int64_t>(i);
    segs.push_back(Segment{lat.breakpoint(k), lat.breakpoint(k + 1), cells[i]});
  }
  return Trajectory(n, lat.a(), std::move(segs));
}

void require_cover(const Trajectory& traj, const Rational& from, const Rational& to,
                   const char* what) {
  if (traj.empty() || !traj.covers(from) || !traj.covers(to))
    throw OutOfDomain(std::string(what) + " does not cover [" + from.str() + ", " + to.str() +
                      "]");
}

void check_config(const IntegratorConfig& cfg) {
  if (cfg.substeps_per_cell < 1) throw std::invalid_argument("substeps_per_cell must be >= 1");
}

}  // namespace

std::shared_ptr<const NodalCurve> integrate_interval(const Tableau& tab, double t_from,
                                                     double t_to, int steps, Vector& z,
                                                     const StageRhs& rhs, bool dense) {
  const bool forward = t_to > t_from;
  const double H = (t_to - t_from) / steps;
  const std::size_t stages = tab.stages();
  const auto n = z.size();
  Matrix values(n, steps + 1), derivs(n, steps + 1);
  std::vector<double> times(static_cast<std::size_t>(steps) + 1);
  std::vector<Vector> k(stages);

  auto side_at = [forward](bool at_from, bool at_to) {
    return (forward ? at_to : at_from) ? Side::left : Side::right;
  };

  for (int j = 0; j < steps; ++j) {
    for (std::size_t st = 0; st < stages; ++st) {
      const double c = tab.c[st];
      const bool at_from = j == 0 && c == 0.0;
      const bool at_to = j == steps - 1 && c == 1.0;
      const double t = at_to ? t_to : t_from + (j + c) * H;
      Vector zs = z;
      for (std::size_t q = 0; q < st; ++q)
        if (tab.a[st][q] != 0.0) zs += (H * tab.a[st][q]) * k[q];
      k[st] = rhs(t, zs, side_at(at_from, at_to));
    }
    times[j] = t_from + j * H;
    values.col(j) = z;
    derivs.col(j) = k[0];
    for (std::size_t st = 0; st < stages; ++st)
      if (tab.b[st] != 0.0) z += (H * tab.b[st]) * k[st];
    if (!z.allFinite()) throw NonFiniteDerivative("integration produced a non-finite value");
  }
  times[steps] = t_to;
  values.col(steps) = z;
  derivs.col(steps) = rhs(t_to, z, side_at(false, true));

  if (!forward) {
    std::reverse(times.begin(), times.end());
    values = values.rowwise().reverse().eval();
    derivs = derivs.rowwise().reverse().eval();
  }
  if (dense) return std::make_shared<NodalCurve>(std::move(times), std::move(values),
                                                 std::move(derivs));
  return std::make_shared<NodalCurve>(std::move(times), std::move(values));
}

Trajectory integrate_forward(const DelayedProblem& p, const Trajectory& control_in,
                             const IntegratorConfig& cfg) {
  check_config(cfg);
  const auto lat = p.lattice();
  const Tableau& tab = tableau_for(cfg.scheme);
  const std::int64_t N = lat.cells();
  const std::int64_t dr = lat.state_shift();
  const double r = p.r.to_double(), s = p.s.to_double();

  const Trajectory control = with_control_history(control_in, p.control_history);
  require_cover(control, p.a - p.s, p.b, "control");
  require_cover(p.state_history, p.a - p.r, p.a, "state history");

  std::vector<std::shared_ptr<const NodalCurve>> cells(static_cast<std::size_t>(N));
  Vector x = p.state_history.eval(p.a, Side::left);
  for (std::int64_t i = 0; i < N; ++i) {
    const std::int64_t k = i - dr;
    Rhs rhs = [&](double t, const Vector& z, Side side) -> Vector {
      Vector y;
      if (dr == 0)
        y = z;
      else if (k < 0)
        y = p.state_history.eval(t - r, side);
      else
        y = cells[static_cast<std::size_t>(k)]->value(t - r);
      return p.dynamics(t, z, y, control.eval(t, side), control.eval(t - s, side));
    };
    cells[static_cast<std::size_t>(i)] =
        integrate_interval(tab, lat.breakpoint(i).to_double(), lat.breakpoint(i + 1).to_double(),
                       cfg.substeps_per_cell, x, rhs, cfg.dense_output);
  }
  return assemble(lat, p.n, cells).with_history(p.state_history);
}

Trajectory integrate_forward(const StateLinearProblem& p, const Trajectory& control,
                             const IntegratorConfig& cfg) {
  return integrate_forward(p.to_delayed(), control, cfg);
}

AdjointTrajectory integrate_adjoint_linear(const StateLinearProblem& p,
                                           const CandidateSolution& cand,
                                           const IntegratorConfig& cfg) {
  check_config(cfg);
  const auto lat = p.lattice();
  const Tableau& tab = tableau_for(cfg.scheme);
  const std::int64_t N = lat.cells();
  const std::int64_t dr = lat.state_shift();
  const double r = p.r.to_double();
  const Trajectory& x = cand.state;
  require_cover(x, p.a - p.r, p.b, "candidate state");

  std::vector<std::shared_ptr<const NodalCurve>> cells(static_cast<std::size_t>(N));
  Vector eta = Vector::Zero(p.n);
  for (std::int64_t i = N - 1; i >= 0; --i) {
    const bool advance = i < N - dr;
    Rhs rhs = [&](double t, const Vector& z, Side side) -> Vector {
      const Vector xt = x.eval(t, side);
      auto [gx, gy] = p.state_cost_grad(t, xt, x.eval(t - r, side));
      Vector out = gx - p.A(t).transpose() * z;
      if (advance) {
        const double ta = t + r;
        if (cfg.on_advanced_lookup) cfg.on_advanced_lookup(ta);
        const Vector ea = dr == 0 ? z : cells[static_cast<std::size_t>(i + dr)]->value(ta);
        auto [ax, ay] = p.state_cost_grad(ta, x.eval(ta, side), xt);
        out += ay - p.A_D(ta).transpose() * ea;
      }
      return out;
    };
    cells[static_cast<std::size_t>(i)] =
        integrate_interval(tab, lat.breakpoint(i + 1).to_double(), lat.breakpoint(i).to_double(),
                       cfg.substeps_per_cell, eta, rhs, cfg.dense_output);
  }
  return AdjointTrajectory{assemble(lat, p.n, cells)};
}

AdjointTrajectory integrate_adjoint_nonlinear(const DelayedProblem& p,
                                              const CandidateSolution& cand,
                                              const IntegratorConfig& cfg,
                                              std::optional<Vector> terminal_value) {
  check_config(cfg);
  const auto lat = p.lattice();
  const Tableau& tab = tableau_for(cfg.scheme);
  const std::int64_t N = lat.cells();
  const std::int64_t dr = lat.state_shift();
  const double r = p.r.to_double(), s = p.s.to_double();
  const Trajectory& x = cand.state;
  const Trajectory u = with_control_history(cand.control, p.control_history);
  require_cover(x, p.a - p.r, p.b, "candidate state");
  require_cover(u, p.a - p.s, p.b, "candidate control");

  auto partials = [&](double t, const Vector& xx, const Vector& yy, const Vector& uu,
                      const Vector& vv) {
    return cfg.analytic_partials ? problem_partials(p, t, xx, yy, uu, vv)
                                 : finite_difference_partials(p, t, xx, yy, uu, vv);
  };

  Vector eta;
  if (terminal_value) {
    eta = *terminal_value;
  } else if (!p.terminal.is_free()) {
    throw std::invalid_argument("fixed terminal state: the adjoint terminal value must be supplied");
  } else if (p.terminal_cost) {
    eta = -fd_gradient(p.terminal_cost, x.eval(p.b.to_double(), Side::left));
  } else {
    eta = Vector::Zero(p.n);
  }

  std::vector<std::shared_ptr<const NodalCurve>> cells(static_cast<std::size_t>(N));
  for (std::int64_t i = N - 1; i >= 0; --i) {
    const bool advance = i < N - dr;
    Rhs rhs = [&](double t, const Vector& z, Side side) -> Vector {
      const Vector xt = x.eval(t, side);
      const Partials P = partials(t, xt, x.eval(t - r, side), u.eval(t, side), u.eval(t - s, side));
      Vector out = P.f0x - P.fx.transpose() * z;
      if (advance) {
        const double ta = t + r;
        if (cfg.on_advanced_lookup) cfg.on_advanced_lookup(ta);
        const Vector ea = dr == 0 ? z : cells[static_cast<std::size_t>(i + dr)]->value(ta);
        const Partials Q =
            partials(ta, x.eval(ta, side), xt, u.eval(ta, side), u.eval(ta - s, side));
        out += Q.f0y - Q.fy.transpose() * ea;
      }
      return out;
    };
    cells[static_cast<std::size_t>(i)] =
        integrate_interval(tab, lat.breakpoint(i + 1).to_double(), lat.breakpoint(i).to_double(),
                       cfg.substeps_per_cell, eta, rhs, cfg.dense_output);
  }
  return AdjointTrajectory{assemble(lat, p.n, cells)};
}

}  // namespace retard_oc
