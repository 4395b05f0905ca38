#include <cmath>
#include <stdexcept>

#include "retard_oc/parallel.hpp"
#include "retard_oc/solve.hpp"
#include "retard_oc/sufficiency.hpp"

namespace retard_oc {
namespace {

struct Node {
  Rational t;
  std::optional<Side> limit;
  std::size_t cell;
  int column;
};

std::vector<Node> sweep_nodes(const CommensurabilityLattice& lat, int per_cell) {
  std::vector<Node> nodes;
  const Rational d = lat.h() / Rational(per_cell);
  for (std::int64_t i = 0; i < lat.cells(); ++i)
    for (int j = 0; j <= per_cell; ++j) {
      std::optional<Side> limit;
      if (j == 0) limit = Side::right;
      if (j == per_cell) limit = Side::left;
      nodes.push_back({lat.breakpoint(i) + Rational(j) * d, limit, static_cast<std::size_t>(i), j});
    }
  return nodes;
}

Trajectory nodal_control(const CommensurabilityLattice& lat, const std::vector<Node>& nodes,
                         const std::vector<Matrix>& values) {
  std::vector<std::vector<double>> times(values.size());
  for (const Node& nd : nodes) times[nd.cell].push_back(nd.t.to_double());
  std::vector<Segment> segs;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto k = static_cast<std::int64_t>(i);
    segs.push_back(Segment{lat.breakpoint(k), lat.breakpoint(k + 1),
                           std::make_shared<NodalCurve>(times[i], values[i])});
  }
  return Trajectory(static_cast<int>(values.front().rows()), lat.a(), std::move(segs));
}

}  // namespace

Trajectory zero_control(const StateLinearProblem& p) {
  return Trajectory::constant(p.a, p.b, Vector::Zero(p.m));
}

Trajectory zero_control(const DelayedProblem& p) {
  return Trajectory::constant(p.a, p.b, Vector::Zero(p.m));
}

SweepResult solve_fbsm(const StateLinearProblem& p, const Trajectory& init_control,
                       const SweepConfig& cfg) {
  if (!(cfg.omega > 0.0 && cfg.omega <= 1.0)) throw std::invalid_argument("omega must lie in (0, 1]");
  if (cfg.grid_points_per_cell < 1) throw std::invalid_argument("grid_points_per_cell must be >= 1");
  const auto lat = p.lattice();
  const auto nodes = sweep_nodes(lat, cfg.grid_points_per_cell);

  std::vector<Matrix> values(static_cast<std::size_t>(lat.cells()),
                             Matrix(p.m, cfg.grid_points_per_cell + 1));
  for (const Node& nd : nodes)
    values[nd.cell].col(nd.column) =
        p.controls.project(init_control.eval(nd.t, nd.limit.value_or(Side::right)));

  SweepResult result;
  result.omega = cfg.omega;
  Trajectory u = nodal_control(lat, nodes, values);
  double prev_cost = INFINITY;
  int rises = 0;

  for (int it = 1; it <= cfg.max_iterations; ++it) {
    CandidateSolution cand{integrate_forward(p, u, cfg.integrator), u, std::nullopt};
    const AdjointTrajectory eta = integrate_adjoint_linear(p, cand, cfg.integrator);
    const double cost = evaluate_cost(p, cand, cfg.quadrature);

    const auto best = parallel_map<Vector>(nodes.size(), [&](std::size_t k) {
      return argmax_control_state_linear(p, cand, eta, nodes[k].t, nodes[k].limit);
    });
    double change = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      auto col = values[nodes[k].cell].col(nodes[k].column);
      const Vector next = (1.0 - result.omega) * col + result.omega * best[k];
      change = std::max(change, (next - col).lpNorm<Eigen::Infinity>());
      col = next;
    }

    SweepIteration rec{it, cost, change, result.omega};
    result.history.push_back(rec);
    if (cfg.log) cfg.log(rec);

    rises = cost > prev_cost ? rises + 1 : 0;
    if (rises >= 2) {
      result.omega *= 0.5;
      rises = 0;
    }
    prev_cost = cost;

    u = nodal_control(lat, nodes, values);
    result.iterations = it;
    result.final_change = change;
    if (change <= cfg.tol) {
      result.converged = true;
      break;
    }
  }

  result.solution.control = u;
  result.solution.state = integrate_forward(p, u, cfg.integrator);
  result.eta = integrate_adjoint_linear(p, result.solution, cfg.integrator);
  result.solution.cost = evaluate_cost(p, result.solution, cfg.quadrature);
  if (!result.converged)
    throw NoConvergenceWith<SweepResult>(
        "forward-backward sweep did not converge in " + std::to_string(cfg.max_iterations) +
            " iterations (last change " + std::to_string(result.final_change) + ")",
        result);
  return result;
}

}  // namespace retard_oc
