#include "retard_oc/cost.hpp"

#include <stdexcept>

namespace retard_oc {

std::vector<double> cell_quadrature_weights(const QuadratureConfig& cfg) {
  const int steps = cfg.steps_per_cell;
  std::vector<double> w(static_cast<std::size_t>(steps) + 1, 0.0);
  const double d = 1.0 / steps;
  switch (cfg.rule) {
    case QuadratureRule::simpson:
      if (steps < 2 || steps % 2 != 0)
        throw std::invalid_argument("Simpson rule needs an even, positive step count");
      for (int j = 0; j < steps; j += 2) {
        w[j] += d / 3.0;
        w[j + 1] += 4.0 * d / 3.0;
        w[j + 2] += d / 3.0;
      }
      break;
    case QuadratureRule::boole:
      if (steps < 4 || steps % 4 != 0)
        throw std::invalid_argument("Boole rule needs a positive multiple of 4 steps");
      for (int j = 0; j < steps; j += 4) {
        w[j] += 14.0 * d / 45.0;
        w[j + 1] += 64.0 * d / 45.0;
        w[j + 2] += 24.0 * d / 45.0;
        w[j + 3] += 64.0 * d / 45.0;
        w[j + 4] += 14.0 * d / 45.0;
      }
      break;
  }
  return w;
}

double evaluate_cost(const DelayedProblem& problem, const CandidateSolution& cand,
                     const QuadratureConfig& cfg) {
  const auto lat = problem.lattice();
  const auto weights = cell_quadrature_weights(cfg);
  const double h = lat.h().to_double();
  const double r = problem.r.to_double();
  const double s = problem.s.to_double();
  const Trajectory control = with_control_history(cand.control, problem.control_history);

  double total = 0.0;
  for (std::int64_t i = 0; i < lat.cells(); ++i) {
    const double t0 = lat.breakpoint(i).to_double();
    double cell = 0.0;
    for (int j = 0; j <= cfg.steps_per_cell; ++j) {
      const double t = t0 + h * j / cfg.steps_per_cell;
      const Side side = j == cfg.steps_per_cell ? Side::left : Side::right;
      const Vector x = cand.state.eval(t, side);
      const Vector y = cand.state.eval(t - r, side);
      const Vector u = control.eval(t, side);
      const Vector v = control.eval(t - s, side);
      cell += weights[static_cast<std::size_t>(j)] * problem.running_cost(t, x, y, u, v);
    }
    total += h * cell;
  }
  return total + problem.g0(cand.state.eval(lat.b().to_double(), Side::left));
}

double evaluate_cost(const StateLinearProblem& problem, const CandidateSolution& cand,
                     const QuadratureConfig& cfg) {
  return evaluate_cost(problem.to_delayed(), cand, cfg);
}

}  // namespace retard_oc
