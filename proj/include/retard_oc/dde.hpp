#pragma once

#include <functional>
#include <optional>

#include "retard_oc/problem.hpp"
#include "retard_oc/runge_kutta.hpp"

namespace retard_oc {

struct IntegratorConfig {
  int substeps_per_cell = 64;
  /// Keep node derivatives and interpolate with Hermite; otherwise the
  /// cell curves are plain Lagrange interpolants of the node values.
  bool dense_output = true;
  Scheme scheme = Scheme::rk6;
  /// Use the problem's hand-coded partials in the nonlinear adjoint
  /// instead of central differences.
  bool analytic_partials = false;
  /// Called with t + r each time the adjoint reads an advanced value.
  std::function<void(double)> on_advanced_lookup;
};

/// Costate on [a, b], stored as a column n-vector (the transpose of the
/// row covector eta).
struct AdjointTrajectory {
  Trajectory eta;

  Vector operator()(double t, Side side = Side::right) const { return eta.eval(t, side); }
};

/// Method of steps, cell by cell over the lattice. The returned
/// trajectory includes the problem's state history.
Trajectory integrate_forward(const DelayedProblem& problem, const Trajectory& control,
                             const IntegratorConfig& cfg = {});
Trajectory integrate_forward(const StateLinearProblem& problem, const Trajectory& control,
                             const IntegratorConfig& cfg = {});

/// Backward method of steps from eta(b) = 0 with advanced arguments
/// eta(t + r) read from cells already computed.
AdjointTrajectory integrate_adjoint_linear(const StateLinearProblem& problem,
                                           const CandidateSolution& cand,
                                           const IntegratorConfig& cfg = {});

/// Same for the general problem: eta' = f0_x - eta f_x + chi (f0_y - eta f_y)(t + r),
/// eta(b) = -grad g0(x(b)). A fixed terminal point needs `terminal_value`.
AdjointTrajectory integrate_adjoint_nonlinear(const DelayedProblem& problem,
                                              const CandidateSolution& cand,
                                              const IntegratorConfig& cfg = {},
                                              std::optional<Vector> terminal_value = {});

}  // namespace retard_oc
