#pragma once

#include <functional>

#include "retard_oc/cost.hpp"
#include "retard_oc/dde.hpp"
#include "retard_oc/problem.hpp"

namespace retard_oc {

/// Delay-free problem on sigma in [0, h] obtained by cutting [a, b] into the
/// lattice cells and stacking them: block i of X(sigma) is x(a + i h + sigma),
/// block i of W(sigma) is u(a + i h + sigma).
struct AugmentedProblem {
  std::int64_t cells = 0;
  Rational a, h;
  int n = 0, m = 0;
  std::int64_t state_offset = 0;    // r / h
  std::int64_t control_offset = 0;  // s / h

  /// F(sigma, X, W), n N components.
  std::function<Vector(double, const Vector&, const Vector&)> dynamics;
  /// Sum over blocks of the original running cost at sigma.
  std::function<double(double, const Vector&, const Vector&)> running_cost;
  /// g0 applied to the last block's value at sigma = h.
  std::function<double(const Vector&)> terminal_cost;

  /// Linkage X_0(0) = phi(a) and X_{i+1}(0) = X_i(h).
  Vector initial_block;

  /// Frozen history injections for blocks with negative index.
  Trajectory state_history;
  Trajectory control_history;

  int stacked_state_dimension() const { return n * static_cast<int>(cells); }
  int stacked_control_dimension() const { return m * static_cast<int>(cells); }
  double length() const { return h.to_double(); }
};

/// Throws RejectsMismatchedLattice when the lattice was built from other
/// constants than the problem's.
AugmentedProblem augment(const DelayedProblem& problem, const CommensurabilityLattice& lattice);
AugmentedProblem augment(const StateLinearProblem& problem, const CommensurabilityLattice& lattice);

/// Stacked trajectories on [0, h].
struct StackedSolution {
  Trajectory state;    // dimension n N
  Trajectory control;  // dimension m N
};

/// Views of a delayed-problem candidate as stacked blocks. At sigma = h each
/// block takes the left limit of the original trajectory.
StackedSolution stack(const CandidateSolution& cand, const AugmentedProblem& aug);
Trajectory stack_control(const Trajectory& control, const AugmentedProblem& aug);

/// Largest seam residual |X_0(0) - phi(a)|, |X_{i+1}(0) - X_i(h)|.
double linkage_residual(const Trajectory& stacked_state, const AugmentedProblem& aug);

/// Inverse of stack(); throws SeamMismatch when linkage_residual > tol.
CandidateSolution reassemble(const StackedSolution& stacked, const AugmentedProblem& aug,
                             double tol = 1e-9);

/// Cost of a stacked solution, with the same quadrature nodes as
/// evaluate_cost uses on the original problem.
double augmented_cost(const AugmentedProblem& aug, const StackedSolution& stacked,
                      const QuadratureConfig& cfg = {});

/// Integrates the augmented ODE as an ordinary system on [0, h]. The
/// linkage is resolved by N block Gauss-Seidel sweeps, each a plain
/// Runge-Kutta run of the whole stacked system.
Trajectory integrate_augmented(const AugmentedProblem& aug, const Trajectory& stacked_control,
                               const IntegratorConfig& cfg = {});

}  // namespace retard_oc
