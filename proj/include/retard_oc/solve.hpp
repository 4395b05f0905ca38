#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "retard_oc/cost.hpp"
#include "retard_oc/dde.hpp"
#include "retard_oc/errors.hpp"
#include "retard_oc/problem.hpp"

namespace retard_oc {

// ---------------------------------------------------------------------------
// Forward-backward sweep

struct SweepIteration {
  int iteration = 0;
  double cost = 0.0;
  double change = 0.0;
  double omega = 0.0;
};

struct SweepConfig {
  int max_iterations = 200;
  double omega = 0.5;
  double tol = 1e-9;
  /// Control nodes per lattice cell; the control is the per-cell Lagrange
  /// interpolant of its node values.
  int grid_points_per_cell = 64;
  IntegratorConfig integrator;
  QuadratureConfig quadrature;
  std::function<void(const SweepIteration&)> log;
};

struct SweepResult {
  CandidateSolution solution;
  AdjointTrajectory eta;
  bool converged = false;
  int iterations = 0;
  double final_change = 0.0;
  double omega = 0.0;
  std::vector<SweepIteration> history;
};

/// Thrown by the solvers after max_iterations; carries the last iterate.
template <class Result>
class NoConvergenceWith : public NoConvergence {
 public:
  NoConvergenceWith(const std::string& what, Result result)
      : NoConvergence(what), result_(std::move(result)) {}
  const Result& result() const { return result_; }

 private:
  Result result_;
};

/// Fixed-point iteration u <- (1 - omega) u + omega argmax, with omega
/// halved whenever the cost rises two iterations running. Throws
/// NoConvergenceWith<SweepResult> after max_iterations.
SweepResult solve_fbsm(const StateLinearProblem& problem, const Trajectory& init_control,
                       const SweepConfig& cfg = {});

/// u = 0 on [a, b].
Trajectory zero_control(const StateLinearProblem& problem);
Trajectory zero_control(const DelayedProblem& problem);

// ---------------------------------------------------------------------------
// Direct transcription (forward Euler, single shooting)

struct DirectIteration {
  int iteration = 0;
  double objective = 0.0;
  double step = 0.0;
  double stationarity = 0.0;
};

struct TranscriptionConfig {
  int subintervals = 2000;
  int max_iterations = 2000;
  /// Stop when |P(u - grad / dt) - u|_inf falls below this.
  double gradient_tol = 1e-9;
  /// m x subintervals initial control samples; zero when absent.
  std::optional<Matrix> initial_guess;
  bool require_convergence = true;
  IntegratorConfig integrator;
  QuadratureConfig quadrature;
  std::function<void(const DirectIteration&)> log;
};

struct DirectResult {
  /// Control interpolated through the samples, state re-integrated from
  /// it, cost re-scored by quadrature.
  CandidateSolution solution;
  double discrete_objective = 0.0;
  Matrix control_samples;  // m x N_e, u_k at t_k = a + k dt
  Matrix state_samples;    // n x (N_e + 1)
  int iterations = 0;
  bool converged = false;
  double stationarity = 0.0;
  std::vector<DirectIteration> history;
};

/// Cost of the Euler recursion driven by the control samples.
double discrete_objective(const DelayedProblem& problem, const Matrix& control_samples);
double discrete_objective(const StateLinearProblem& problem, const Matrix& control_samples);

/// Exact gradient of discrete_objective by reverse accumulation through the
/// Euler recursion, delayed couplings included. Flattened sample by sample.
Vector discrete_adjoint_gradient(const DelayedProblem& problem, const Matrix& control_samples);
Vector discrete_adjoint_gradient(const StateLinearProblem& problem, const Matrix& control_samples);

/// Projected gradient with Barzilai-Borwein steps and Armijo backtracking.
/// Throws UnboundedDescent when no finite decrease exists and
/// NoConvergenceWith<DirectResult> after max_iterations.
DirectResult solve_direct_euler(const DelayedProblem& problem, const TranscriptionConfig& cfg = {});
DirectResult solve_direct_euler(const StateLinearProblem& problem,
                                const TranscriptionConfig& cfg = {});

/// Per-cell Lagrange interpolant through the samples u_k at t_k.
Trajectory control_from_samples(const CommensurabilityLattice& lattice, const Matrix& samples);

}  // namespace retard_oc
