#pragma once

#include <functional>
#include <string>
#include <vector>

#include "retard_oc/dde.hpp"
#include "retard_oc/problem.hpp"
#include "retard_oc/sufficiency.hpp"

namespace retard_oc {

/// A problem known by name, with whatever closed-form data it comes with.
/// Factories are lazy so that building the registry stays cheap.
struct Example {
  std::string name;
  std::string summary;
  /// Verification command that applies: "verify-linear" or "verify-hj".
  std::string verify;

  std::function<StateLinearProblem()> linear;  // empty for general problems
  std::function<DelayedProblem()> delayed;
  std::function<CandidateSolution()> candidate;
  /// Closed-form costate, same sign convention as the integrators.
  std::function<AdjointTrajectory()> adjoint;
  /// Costate handed to the verifier instead of the integrated one.
  std::function<AdjointTrajectory()> adjoint_override;
  std::function<ValueFunctionCandidate()> value_function;
  Feedback feedback;

  bool is_state_linear() const { return static_cast<bool>(linear); }
  DelayedProblem general() const { return linear ? linear().to_delayed() : delayed(); }
};

class Registry {
 public:
  Registry() = default;
  /// The two worked examples, the trivial fixtures and the perturbed variants.
  static Registry builtin();

  void add(Example example);
  /// Throws UnknownProblem.
  const Example& get(const std::string& name) const;
  bool contains(const std::string& name) const;
  const std::vector<Example>& all() const { return examples_; }
  bool empty() const { return examples_.empty(); }

 private:
  std::vector<Example> examples_;
};

/// Piecewise scalar trajectory from closed-form pieces; main part starts at
/// `main_start`.
struct ScalarPiece {
  Rational start, end;
  std::function<double(double)> f;
};
Trajectory scalar_piecewise(const Rational& main_start, const std::vector<ScalarPiece>& pieces);

// State-linear example: minimize int_0^4 x + 100 u^2 subject to
// x' = x + x(t-2) - 10 u(t-1), x = 1 on [-2, 0], u = 0 on [-1, 0).
StateLinearProblem linear_example_problem();
CandidateSolution linear_example_candidate();
AdjointTrajectory linear_example_adjoint();
/// (23 + e^2 + 34 e^4 - 2 e^6) / 16.
double linear_example_cost();

// Nonlinear example: minimize int_0^3 x^2 + u^2 subject to
// x' = x(t-1) u(t-2), x = 1 on [-3, 0], u = 0 on [-2, 0).
DelayedProblem goellmann_problem();
CandidateSolution goellmann_candidate();
/// The costate in the integrators' convention (minus the d2 S of the
/// value function below).
AdjointTrajectory goellmann_adjoint();
/// S(t, x) = eta_i(t) x + c_i(t) on the three cells. `eta3_scale` and
/// `c3_shift` perturb the last piece.
ValueFunctionCandidate goellmann_value_function(double eta3_scale = 1.0, double c3_shift = 0.0);
Feedback goellmann_feedback();

}  // namespace retard_oc
