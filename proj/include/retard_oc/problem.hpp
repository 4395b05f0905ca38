#pragma once

#include <functional>
#include <optional>
#include <string>

#include "retard_oc/curve.hpp"
#include "retard_oc/lattice.hpp"
#include "retard_oc/trajectory.hpp"

namespace retard_oc {

/// Admissible control values: all of R^m, or an axis-aligned box.
class ControlSet {
 public:
  static ControlSet free(int m);
  static ControlSet box(Vector lower, Vector upper);

  int dimension() const { return m_; }
  bool is_box() const { return box_; }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }

  bool contains(const Vector& u, double tol = 0.0) const;
  Vector project(const Vector& u) const;

 private:
  int m_ = 0;
  bool box_ = false;
  Vector lower_, upper_;
};

/// Terminal constraint x(b) in Pi: free, or a fixed point.
class TerminalSet {
 public:
  static TerminalSet free(int n);
  static TerminalSet point(Vector target);

  bool is_free() const { return free_; }
  const Vector& target() const { return target_; }
  bool contains(const Vector& x, double tol) const;

 private:
  bool free_ = true;
  Vector target_;
};

/// f(t, x, y, u, v) with y = x(t - r), v = u(t - s).
using ScalarField =
    std::function<double(double, const Vector&, const Vector&, const Vector&, const Vector&)>;
using VectorField =
    std::function<Vector(double, const Vector&, const Vector&, const Vector&, const Vector&)>;

/// First derivatives of the dynamics and running cost at one point.
struct Partials {
  Matrix fx, fy, fu, fv;      // n x n, n x n, n x m, n x m
  Vector f0x, f0y, f0u, f0v;  // gradients of the running cost
};
using PartialsField =
    std::function<Partials(double, const Vector&, const Vector&, const Vector&, const Vector&)>;

/// General delayed problem: minimize g0(x(b)) + integral of f0 subject to
/// x' = f(t, x(t), x(t-r), u(t), u(t-s)), with initial functions phi, psi.
struct DelayedProblem {
  std::string name;
  Rational a, b, r, s;
  int n = 1;
  int m = 1;
  ScalarField running_cost;
  VectorField dynamics;
  std::function<double(const Vector&)> terminal_cost;  // empty means g0 = 0
  /// phi on [a - r - s, a] (state-linear problems converted with
  /// to_delayed() only carry [a - r, a]).
  Trajectory state_history;
  /// psi on [a - s, a); empty when s = 0.
  Trajectory control_history;
  ControlSet controls;
  TerminalSet terminal;
  /// Hand-coded derivatives; finite differences are used when empty.
  PartialsField partials;

  CommensurabilityLattice lattice() const { return make_lattice(a, b, r, s); }
  double g0(const Vector& xb) const { return terminal_cost ? terminal_cost(xb) : 0.0; }
};

/// State-linear delayed problem:
///   minimize  integral of state_cost(t, x, x(t-r)) + control_cost(t, u, u(t-s))
///   subject to x' = A(t) x + A_D(t) x(t-r) + g(t, u) + g_D(t, u(t-s)).
struct StateLinearProblem {
  std::string name;
  Rational a, b, r, s;
  int n = 1;
  int m = 1;
  std::function<Matrix(double)> A, A_D;
  std::function<Vector(double, const Vector&)> g, g_D;
  std::function<double(double, const Vector&, const Vector&)> state_cost;    // f0_x
  std::function<double(double, const Vector&, const Vector&)> control_cost;  // f0_u

  // Optional analytic derivatives. Finite differences fill the gaps.
  std::function<std::pair<Vector, Vector>(double, const Vector&, const Vector&)> state_cost_gradient;
  std::function<std::pair<Vector, Vector>(double, const Vector&, const Vector&)> control_cost_gradient;
  std::function<Matrix(double, const Vector&)> g_jacobian, g_D_jacobian;

  Trajectory state_history;    // phi on [a - r, a]
  Trajectory control_history;  // psi on [a - s, a)
  ControlSet controls;
  /// The maximality criterion is a quadratic in u (closed-form argmax).
  bool control_quadratic = false;

  CommensurabilityLattice lattice() const { return make_lattice(a, b, r, s); }

  /// (d/dx, d/dy) of state_cost, analytic if available.
  std::pair<Vector, Vector> state_cost_grad(double t, const Vector& x, const Vector& y) const;

  /// Same problem seen through the general interface.
  DelayedProblem to_delayed() const;
};

struct CandidateSolution {
  Trajectory state;
  Trajectory control;
  std::optional<double> cost;
};

/// Prepends the problem's control history when `control` starts at a.
Trajectory with_control_history(const Trajectory& control, const Trajectory& control_history);

/// All partial derivatives by central differences.
Partials finite_difference_partials(const DelayedProblem& p, double t, const Vector& x,
                                    const Vector& y, const Vector& u, const Vector& v);

/// Hand-coded partials when the problem has them, else finite differences.
Partials problem_partials(const DelayedProblem& p, double t, const Vector& x, const Vector& y,
                          const Vector& u, const Vector& v);

}  // namespace retard_oc
