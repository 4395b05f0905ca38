#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "retard_oc/certificate.hpp"
#include "retard_oc/cost.hpp"
#include "retard_oc/dde.hpp"
#include "retard_oc/parallel.hpp"
#include "retard_oc/problem.hpp"

namespace retard_oc {

// ---------------------------------------------------------------------------
// State-linear problems

/// H_D^p = -[f0_x(t,x,y) + f0_u(t,u,v)] + eta [A x + A_D y + p g(t,u) + (1-p) g_D(t,v)].
double hamiltonian_state_linear(const StateLinearProblem& problem, int p, double t,
                                const Vector& x, const Vector& y, const Vector& u,
                                const Vector& v, const Vector& eta);

/// H = -f0 + eta f.
double hamiltonian_nonlinear(const DelayedProblem& problem, double t, const Vector& x,
                             const Vector& y, const Vector& u, const Vector& v,
                             const Vector& eta);

/// u -> H^1(t, ..., u, u*(t-s), eta(t)) + chi_[a,b-s](t) H^0(t+s, ..., u*(t+s), u, eta(t+s)).
/// With `limit` set, every time-dependent factor (the indicator included)
/// is replaced by its one-sided limit at t.
double maximality_criterion(const StateLinearProblem& problem, const CandidateSolution& cand,
                            const AdjointTrajectory& eta, const Rational& t, const Vector& u,
                            std::optional<Side> limit = {});

/// Maximizer of `criterion` over U. With `quadratic` set the criterion is
/// fitted exactly from 1 + m + m(m-1)/2 evaluations around `center`;
/// otherwise golden-section search (m = 1) or multistart projected
/// gradient ascent (m > 1) is used. Throws UnboundedCriterion when the
/// criterion has no maximum on an unbounded U.
Vector argmax_criterion(const std::function<double(const Vector&)>& criterion,
                        const ControlSet& controls, bool quadratic, const Vector& center);

Vector argmax_control_state_linear(const StateLinearProblem& problem,
                                   const CandidateSolution& cand, const AdjointTrajectory& eta,
                                   const Rational& t, std::optional<Side> limit = {});

struct MaximalityOptions {
  int grid_points_per_cell = 64;
  double tol = 1e-6;
  int probes = 32;
  std::uint64_t seed = 0;
  Execution execution = Execution::parallel;
};

CheckResult check_maximality(const StateLinearProblem& problem, const CandidateSolution& cand,
                             const AdjointTrajectory& eta, const MaximalityOptions& options = {});

/// Probe region: the candidate's (x, x(t-r)) range widened by half_width.
struct ConvexitySpec {
  int pairs = 1000;
  double half_width = 1.0;
  int grid_points_per_cell = 16;
  double tol = 1e-6;
  std::uint64_t seed = 0;
  Execution execution = Execution::parallel;
};

CheckResult check_convexity_f0x(const StateLinearProblem& problem, const CandidateSolution& cand,
                                const ConvexitySpec& spec = {});

CheckResult check_transversality(const AdjointTrajectory& eta, double tol);

/// Sampled continuity of A, A_D, g, g_D, f0_x and its gradient, f0_u in t.
CheckResult check_continuity(const StateLinearProblem& problem, const CandidateSolution& cand,
                             int grid_points_per_cell, Execution execution = Execution::parallel);

/// Controls in U at the samples, and the state solves the delayed system
/// driven by the control (compared with integrate_forward).
CheckResult check_admissibility(const StateLinearProblem& problem, const CandidateSolution& cand,
                                const IntegratorConfig& integrator, int grid_points_per_cell,
                                double tol);

/// Residual of the adjoint equation for a supplied eta, by central
/// differences at interior sample points.
CheckResult check_adjoint_equation(const StateLinearProblem& problem,
                                   const CandidateSolution& cand, const AdjointTrajectory& eta,
                                   int grid_points_per_cell, double tol);

struct LinearVerifyConfig {
  double tol = 1e-6;
  double admissibility_tol = 1e-6;
  int grid_points_per_cell = 64;
  int probes = 32;
  std::uint64_t seed = 0;
  ConvexitySpec convexity;
  IntegratorConfig integrator;
  QuadratureConfig quadrature;
  Execution execution = Execution::parallel;
};

/// Every hypothesis of the state-linear sufficiency theorem. When `adjoint`
/// is given it replaces the integrated eta and is itself checked against
/// the adjoint equation.
Certificate verify_state_linear(const StateLinearProblem& problem, const CandidateSolution& cand,
                                const LinearVerifyConfig& cfg = {},
                                std::optional<AdjointTrajectory> adjoint = {});

// ---------------------------------------------------------------------------
// Hamilton-Jacobi verification

/// One closed-form piece of S on [start, end]. The callables must accept
/// times slightly outside the piece (finite differences straddle the ends).
struct ValueFunctionPiece {
  Rational start, end;
  std::function<double(double, const Vector&)> S;
  std::function<double(double, const Vector&)> dt;  // optional
  std::function<Vector(double, const Vector&)> dx;  // optional
};

class ValueFunctionCandidate {
 public:
  ValueFunctionCandidate() = default;
  explicit ValueFunctionCandidate(std::vector<ValueFunctionPiece> pieces);

  static ValueFunctionCandidate zero(const Rational& a, const Rational& b);

  const std::vector<ValueFunctionPiece>& pieces() const { return pieces_; }
  std::size_t piece_index(const Rational& t, Side side = Side::right) const;
  std::size_t piece_index(double t, Side side = Side::right) const;

  double S(double t, const Vector& x, Side side = Side::right) const;
  double d1(double t, const Vector& x, Side side = Side::right) const;
  Vector d2(double t, const Vector& x, Side side = Side::right) const;

  double d1_fd(double t, const Vector& x, Side side = Side::right) const;
  Vector d2_fd(double t, const Vector& x, Side side = Side::right) const;

 private:
  std::vector<ValueFunctionPiece> pieces_;
};

/// Control law u*(t, x(t), x(t-r), eta) with eta = d2 S(t, x(t)).
using Feedback =
    std::function<Vector(double, const Vector&, const Vector&, const Vector&)>;

/// Left-hand side of the HJ equation at t along `state`. The sum of
/// indicators over the closed cells counts 2 at interior breakpoints.
/// `x_at_t` replaces state(t) (tube probes); x(t - r) always comes from
/// `state`.
double hj_residual(const DelayedProblem& problem, const ValueFunctionCandidate& S,
                   const Feedback& feedback, const CommensurabilityLattice& lattice,
                   const Rational& t, const Trajectory& state,
                   const std::optional<Vector>& x_at_t = {});

struct HJConfig {
  double tol = 1e-6;
  int samples = 1000;
  std::vector<double> tube_offsets{-0.5, -0.1, 0.1, 0.5};
  QuadratureConfig quadrature;
  Execution execution = Execution::parallel;
};

/// Sample times used by verify_nonlinear_hj: ceil(samples / N) per cell.
std::vector<Rational> hj_sample_times(const CommensurabilityLattice& lattice, int samples);

Certificate verify_nonlinear_hj(const DelayedProblem& problem, const CandidateSolution& cand,
                                const ValueFunctionCandidate& S, const Feedback& feedback,
                                const HJConfig& cfg = {});

/// Sample grid a + k h / per_cell, k = 0..N per_cell.
std::vector<Rational> lattice_samples(const CommensurabilityLattice& lattice, int per_cell);

}  // namespace retard_oc
