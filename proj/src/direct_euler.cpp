#include <cmath>
#include <limits>
#include <stdexcept>

#include "retard_oc/differentiation.hpp"
#include "retard_oc/parallel.hpp"
#include "retard_oc/solve.hpp"

namespace retard_oc {
namespace {

// Forward Euler on t_k = a + k dt:
//   x_{k+1} = x_k + dt f(t_k, x_k, y_k, u_k, v_k),
//   J = dt sum_k f0(t_k, x_k, y_k, u_k, v_k) + g0(x_N),
// with y_k = x_{k - dr} and v_k = u_{k - ds}, or the history before a.
class EulerModel {
 public:
  EulerModel(const DelayedProblem& p, int subintervals) : p_(p), N_(subintervals) {
    const auto lat = p.lattice();
    if (N_ < 1 || N_ % lat.cells() != 0)
      throw std::invalid_argument("Euler subinterval count " + std::to_string(N_) +
                                  " is not a positive multiple of the lattice cell count " +
                                  std::to_string(lat.cells()));
    const std::int64_t per_cell = N_ / lat.cells();
    dr_ = lat.state_shift() * per_cell;
    ds_ = lat.control_shift() * per_cell;
    const Rational step = (p.b - p.a) / Rational(N_);
    dt_ = step.to_double();
    for (std::int64_t k = 0; k <= N_; ++k) {
      const Rational t = p.a + Rational(k) * step;
      t_.push_back(t.to_double());
      if (k < dr_) y_hist_.push_back(p.state_history.eval(t - p.r));
      if (k < ds_) v_hist_.push_back(p.control_history.eval(t - p.s));
    }
    x0_ = p.state_history.eval(p.a, Side::left);
  }

  int size() const { return N_; }
  double dt() const { return dt_; }

  Matrix states(const Matrix& U) const {
    Matrix X(p_.n, N_ + 1);
    X.col(0) = x0_;
    for (int k = 0; k < N_; ++k)
      X.col(k + 1) = X.col(k) + dt_ * p_.dynamics(t_[k], X.col(k), y(X, k), U.col(k), v(U, k));
    return X;
  }

  double objective(const Matrix& U, Matrix* X_out = nullptr) const {
    const Matrix X = states(U);
    double J = 0.0;
    for (int k = 0; k < N_; ++k) J += p_.running_cost(t_[k], X.col(k), y(X, k), U.col(k), v(U, k));
    J = dt_ * J + p_.g0(X.col(N_));
    if (X_out) *X_out = X;
    return J;
  }

  Vector gradient(const Matrix& U) const {
    const Matrix X = states(U);
    const auto P = parallel_map<Partials>(static_cast<std::size_t>(N_), [&](std::size_t k) {
      const int i = static_cast<int>(k);
      return problem_partials(p_, t_[k], X.col(i), y(X, i), U.col(i), v(U, i));
    });
    Matrix adj = Matrix::Zero(p_.n, N_ + 1);
    if (p_.terminal_cost) adj.col(N_) = fd_gradient(p_.terminal_cost, X.col(N_));
    for (int k = N_ - 1; k >= 1; --k) {
      Vector pk = adj.col(k + 1) + dt_ * (P[k].f0x + P[k].fx.transpose() * adj.col(k + 1));
      if (k + dr_ <= N_ - 1) {
        const auto j = static_cast<std::size_t>(k + dr_);
        pk += dt_ * (P[j].f0y + P[j].fy.transpose() * adj.col(static_cast<int>(j) + 1));
      }
      adj.col(k) = pk;
    }
    Vector g(p_.m * N_);
    for (int k = 0; k < N_; ++k) {
      Vector gk = dt_ * (P[k].f0u + P[k].fu.transpose() * adj.col(k + 1));
      if (k + ds_ <= N_ - 1) {
        const auto j = static_cast<std::size_t>(k + ds_);
        gk += dt_ * (P[j].f0v + P[j].fv.transpose() * adj.col(static_cast<int>(j) + 1));
      }
      g.segment(static_cast<Eigen::Index>(k) * p_.m, p_.m) = gk;
    }
    return g;
  }

 private:
  Vector y(const Matrix& X, int k) const {
    if (dr_ == 0) return X.col(k);
    return k < dr_ ? y_hist_[k] : Vector(X.col(k - dr_));
  }
  Vector v(const Matrix& U, int k) const {
    if (ds_ == 0) return U.col(k);
    return k < ds_ ? v_hist_[k] : Vector(U.col(k - ds_));
  }

  const DelayedProblem& p_;
  int N_;
  std::int64_t dr_ = 0, ds_ = 0;
  double dt_ = 0.0;
  std::vector<double> t_;
  std::vector<Vector> y_hist_, v_hist_;
  Vector x0_;
};

Matrix project(const ControlSet& U, Matrix M) {
  for (Eigen::Index k = 0; k < M.cols(); ++k) M.col(k) = U.project(M.col(k));
  return M;
}

Matrix as_samples(const Vector& g, int m) {
  return Eigen::Map<const Matrix>(g.data(), m, g.size() / m);
}

void require_free_terminal(const DelayedProblem& p) {
  if (!p.terminal.is_free())
    throw std::invalid_argument("the direct solver handles free terminal states only");
}

}  // namespace

double discrete_objective(const DelayedProblem& p, const Matrix& U) {
  return EulerModel(p, static_cast<int>(U.cols())).objective(U);
}

double discrete_objective(const StateLinearProblem& p, const Matrix& U) {
  return discrete_objective(p.to_delayed(), U);
}

Vector discrete_adjoint_gradient(const DelayedProblem& p, const Matrix& U) {
  return EulerModel(p, static_cast<int>(U.cols())).gradient(U);
}

Vector discrete_adjoint_gradient(const StateLinearProblem& p, const Matrix& U) {
  return discrete_adjoint_gradient(p.to_delayed(), U);
}

Trajectory control_from_samples(const CommensurabilityLattice& lat, const Matrix& samples) {
  const auto Ne = samples.cols();
  if (Ne < 1 || Ne % lat.cells() != 0)
    throw std::invalid_argument("sample count is not a positive multiple of the cell count");
  const auto per_cell = Ne / lat.cells();
  const Rational step = (lat.b() - lat.a()) / Rational(Ne);
  std::vector<Segment> segs;
  for (std::int64_t i = 0; i < lat.cells(); ++i) {
    std::vector<double> nodes;
    for (std::int64_t j = 0; j < per_cell; ++j)
      nodes.push_back((lat.a() + Rational(i * per_cell + j) * step).to_double());
    Matrix values = samples.middleCols(i * per_cell, per_cell);
    segs.push_back(Segment{lat.breakpoint(i), lat.breakpoint(i + 1),
                           std::make_shared<NodalCurve>(std::move(nodes), std::move(values))});
  }
  return Trajectory(static_cast<int>(samples.rows()), lat.a(), std::move(segs));
}

DirectResult solve_direct_euler(const DelayedProblem& p, const TranscriptionConfig& cfg) {
  require_free_terminal(p);
  const EulerModel model(p, cfg.subintervals);
  const int m = p.m, Ne = model.size();
  const double dt = model.dt();

  Matrix U = Matrix::Zero(m, Ne);
  if (cfg.initial_guess) {
    if (cfg.initial_guess->rows() != m || cfg.initial_guess->cols() != Ne)
      throw std::invalid_argument("initial guess must be m x subintervals");
    U = *cfg.initial_guess;
  }
  U = project(p.controls, U);

  DirectResult result;
  double J = model.objective(U);
  Vector G = model.gradient(U);
  double alpha = 1.0 / dt;
  for (int it = 0;; ++it) {
    const Matrix Gm = as_samples(G, m);
    result.stationarity = (project(p.controls, U - Gm / dt) - U).lpNorm<Eigen::Infinity>();
    result.iterations = it;
    DirectIteration rec{it, J, alpha * dt, result.stationarity};
    result.history.push_back(rec);
    if (cfg.log) cfg.log(rec);
    if (result.stationarity <= cfg.gradient_tol) {
      result.converged = true;
      break;
    }
    if (it >= cfg.max_iterations) break;

    bool accepted = false;
    Matrix U_next;
    double J_next = 0.0;
    for (int ls = 0; ls < 80; ++ls) {
      U_next = project(p.controls, U - alpha * Gm);
      J_next = model.objective(U_next);
      const double decrease = (Gm.array() * (U_next - U).array()).sum();
      if (std::isfinite(J_next) && J_next <= J + 1e-4 * decrease) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      // Objective differences have reached rounding level.
      if (result.stationarity <= 1e-4) {
        result.converged = true;
        break;
      }
      throw UnboundedDescent("line search found no finite decrease (stationarity " +
                             std::to_string(result.stationarity) + ")");
    }
    if (!(J_next <= J)) throw std::logic_error("accepted step increased the discrete objective");
    if (J_next < -1e100) throw UnboundedDescent("discrete objective is unbounded below");

    const Vector G_next = model.gradient(U_next);
    const Vector s = Eigen::Map<const Vector>(U_next.data(), U_next.size()) -
                     Eigen::Map<const Vector>(U.data(), U.size());
    const Vector yv = G_next - G;
    const double sy = s.dot(yv);
    alpha = sy > 0.0 ? s.squaredNorm() / sy : 2.0 * alpha;
    U = std::move(U_next);
    J = J_next;
    G = G_next;
  }

  Matrix X;
  result.discrete_objective = model.objective(U, &X);
  result.control_samples = U;
  result.state_samples = X;
  result.solution.control = control_from_samples(p.lattice(), U);
  result.solution.state = integrate_forward(p, result.solution.control, cfg.integrator);
  result.solution.cost = evaluate_cost(p, result.solution, cfg.quadrature);
  if (!result.converged && cfg.require_convergence)
    throw NoConvergenceWith<DirectResult>(
        "direct transcription did not converge in " + std::to_string(cfg.max_iterations) +
            " iterations (stationarity " + std::to_string(result.stationarity) + ")",
        result);
  return result;
}

DirectResult solve_direct_euler(const StateLinearProblem& p, const TranscriptionConfig& cfg) {
  return solve_direct_euler(p.to_delayed(), cfg);
}

}  // namespace retard_oc
