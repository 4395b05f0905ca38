#include "retard_oc/problem.hpp"

#include <stdexcept>

#include "retard_oc/differentiation.hpp"

namespace retard_oc {

ControlSet ControlSet::free(int m) {
  ControlSet set;
  set.m_ = m;
  return set;
}

ControlSet ControlSet::box(Vector lower, Vector upper) {
  if (lower.size() != upper.size()) throw std::invalid_argument("box bounds size mismatch");
  if ((lower.array() > upper.array()).any()) throw std::invalid_argument("box with lower > upper");
  ControlSet set;
  set.m_ = static_cast<int>(lower.size());
  set.box_ = true;
  set.lower_ = std::move(lower);
  set.upper_ = std::move(upper);
  return set;
}

bool ControlSet::contains(const Vector& u, double tol) const {
  if (u.size() != m_) return false;
  if (!box_) return u.allFinite();
  return ((u.array() >= lower_.array() - tol) && (u.array() <= upper_.array() + tol)).all();
}

Vector ControlSet::project(const Vector& u) const {
  if (!box_) return u;
  return u.cwiseMax(lower_).cwiseMin(upper_);
}

TerminalSet TerminalSet::free(int n) {
  TerminalSet set;
  set.target_ = Vector::Zero(n);
  return set;
}

TerminalSet TerminalSet::point(Vector target) {
  TerminalSet set;
  set.free_ = false;
  set.target_ = std::move(target);
  return set;
}

bool TerminalSet::contains(const Vector& x, double tol) const {
  if (free_) return x.allFinite();
  return (x - target_).lpNorm<Eigen::Infinity>() <= tol;
}

std::pair<Vector, Vector> StateLinearProblem::state_cost_grad(double t, const Vector& x,
                                                              const Vector& y) const {
  if (state_cost_gradient) return state_cost_gradient(t, x, y);
  Vector gx = fd_gradient([&](const Vector& p) { return state_cost(t, p, y); }, x);
  Vector gy = fd_gradient([&](const Vector& p) { return state_cost(t, x, p); }, y);
  return {gx, gy};
}

DelayedProblem StateLinearProblem::to_delayed() const {
  DelayedProblem d;
  d.name = name;
  d.a = a;
  d.b = b;
  d.r = r;
  d.s = s;
  d.n = n;
  d.m = m;
  auto A_ = A;
  auto AD = A_D;
  auto g_ = g;
  auto gD = g_D;
  auto fx = state_cost;
  auto fu = control_cost;
  d.dynamics = [A_, AD, g_, gD](double t, const Vector& x, const Vector& y, const Vector& u,
                                const Vector& v) -> Vector {
    return A_(t) * x + AD(t) * y + g_(t, u) + gD(t, v);
  };
  d.running_cost = [fx, fu](double t, const Vector& x, const Vector& y, const Vector& u,
                            const Vector& v) { return fx(t, x, y) + fu(t, u, v); };
  d.state_history = state_history;
  d.control_history = control_history;
  d.controls = controls;
  d.terminal = TerminalSet::free(n);

  // A and A_D are exact; the remaining pieces use analytic derivatives when
  // the problem declares them.
  auto self = *this;
  d.partials = [self](double t, const Vector& x, const Vector& y, const Vector& u,
                      const Vector& v) {
    Partials p;
    p.fx = self.A(t);
    p.fy = self.A_D(t);
    p.fu = self.g_jacobian ? self.g_jacobian(t, u)
                           : fd_jacobian([&](const Vector& w) { return self.g(t, w); }, u);
    p.fv = self.g_D_jacobian ? self.g_D_jacobian(t, v)
                             : fd_jacobian([&](const Vector& w) { return self.g_D(t, w); }, v);
    std::tie(p.f0x, p.f0y) = self.state_cost_grad(t, x, y);
    if (self.control_cost_gradient) {
      std::tie(p.f0u, p.f0v) = self.control_cost_gradient(t, u, v);
    } else {
      p.f0u = fd_gradient([&](const Vector& w) { return self.control_cost(t, w, v); }, u);
      p.f0v = fd_gradient([&](const Vector& w) { return self.control_cost(t, u, w); }, v);
    }
    return p;
  };
  return d;
}

Trajectory with_control_history(const Trajectory& control, const Trajectory& control_history) {
  if (control_history.empty() || control.history_start() < control.main_start()) return control;
  if (control_history.end() != control.history_start()) return control;
  return control.with_history(control_history);
}

Partials finite_difference_partials(const DelayedProblem& p, double t, const Vector& x,
                                    const Vector& y, const Vector& u, const Vector& v) {
  Partials out;
  out.fx = fd_jacobian([&](const Vector& w) { return p.dynamics(t, w, y, u, v); }, x);
  out.fy = fd_jacobian([&](const Vector& w) { return p.dynamics(t, x, w, u, v); }, y);
  out.fu = fd_jacobian([&](const Vector& w) { return p.dynamics(t, x, y, w, v); }, u);
  out.fv = fd_jacobian([&](const Vector& w) { return p.dynamics(t, x, y, u, w); }, v);
  out.f0x = fd_gradient([&](const Vector& w) { return p.running_cost(t, w, y, u, v); }, x);
  out.f0y = fd_gradient([&](const Vector& w) { return p.running_cost(t, x, w, u, v); }, y);
  out.f0u = fd_gradient([&](const Vector& w) { return p.running_cost(t, x, y, w, v); }, u);
  out.f0v = fd_gradient([&](const Vector& w) { return p.running_cost(t, x, y, u, w); }, v);
  return out;
}

Partials problem_partials(const DelayedProblem& p, double t, const Vector& x, const Vector& y,
                          const Vector& u, const Vector& v) {
  if (p.partials) return p.partials(t, x, y, u, v);
  return finite_difference_partials(p, t, x, y, u, v);
}

}  // namespace retard_oc
