#include "retard_oc/registry.hpp"

#include <cmath>

#include "retard_oc/errors.hpp"

namespace retard_oc {
namespace {

const double E = std::exp(1.0);
const double E2 = std::exp(2.0);
const double E4 = std::exp(4.0);
const double E6 = std::exp(6.0);
const double D = E2 + 1.0;
const double D2 = D * D;

double zero(double) { return 0.0; }
double one(double) { return 1.0; }

Vector scalar(double v) { return Vector::Constant(1, v); }
Matrix scalar_matrix(double v) { return Matrix::Constant(1, 1, v); }

std::function<Vector(double)> lift(std::function<double(double)> f) {
  return [f = std::move(f)](double t) { return scalar(f(t)); };
}

// ---------------------------------------------------------------------------
// State-linear example

double lin_u0(double t) { return (std::exp(3.0 - t) - std::exp(1.0 - t) * t) / 20.0; }
double lin_u1(double t) { return (std::exp(3.0 - t) - 1.0) / 20.0; }

// Factories

StateLinearProblem make_linear(std::function<double(double, const Vector&, const Vector&)> fx,
                               std::function<std::pair<Vector, Vector>(double, const Vector&,
                                                                       const Vector&)> fx_grad) {
  StateLinearProblem p;
  p.name = "ocp-ld-paper";
  p.a = Rational(0);
  p.b = Rational(4);
  p.r = Rational(2);
  p.s = Rational(1);
  p.n = p.m = 1;
  p.A = [](double) { return scalar_matrix(1.0); };
  p.A_D = [](double) { return scalar_matrix(1.0); };
  p.g = [](double, const Vector&) { return scalar(0.0); };
  p.g_D = [](double, const Vector& v) { return Vector(-10.0 * v); };
  p.g_jacobian = [](double, const Vector&) { return scalar_matrix(0.0); };
  p.g_D_jacobian = [](double, const Vector&) { return scalar_matrix(-10.0); };
  p.state_cost = std::move(fx);
  p.state_cost_gradient = std::move(fx_grad);
  p.control_cost = [](double, const Vector& u, const Vector&) { return 100.0 * u.squaredNorm(); };
  p.control_cost_gradient = [](double, const Vector& u, const Vector& v) {
    return std::pair<Vector, Vector>{200.0 * u, Vector::Zero(v.size())};
  };
  p.state_history = Trajectory::constant(Rational(-2), Rational(0), scalar(1.0));
  p.control_history = Trajectory::constant(Rational(-1), Rational(0), scalar(0.0));
  p.controls = ControlSet::free(1);
  p.control_quadratic = true;
  return p;
}

// ---------------------------------------------------------------------------
// Nonlinear example

double g_x2(double t) { return (std::exp(t - 2.0) + std::exp(4.0 - t)) / D; }
double g_u0(double t) { return (std::exp(t) - std::exp(2.0 - t)) / D; }
double g_u(double t) { return (t >= 0.0 && t < 1.0) ? g_u0(t) : 0.0; }

// eta_i and c_i of the value function, with their time derivatives.
double eta1(double t) { return -2.0 * t + 5.0 + 2.0 * (E2 - 1.0) / D2; }
double eta1_dot(double) { return -2.0; }
double eta2(double t) {
  return -(4.0 * E2 / D2 + 2.0) * t + 4.0 * (E2 - 1.0) / D2 + 6.0 +
         (std::exp(2.0 * t - 2.0) - std::exp(6.0 - 2.0 * t)) / D2;
}
double eta2_dot(double t) {
  return -(4.0 * E2 / D2 + 2.0) + 2.0 * (std::exp(2.0 * t - 2.0) + std::exp(6.0 - 2.0 * t)) / D2;
}
double eta3(double t) { return 2.0 * (std::exp(4.0 - t) - std::exp(t - 2.0)) / D; }
double eta3_dot(double t) { return -2.0 * (std::exp(4.0 - t) + std::exp(t - 2.0)) / D; }

double c1(double t) {
  return (2.0 * t * (3.0 * E4 + 4.0 * E2 + 3.0) + std::exp(2.0 * t) - std::exp(4.0 - 2.0 * t) -
          15.0 * E4 - 32.0 * E2 - 9.0) /
         (2.0 * D2);
}
double c1_dot(double t) {
  return (std::exp(4.0 - 2.0 * t) + std::exp(2.0 * t) + 3.0 * E4 + 4.0 * E2 + 3.0) / D2;
}
double c2(double t) {
  return (2.0 * t * (3.0 * E4 + 10.0 * E2 + 3.0) +
          2.0 * (std::exp(6.0 - 2.0 * t) - std::exp(2.0 * t - 2.0)) - 17.0 * E4 - 44.0 * E2 - 7.0) /
         (2.0 * D2);
}
double c2_dot(double t) {
  return (3.0 * E4 + 10.0 * E2 + 3.0 - 2.0 * std::exp(6.0 - 2.0 * t) -
          2.0 * std::exp(2.0 * t - 2.0)) /
         D2;
}
double c3(double t) {
  return (4.0 * E2 * (t - 3.0) + 5.0 * (std::exp(2.0 * t - 4.0) - std::exp(8.0 - 2.0 * t))) /
         (2.0 * D2);
}
double c3_dot(double t) {
  return (2.0 * E2 + 5.0 * std::exp(2.0 * t - 4.0) + 5.0 * std::exp(8.0 - 2.0 * t)) / D2;
}

ValueFunctionPiece affine_piece(int start, int end, std::function<double(double)> eta,
                                std::function<double(double)> eta_dot,
                                std::function<double(double)> c,
                                std::function<double(double)> c_dot) {
  ValueFunctionPiece pc;
  pc.start = Rational(start);
  pc.end = Rational(end);
  pc.S = [=](double t, const Vector& x) { return eta(t) * x[0] + c(t); };
  pc.dt = [=](double t, const Vector& x) { return eta_dot(t) * x[0] + c_dot(t); };
  pc.dx = [=](double t, const Vector&) { return scalar(eta(t)); };
  return pc;
}

// ---------------------------------------------------------------------------
// Trivial fixtures

StateLinearProblem zero_dynamics_problem() {
  StateLinearProblem p;
  p.name = "zero-dynamics";
  p.a = Rational(0);
  p.b = Rational(1);
  p.r = Rational(1, 2);
  p.s = Rational(0);
  p.n = p.m = 1;
  p.A = p.A_D = [](double) { return scalar_matrix(0.0); };
  p.g = p.g_D = [](double, const Vector&) { return scalar(0.0); };
  p.state_cost = [](double, const Vector&, const Vector&) { return 0.0; };
  p.control_cost = [](double, const Vector& u, const Vector&) { return u.squaredNorm(); };
  p.state_history = Trajectory::constant(Rational(-1, 2), Rational(0), scalar(2.0));
  p.controls = ControlSet::free(1);
  p.control_quadratic = true;
  return p;
}

StateLinearProblem uncontrollable_problem() {
  StateLinearProblem p;
  p.name = "uncontrollable";
  p.a = Rational(0);
  p.b = Rational(2);
  p.r = Rational(1);
  p.s = Rational(1);
  p.n = p.m = 1;
  p.A = [](double) { return scalar_matrix(-1.0); };
  p.A_D = [](double) { return scalar_matrix(0.5); };
  p.g = p.g_D = [](double, const Vector&) { return scalar(0.0); };
  p.state_cost = [](double, const Vector& x, const Vector&) { return x.squaredNorm(); };
  p.control_cost = [](double, const Vector& u, const Vector&) { return u.squaredNorm(); };
  p.state_history = Trajectory::constant(Rational(-1), Rational(0), scalar(1.0));
  p.control_history = Trajectory::constant(Rational(-1), Rational(0), scalar(0.0));
  p.controls = ControlSet::free(1);
  p.control_quadratic = true;
  return p;
}

DelayedProblem zero_cost_problem() {
  DelayedProblem p;
  p.name = "zero-cost";
  p.a = Rational(0);
  p.b = Rational(1);
  p.r = Rational(1);
  p.s = Rational(1);
  p.n = p.m = 1;
  p.running_cost = [](double, const Vector&, const Vector&, const Vector&, const Vector&) {
    return 0.0;
  };
  p.dynamics = [](double, const Vector&, const Vector&, const Vector&, const Vector&) {
    return scalar(0.0);
  };
  p.state_history = Trajectory::constant(Rational(-2), Rational(0), scalar(1.0));
  p.control_history = Trajectory::constant(Rational(-1), Rational(0), scalar(0.0));
  p.controls = ControlSet::free(1);
  p.terminal = TerminalSet::free(1);
  return p;
}

Feedback open_loop(std::function<double(double)> u) {
  return [u = std::move(u)](double t, const Vector&, const Vector&, const Vector&) {
    return scalar(u(t));
  };
}

}  // namespace

Trajectory scalar_piecewise(const Rational& main_start, const std::vector<ScalarPiece>& pieces) {
  std::vector<Segment> segs;
  for (const auto& pc : pieces)
    segs.push_back(Segment{pc.start, pc.end, std::make_shared<FunctionCurve>(1, lift(pc.f))});
  return Trajectory(1, main_start, std::move(segs));
}

StateLinearProblem linear_example_problem() {
  return make_linear([](double, const Vector& x, const Vector&) { return x[0]; },
                     [](double, const Vector& x, const Vector& y) {
                       return std::pair<Vector, Vector>{Vector::Ones(x.size()),
                                                        Vector::Zero(y.size())};
                     });
}

CandidateSolution linear_example_candidate() {
  CandidateSolution c;
  c.state = scalar_piecewise(
      Rational(0),
      {{Rational(-2), Rational(0), one},
       {Rational(0), Rational(1), [](double t) { return -1.0 + 2.0 * std::exp(t); }},
       {Rational(1), Rational(2),
        [](double t) {
          return ((E2 + 2.0 * E4 - 2.0 * E2 * t) * std::exp(-t) - 8.0 +
                  (17.0 - 2.0 * E2) * std::exp(t)) /
                 8.0;
        }},
       {Rational(2), Rational(3),
        [](double t) {
          return (2.0 * std::exp(4.0 - t) + 4.0 +
                  (-47.0 / E2 + 17.0 - 2.0 * E2 + 16.0 / E2 * t) * std::exp(t)) /
                 8.0;
        }},
       {Rational(3), Rational(4), [](double t) {
          return ((-E6 + E4 * t) * std::exp(-t) + 4.0 +
                  (-51.0 / E2 + 24.0 - 2.0 * E2 + 17.0 / E2 * t - 2.0 * t) * std::exp(t)) /
                 8.0;
        }}});
  c.control = scalar_piecewise(Rational(0), {{Rational(-1), Rational(0), zero},
                                             {Rational(0), Rational(1), lin_u0},
                                             {Rational(1), Rational(3), lin_u1},
                                             {Rational(3), Rational(4), zero}});
  c.cost = linear_example_cost();
  return c;
}

AdjointTrajectory linear_example_adjoint() {
  return {scalar_piecewise(
      Rational(0),
      {{Rational(0), Rational(2), [](double t) { return std::exp(2.0 - t) * (t - E2 - 1.0); }},
       {Rational(2), Rational(4), [](double t) { return 1.0 - std::exp(4.0 - t); }}})};
}

double linear_example_cost() { return (23.0 + E2 + 34.0 * E4 - 2.0 * E6) / 16.0; }

DelayedProblem goellmann_problem() {
  DelayedProblem p;
  p.name = "ocp-d-goellmann";
  p.a = Rational(0);
  p.b = Rational(3);
  p.r = Rational(1);
  p.s = Rational(2);
  p.n = p.m = 1;
  p.running_cost = [](double, const Vector& x, const Vector&, const Vector& u, const Vector&) {
    return x.squaredNorm() + u.squaredNorm();
  };
  p.dynamics = [](double, const Vector&, const Vector& y, const Vector&, const Vector& v) {
    return scalar(y[0] * v[0]);
  };
  p.partials = [](double, const Vector& x, const Vector& y, const Vector& u, const Vector& v) {
    Partials d;
    d.fx = scalar_matrix(0.0);
    d.fy = scalar_matrix(v[0]);
    d.fu = scalar_matrix(0.0);
    d.fv = scalar_matrix(y[0]);
    d.f0x = 2.0 * x;
    d.f0y = scalar(0.0);
    d.f0u = 2.0 * u;
    d.f0v = scalar(0.0);
    return d;
  };
  p.state_history = Trajectory::constant(Rational(-3), Rational(0), scalar(1.0));
  p.control_history = Trajectory::constant(Rational(-2), Rational(0), scalar(0.0));
  p.controls = ControlSet::free(1);
  p.terminal = TerminalSet::free(1);
  return p;
}

CandidateSolution goellmann_candidate() {
  CandidateSolution c;
  c.state = scalar_piecewise(Rational(0), {{Rational(-3), Rational(0), one},
                                           {Rational(0), Rational(2), one},
                                           {Rational(2), Rational(3), g_x2}});
  c.control = scalar_piecewise(Rational(0), {{Rational(-2), Rational(0), zero},
                                             {Rational(0), Rational(1), g_u0},
                                             {Rational(1), Rational(3), zero}});
  return c;
}

AdjointTrajectory goellmann_adjoint() {
  return {scalar_piecewise(Rational(0),
                           {{Rational(0), Rational(1), [](double t) { return -eta1(t); }},
                            {Rational(1), Rational(2), [](double t) { return -eta2(t); }},
                            {Rational(2), Rational(3), [](double t) { return -eta3(t); }}})};
}

ValueFunctionCandidate goellmann_value_function(double eta3_scale, double c3_shift) {
  return ValueFunctionCandidate(
      {affine_piece(0, 1, eta1, eta1_dot, c1, c1_dot),
       affine_piece(1, 2, eta2, eta2_dot, c2, c2_dot),
       affine_piece(
           2, 3, [=](double t) { return eta3_scale * eta3(t); },
           [=](double t) { return eta3_scale * eta3_dot(t); },
           [=](double t) { return c3(t) + c3_shift; }, c3_dot)});
}

Feedback goellmann_feedback() { return open_loop(g_u); }

void Registry::add(Example example) {
  if (contains(example.name)) throw std::invalid_argument("duplicate example " + example.name);
  examples_.push_back(std::move(example));
}

bool Registry::contains(const std::string& name) const {
  for (const auto& e : examples_)
    if (e.name == name) return true;
  return false;
}

const Example& Registry::get(const std::string& name) const {
  for (const auto& e : examples_)
    if (e.name == name) return e;
  throw UnknownProblem(name);
}

Registry Registry::builtin() {
  Registry reg;

  Example lin;
  lin.name = "ocp-ld-paper";
  lin.summary = "state-linear: min int_0^4 x + 100u^2, x' = x + x(t-2) - 10u(t-1); "
                "analytic optimum, cost 67.491786";
  lin.verify = "verify-linear";
  lin.linear = linear_example_problem;
  lin.candidate = linear_example_candidate;
  lin.adjoint = linear_example_adjoint;
  reg.add(lin);

  Example gm;
  gm.name = "ocp-d-goellmann";
  gm.summary = "nonlinear: min int_0^3 x^2 + u^2, x' = x(t-1) u(t-2); "
               "candidate with closed-form value function";
  gm.verify = "verify-hj";
  gm.delayed = goellmann_problem;
  gm.candidate = goellmann_candidate;
  gm.adjoint = goellmann_adjoint;
  gm.value_function = [] { return goellmann_value_function(); };
  gm.feedback = goellmann_feedback();
  reg.add(gm);

  Example zd;
  zd.name = "zero-dynamics";
  zd.summary = "fixture: x' = 0, cost int u^2; the state stays at phi(a)";
  zd.verify = "verify-linear";
  zd.linear = zero_dynamics_problem;
  zd.candidate = [] {
    return CandidateSolution{Trajectory::constant(Rational(-1, 2), Rational(1), scalar(2.0)),
                             Trajectory::constant(Rational(0), Rational(1), scalar(0.0)), 0.0};
  };
  reg.add(zd);

  Example uc;
  uc.name = "uncontrollable";
  uc.summary = "fixture: g = g_D = 0, cost int x^2 + u^2; the optimal control is zero";
  uc.verify = "verify-linear";
  uc.linear = uncontrollable_problem;
  reg.add(uc);

  Example zc;
  zc.name = "zero-cost";
  zc.summary = "fixture: f = f0 = g0 = 0 with S = 0";
  zc.verify = "verify-hj";
  zc.delayed = zero_cost_problem;
  zc.candidate = [] {
    const auto one = std::make_shared<ConstantCurve>(scalar(1.0));
    CandidateSolution c;
    c.state = Trajectory(1, Rational(0), {Segment{Rational(-2), Rational(0), one},
                                          Segment{Rational(0), Rational(1), one}});
    c.control = Trajectory::constant(Rational(0), Rational(1), scalar(0.0));
    c.cost = 0.0;
    return c;
  };
  zc.value_function = [] { return ValueFunctionCandidate::zero(Rational(0), Rational(1)); };
  zc.feedback = open_loop([](double) { return 0.0; });
  reg.add(zc);

  // Perturbed variants; each breaks one hypothesis on purpose.
  Example bump = lin;
  bump.name = "ocp-ld-paper-control-bump";
  bump.summary = "perturbation: optimal control + 0.1 on [1, 2], state re-integrated";
  bump.adjoint = nullptr;
  bump.candidate = [] {
    CandidateSolution c = linear_example_candidate();
    auto bumped = [](double t) { return lin_u1(t) + 0.1; };
    c.control = scalar_piecewise(Rational(0), {{Rational(0), Rational(1), lin_u0},
                                               {Rational(1), Rational(2), bumped},
                                               {Rational(2), Rational(3), lin_u1},
                                               {Rational(3), Rational(4), zero}});
    c.state = integrate_forward(linear_example_problem(), c.control);
    c.cost.reset();
    return c;
  };
  reg.add(bump);

  Example shift = lin;
  shift.name = "ocp-ld-paper-eta-shift";
  shift.summary = "perturbation: the verifier is handed eta + 1";
  shift.adjoint_override = [] {
    const AdjointTrajectory eta = linear_example_adjoint();
    return AdjointTrajectory{Trajectory::function(
        1, Rational(0), Rational(4), [eta](double t) { return Vector(eta(t).array() + 1.0); })};
  };
  reg.add(shift);

  Example concave = lin;
  concave.name = "ocp-ld-paper-concave-cost";
  concave.summary = "perturbation: f0_x = x - (x - x*(t))^2, concave in x";
  concave.linear = [] {
    const CandidateSolution ref = linear_example_candidate();
    const Trajectory xs = ref.state;
    StateLinearProblem p = make_linear(
        [xs](double t, const Vector& x, const Vector&) {
          const double d = x[0] - xs.eval(t)[0];
          return x[0] - d * d;
        },
        [xs](double t, const Vector& x, const Vector& y) {
          const double d = x[0] - xs.eval(t)[0];
          return std::pair<Vector, Vector>{scalar(1.0 - 2.0 * d), Vector::Zero(y.size())};
        });
    p.name = "ocp-ld-paper-concave-cost";
    return p;
  };
  reg.add(concave);

  Example zeroed = gm;
  zeroed.name = "ocp-d-goellmann-zeroed-control";
  zeroed.summary = "perturbation: candidate control set to 0 on [0, 1]";
  zeroed.adjoint = nullptr;
  zeroed.candidate = [] {
    CandidateSolution c = goellmann_candidate();
    c.control = Trajectory::constant(Rational(0), Rational(3), scalar(0.0));
    return c;
  };
  reg.add(zeroed);

  Example scaled = gm;
  scaled.name = "ocp-d-goellmann-eta3-scaled";
  scaled.summary = "perturbation: eta_3 scaled by 1.1 in S";
  scaled.value_function = [] { return goellmann_value_function(1.1, 0.0); };
  reg.add(scaled);

  Example shifted = gm;
  shifted.name = "ocp-d-goellmann-c3-shifted";
  shifted.summary = "perturbation: c_3 + 1 in S";
  shifted.value_function = [] { return goellmann_value_function(1.0, 1.0); };
  reg.add(shifted);

  return reg;
}

}  // namespace retard_oc
