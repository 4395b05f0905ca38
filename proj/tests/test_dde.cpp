#include <gtest/gtest.h>

#include "oracles.hpp"
#include "retard_oc/dde.hpp"
#include "retard_oc/errors.hpp"
#include "retard_oc/registry.hpp"

using namespace retard_oc;

namespace {

double max_state_error(const Trajectory& x, double (*exact)(double), double a, double b) {
  double worst = 0.0;
  for (int k = 0; k <= 4000; ++k) {
    const double t = a + (b - a) * k / 4000.0;
    worst = std::max(worst, std::fabs(x.eval(t, Side::left)[0] - exact(t)));
  }
  return worst;
}

}  // namespace

TEST(IntegrateForward, LinearExampleState) {
  const auto p = linear_example_problem();
  const Trajectory x = integrate_forward(p, linear_example_candidate().control);
  EXPECT_LE(max_state_error(x, oracle::linear_x, 0.0, 4.0), 1e-8);
  EXPECT_EQ(x.history_start(), Rational(-2));
  EXPECT_EQ(x.eval(-1.0)[0], 1.0);
}

TEST(IntegrateForward, ZeroDynamicsKeepsInitialValue) {
  const Registry reg = Registry::builtin();
  const auto p = reg.get("zero-dynamics").linear();
  const Trajectory x = integrate_forward(p, Trajectory::constant(Rational(0), Rational(1),
                                                                 Vector::Constant(1, 0.3)));
  for (double t : {0.0, 0.25, 0.5, 0.99, 1.0}) EXPECT_EQ(x.eval(t)[0], 2.0);
}

TEST(IntegrateForward, GoellmannState) {
  const auto p = goellmann_problem();
  const Trajectory x = integrate_forward(p, goellmann_candidate().control);
  EXPECT_LE(max_state_error(x, oracle::goellmann_x, -1.0, 3.0), 1e-8);
}

TEST(IntegrateForward, ControlMustCoverDelayedTimes) {
  const auto p = linear_example_problem();
  const Trajectory late = Trajectory::constant(Rational(1), Rational(4), Vector::Zero(1));
  EXPECT_THROW(integrate_forward(p, late), OutOfDomain);
}

TEST(IntegrateForward, GeneralPathMatchesStateLinear) {
  const auto p = linear_example_problem();
  const auto u = linear_example_candidate().control;
  const Trajectory a = integrate_forward(p, u);
  const Trajectory b = integrate_forward(p.to_delayed(), u);
  for (double t = 0.0; t <= 4.0; t += 0.01) EXPECT_NEAR(a.eval(t)[0], b.eval(t)[0], 1e-12);
}

TEST(IntegrateAdjointLinear, LinearExample) {
  const auto p = linear_example_problem();
  const auto eta = integrate_adjoint_linear(p, linear_example_candidate());
  EXPECT_LE(max_state_error(eta.eta, oracle::linear_eta, 0.0, 4.0), 1e-8);
  EXPECT_EQ(eta(4.0)[0], 0.0);
}

TEST(IntegrateAdjointLinear, ContinuousAtTwo) {
  const auto eta =
      integrate_adjoint_linear(linear_example_problem(), linear_example_candidate());
  const double expected = 1.0 - oracle::e2;
  EXPECT_NEAR(eta(2.0, Side::left)[0], expected, 1e-8);
  EXPECT_NEAR(eta(2.0, Side::right)[0], expected, 1e-8);
}

TEST(IntegrateAdjointLinear, ZeroRightHandSide) {
  const Registry reg = Registry::builtin();
  const Example& ex = reg.get("zero-dynamics");
  const auto eta = integrate_adjoint_linear(ex.linear(), ex.candidate());
  for (double t : {0.0, 0.3, 0.5, 1.0}) EXPECT_EQ(eta(t)[0], 0.0);
}

TEST(IntegrateAdjointNonlinear, GoellmannMatchesValueFunctionGradient) {
  const auto eta = integrate_adjoint_nonlinear(goellmann_problem(), goellmann_candidate());
  double worst = 0.0;
  for (int k = 0; k <= 3000; ++k) {
    const double t = 3.0 * k / 3000.0;
    worst = std::max(worst, std::fabs(eta(t, Side::left)[0] + oracle::goellmann_dSdx(t)));
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(IntegrateAdjointNonlinear, ZeroCostGivesZero) {
  const Registry reg = Registry::builtin();
  const Example& ex = reg.get("zero-cost");
  const auto eta = integrate_adjoint_nonlinear(ex.delayed(), ex.candidate());
  for (double t : {0.0, 0.5, 1.0}) EXPECT_EQ(eta(t)[0], 0.0);
}

TEST(IntegrateAdjointNonlinear, AgreesWithLinearPath) {
  const auto p = linear_example_problem();
  const auto c = linear_example_candidate();
  const auto lin = integrate_adjoint_linear(p, c);
  const auto gen = integrate_adjoint_nonlinear(p.to_delayed(), c);
  for (double t = 0.0; t <= 4.0; t += 0.005) EXPECT_NEAR(lin(t)[0], gen(t)[0], 1e-7);
}

TEST(IntegrateAdjointNonlinear, FixedTerminalPointNeedsValue) {
  auto p = goellmann_problem();
  p.terminal = TerminalSet::point(Vector::Constant(1, 1.0));
  EXPECT_THROW(integrate_adjoint_nonlinear(p, goellmann_candidate()), std::invalid_argument);
  EXPECT_NO_THROW(integrate_adjoint_nonlinear(p, goellmann_candidate(), {}, Vector::Zero(1)));
}

TEST(DdeProperty, Rk4OrderOnLinearExample) {
  const auto p = linear_example_problem();
  const auto u = linear_example_candidate().control;
  std::vector<double> errors;
  for (int steps : {4, 8, 16, 32}) {
    IntegratorConfig cfg;
    cfg.scheme = Scheme::rk4;
    cfg.substeps_per_cell = steps;
    errors.push_back(max_state_error(integrate_forward(p, u, cfg), oracle::linear_x, 0.0, 4.0));
  }
  for (std::size_t k = 1; k < errors.size(); ++k) EXPECT_GE(errors[k - 1] / errors[k], 12.0);
}

TEST(DdeProperty, AdvancedLookupsStayInsideHorizon) {
  const auto p = linear_example_problem();
  const double b = 4.0, r = 2.0;
  int calls = 0;
  double latest = -1.0;
  IntegratorConfig cfg;
  cfg.on_advanced_lookup = [&](double t_plus_r) {
    ++calls;
    latest = std::max(latest, t_plus_r);
  };
  integrate_adjoint_linear(p, linear_example_candidate(), cfg);
  EXPECT_GT(calls, 0);
  EXPECT_LE(latest, b + 1e-12);
  // Nothing is requested for t > b - r.
  EXPECT_LE(latest - r, b - r + 1e-12);

  calls = 0;
  latest = -1.0;
  integrate_adjoint_nonlinear(goellmann_problem(), goellmann_candidate(), cfg);
  EXPECT_GT(calls, 0);
  EXPECT_LE(latest, 3.0 + 1e-12);
}

TEST(DdeProperty, ForwardBackwardProductRule) {
  const auto p = linear_example_problem();
  const auto c = linear_example_candidate();
  const Trajectory x = integrate_forward(p, c.control);
  const auto eta = integrate_adjoint_linear(p, c);
  for (double t : {0.37, 1.21, 1.77, 2.5, 3.3}) {
    const double delayed = t <= 2.0 ? eta(t + 2.0)[0] : 0.0;
    const double eta_dot = 1.0 - eta(t)[0] - delayed;
    const double x_dot = x.eval(t)[0] + x.eval(t - 2.0)[0] - 10.0 * c.control.eval(t - 1.0)[0];
    const double product_rule = eta_dot * x.eval(t)[0] + eta(t)[0] * x_dot;
    const double step = 1e-4;
    const double fd =
        (eta(t + step)[0] * x.eval(t + step)[0] - eta(t - step)[0] * x.eval(t - step)[0]) /
        (2.0 * step);
    EXPECT_NEAR(product_rule, fd, 1e-6 * (1.0 + std::fabs(fd)));
  }
}

TEST(DdeProperty, FiniteDifferencePartialsMatchHandCoded) {
  const auto p = goellmann_problem();
  const auto c = goellmann_candidate();
  for (double t : {0.2, 1.4, 2.6}) {
    const Vector x = c.state.eval(t), y = c.state.eval(t - 1.0);
    const Vector u = c.control.eval(t), v = c.control.eval(t - 2.0);
    const Partials fd = finite_difference_partials(p, t, x, y, u, v);
    const Partials an = p.partials(t, x, y, u, v);
    EXPECT_NEAR(fd.fy(0, 0), an.fy(0, 0), 1e-6);
    EXPECT_NEAR(fd.fv(0, 0), an.fv(0, 0), 1e-6);
    EXPECT_NEAR(fd.f0x[0], an.f0x[0], 1e-6);
    EXPECT_NEAR(fd.f0u[0], an.f0u[0], 1e-6);
  }
  IntegratorConfig analytic;
  analytic.analytic_partials = true;
  const auto a = integrate_adjoint_nonlinear(p, c, analytic);
  const auto f = integrate_adjoint_nonlinear(p, c);
  for (double t = 0.0; t <= 3.0; t += 0.01) EXPECT_NEAR(a(t)[0], f(t)[0], 1e-6);
}
