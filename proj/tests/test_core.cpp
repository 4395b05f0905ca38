#include <gtest/gtest.h>

#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "retard_oc/cost.hpp"
#include "retard_oc/differentiation.hpp"
#include "retard_oc/errors.hpp"
#include "retard_oc/lattice.hpp"
#include "retard_oc/parallel.hpp"
#include "retard_oc/registry.hpp"

using namespace retard_oc;

namespace {

Vector v1(double x) { return Vector::Constant(1, x); }

}  // namespace

TEST(Rational, LowestTermsAndSign) {
  const Rational q(6, -8);
  EXPECT_EQ(q.num(), -3);
  EXPECT_EQ(q.den(), 4);
  EXPECT_EQ(Rational(1, 3) + Rational(1, 6), Rational(1, 2));
  EXPECT_EQ(Rational(2, 3) * Rational(3, 4), Rational(1, 2));
  EXPECT_LT(Rational(1, 3), Rational(1, 2));
  EXPECT_THROW(Rational(1, 0), std::domain_error);
}

TEST(Rational, ParseForms) {
  EXPECT_EQ(Rational::parse("3"), Rational(3));
  EXPECT_EQ(Rational::parse("-7/2"), Rational(-7, 2));
  EXPECT_EQ(Rational::parse("0.125"), Rational(1, 8));
  EXPECT_EQ(Rational::parse("1.5e-2"), Rational(3, 200));
  EXPECT_ANY_THROW(Rational::parse("abc"));
}

TEST(Rational, FromDoubleRejectsIrrational) {
  EXPECT_EQ(Rational::from_double(0.25), Rational(1, 4));
  EXPECT_THROW(Rational::from_double(std::sqrt(2.0)), RejectsIncommensurable);
  EXPECT_THROW(Rational::from_double(std::nan("")), RejectsIncommensurable);
}

TEST(Rational, OverflowIsReported) {
  const Rational big(std::int64_t{1} << 62);
  EXPECT_THROW(big * big, std::overflow_error);
}

TEST(Rational, Gcd) {
  EXPECT_EQ(gcd(Rational(1, 2), Rational(1)), Rational(1, 2));
  EXPECT_EQ(gcd(Rational(2, 3), Rational(1, 2)), Rational(1, 6));
  EXPECT_EQ(gcd(Rational(0), Rational(3, 4)), Rational(3, 4));
}

TEST(Lattice, LinearExample) {
  const auto lat = make_lattice(Rational(0), Rational(4), Rational(2), Rational(1));
  EXPECT_EQ(lat.h(), Rational(1));
  EXPECT_EQ(lat.cells(), 4);
  EXPECT_EQ(lat.state_shift(), 2);
  EXPECT_EQ(lat.control_shift(), 1);
  EXPECT_EQ(lat.breakpoints().back(), Rational(4));
}

TEST(Lattice, GoellmannExample) {
  const auto lat = make_lattice(Rational(0), Rational(3), Rational(1), Rational(2));
  EXPECT_EQ(lat.h(), Rational(1));
  EXPECT_EQ(lat.cells(), 3);
}

TEST(Lattice, ZeroControlDelayAllowed) {
  const auto lat = make_lattice(Rational(0), Rational(1), Rational(1, 2), Rational(0));
  EXPECT_EQ(lat.h(), Rational(1, 2));
  EXPECT_EQ(lat.cells(), 2);
}

TEST(Lattice, Rejections) {
  EXPECT_THROW(make_lattice(Rational(0), Rational(1), Rational(0), Rational(0)), RejectsZeroDelays);
  EXPECT_THROW(make_lattice(Rational(1), Rational(0), Rational(1), Rational(0)),
               std::invalid_argument);
  EXPECT_THROW(make_lattice(0.0, 1.0, std::sqrt(2.0), 1.0), RejectsIncommensurable);
}

TEST(Lattice, HalfOpenCells) {
  const auto lat = make_lattice(Rational(0), Rational(4), Rational(2), Rational(1));
  EXPECT_EQ(lat.cell_of(Rational(0)), 0);
  EXPECT_EQ(lat.cell_of(Rational(1)), 1);
  EXPECT_EQ(lat.cell_of(Rational(4)), 3);
  EXPECT_EQ(lat.cell_of(Rational(-1, 2)), -1);
  EXPECT_EQ(lat.cell_of(1.0, Side::left), 0);
  EXPECT_EQ(lat.cell_of(1.0, Side::right), 1);
}

TEST(LatticeProperty, GcdDividesEveryConstant) {
  std::mt19937_64 rng(20261016);
  std::uniform_int_distribution<int> num(0, 40), den(1, 24);
  int accepted = 0;
  for (int k = 0; k < 1000; ++k) {
    const Rational a(num(rng) - 20, den(rng));
    const Rational len(num(rng) + 1, den(rng));
    const Rational r(num(rng), den(rng)), s(num(rng), den(rng));
    if (r.is_zero() && s.is_zero()) continue;
    const auto lat = make_lattice(a, a + len, r, s);
    ++accepted;
    for (const Rational& q : {r, s, len}) EXPECT_TRUE((q / lat.h()).is_integer());
    EXPECT_EQ(Rational(lat.cells()) * lat.h(), len);
    EXPECT_EQ(Rational(lat.state_shift()) * lat.h(), r);
    EXPECT_EQ(Rational(lat.control_shift()) * lat.h(), s);
    // No larger common divisor: the quotients are coprime.
    Rational g = len / lat.h();
    if (!r.is_zero()) g = gcd(g, r / lat.h());
    if (!s.is_zero()) g = gcd(g, s / lat.h());
    EXPECT_EQ(g, Rational(1));
  }
  EXPECT_GT(accepted, 900);
}

TEST(Trajectory, BreakpointOwnership) {
  const auto lo = std::make_shared<ConstantCurve>(v1(1.0));
  const auto hi = std::make_shared<ConstantCurve>(v1(2.0));
  const Trajectory traj(1, Rational(0), {Segment{Rational(0), Rational(1), lo},
                                         Segment{Rational(1), Rational(2), hi}});
  EXPECT_EQ(traj.eval(1.0)[0], 2.0);
  EXPECT_EQ(traj.eval(1.0, Side::left)[0], 1.0);
  EXPECT_EQ(traj.eval(2.0)[0], 2.0);
  EXPECT_THROW(traj.eval(2.5), OutOfDomain);
  EXPECT_THROW(traj.eval(-0.1), OutOfDomain);
}

TEST(Trajectory, EmptyThrows) {
  const Trajectory empty;
  EXPECT_FALSE(empty.covers(Rational(0)));
  EXPECT_THROW(empty.eval(Rational(0)), OutOfDomain);
  EXPECT_THROW(empty.eval(0.0), OutOfDomain);
}

TEST(Trajectory, WithHistoryAndMainPart) {
  const Trajectory main = Trajectory::constant(Rational(0), Rational(1), v1(3.0));
  const Trajectory hist = Trajectory::constant(Rational(-1), Rational(0), v1(7.0));
  const Trajectory both = main.with_history(hist);
  EXPECT_EQ(both.history_start(), Rational(-1));
  EXPECT_EQ(both.main_start(), Rational(0));
  EXPECT_EQ(both.eval(-0.5)[0], 7.0);
  EXPECT_EQ(both.eval(0.0)[0], 3.0);
  EXPECT_EQ(both.main_part().history_start(), Rational(0));
}

TEST(EvalDelayed, ReadsStateHistory) {
  const CandidateSolution c = linear_example_candidate();
  EXPECT_EQ(eval_delayed(c.state, 1.0, Rational(2))[0], 1.0);
  EXPECT_EQ(eval_delayed(c.state, 2.5, Rational(0))[0], c.state.eval(2.5)[0]);
  EXPECT_THROW(eval_delayed(c.state, 0.0, Rational(3)), OutOfDomain);
}

TEST(EvalDelayed, ReadsControlHistory) {
  const CandidateSolution c = goellmann_candidate();
  EXPECT_EQ(eval_delayed(c.control, 1.5, Rational(2))[0], 0.0);
}

TEST(EvalDelayedProperty, HistoryIsExact) {
  const StateLinearProblem p = linear_example_problem();
  const Trajectory x = linear_example_candidate().state;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> t(0.0, 2.0);
  for (int k = 0; k < 200; ++k) {
    const double at = t(rng);
    EXPECT_EQ(eval_delayed(x, at, Rational(2))[0], p.state_history.eval(at - 2.0)[0]);
  }
}

TEST(ControlSet, BoxProjection) {
  const ControlSet box = ControlSet::box(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0));
  Vector u(2);
  u << 3.0, -0.5;
  const Vector p = box.project(u);
  EXPECT_EQ(p[0], 1.0);
  EXPECT_EQ(p[1], -0.5);
  EXPECT_FALSE(box.contains(u));
  EXPECT_TRUE(box.contains(p));
  EXPECT_TRUE(ControlSet::free(2).contains(u));
}

TEST(Cost, LinearExampleAnalytic) {
  const double c = evaluate_cost(linear_example_problem(), linear_example_candidate());
  EXPECT_NEAR(c, oracle::kLinearCost, 1e-10);
  EXPECT_NEAR(c, oracle::kLinearCostPaperDecimal, 1e-3);
}

TEST(Cost, GoellmannMatchesValueFunction) {
  const DelayedProblem p = goellmann_problem();
  const double c = evaluate_cost(p, goellmann_candidate());
  EXPECT_NEAR(c, oracle::kGoellmannCost, 1e-10);
  const double minus_S = -goellmann_value_function().S(0.0, v1(1.0));
  EXPECT_NEAR(c, minus_S, 1e-8);
}

TEST(Cost, ZeroRunningCost) {
  const Registry reg = Registry::builtin();
  const Example& ex = reg.get("zero-cost");
  EXPECT_EQ(evaluate_cost(ex.delayed(), ex.candidate()), 0.0);
}

TEST(Cost, SimpsonNeedsEvenSteps) {
  QuadratureConfig cfg{7, QuadratureRule::simpson};
  EXPECT_THROW(cell_quadrature_weights(cfg), std::invalid_argument);
  cfg = {6, QuadratureRule::boole};
  EXPECT_THROW(cell_quadrature_weights(cfg), std::invalid_argument);
}

TEST(CostProperty, DoublingResolutionOnLinearExample) {
  const auto p = linear_example_problem();
  const auto c = linear_example_candidate();
  double prev = evaluate_cost(p, c, {256, QuadratureRule::boole});
  for (int steps : {512, 1024}) {
    const double next = evaluate_cost(p, c, {steps, QuadratureRule::boole});
    EXPECT_LE(std::fabs(next - prev), 1e-10);
    EXPECT_LE(std::fabs(next - prev), 1e-12 * std::fabs(prev));
    prev = next;
  }
}

TEST(CostProperty, SimpsonAgreesWithBoole) {
  const auto p = goellmann_problem();
  const auto c = goellmann_candidate();
  EXPECT_NEAR(evaluate_cost(p, c, {1024, QuadratureRule::simpson}),
              evaluate_cost(p, c, {256, QuadratureRule::boole}), 1e-12);
}

TEST(Differentiation, MatchesAnalytic) {
  auto f = [](const Vector& x) { return std::sin(x[0]) * x[1] * x[1]; };
  Vector at(2);
  at << 0.3, 1.7;
  const Vector g = fd_gradient(f, at);
  EXPECT_NEAR(g[0], std::cos(0.3) * 1.7 * 1.7, 1e-9);
  EXPECT_NEAR(g[1], 2.0 * std::sin(0.3) * 1.7, 1e-9);
  const Matrix h = fd_hessian(f, at);
  EXPECT_NEAR(h(0, 1), 2.0 * std::cos(0.3) * 1.7, 1e-5);
  EXPECT_EQ(h(0, 1), h(1, 0));
}

TEST(Differentiation, NonFiniteProbe) {
  auto f = [](const Vector& x) { return std::log(x[0]); };
  EXPECT_THROW(fd_gradient(f, v1(0.0)), NonFiniteDerivative);
}

TEST(Parallel, SerialAndOpenMpAgree) {
  auto f = [](std::size_t i) { return std::sin(static_cast<double>(i)); };
  const auto a = parallel_map<double>(1000, f, Execution::serial);
  const auto b = parallel_map<double>(1000, f, Execution::parallel);
  EXPECT_EQ(a, b);
  const WorstSample ws = worst_sample(1000, f, Execution::parallel);
  const WorstSample wr = worst_sample(1000, f, Execution::serial);
  EXPECT_EQ(ws.index, wr.index);
  EXPECT_EQ(ws.value, wr.value);
}

TEST(Parallel, LowestFailingIndexWins) {
  auto f = [](std::size_t i) -> double {
    if (i == 17 || i == 900) throw std::runtime_error(std::to_string(i));
    return 0.0;
  };
  try {
    parallel_map<double>(1000, f);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "17");
  }
}
