#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "retard_oc/cost.hpp"
#include "retard_oc/registry.hpp"
#include "retard_oc/solve.hpp"
#include "retard_oc/sufficiency.hpp"

using namespace retard_oc;

namespace {

double control_sup_error(const Trajectory& u, double (*exact)(double), double a, double b) {
  double worst = 0.0;
  for (int k = 0; k <= 4000; ++k) {
    const double t = a + (b - a) * k / 4000.0;
    worst = std::max(worst, std::fabs(u.eval(t)[0] - exact(t)));
  }
  return worst;
}

double zero_fn(double) { return 0.0; }

const DirectResult& direct_linear(int ne) {
  static std::map<int, DirectResult> cache;
  auto it = cache.find(ne);
  if (it == cache.end()) {
    TranscriptionConfig cfg;
    cfg.subintervals = ne;
    it = cache.emplace(ne, solve_direct_euler(linear_example_problem(), cfg)).first;
  }
  return it->second;
}

}  // namespace

TEST(Fbsm, LinearExampleFromZero) {
  const auto p = linear_example_problem();
  const SweepResult res = solve_fbsm(p, zero_control(p));
  EXPECT_TRUE(res.converged);
  EXPECT_LE(control_sup_error(res.solution.control, oracle::linear_u, 1.0, 3.0), 1e-5);
  EXPECT_LE(control_sup_error(res.solution.control, oracle::linear_u, 0.0, 4.0), 1e-5);
  EXPECT_NEAR(*res.solution.cost, oracle::kLinearCostPaperDecimal, 1e-3);
}

TEST(Fbsm, UncontrollableConvergesInOneSweep) {
  const auto p = Registry::builtin().get("uncontrollable").linear();
  const SweepResult res = solve_fbsm(p, zero_control(p));
  EXPECT_TRUE(res.converged);
  EXPECT_EQ(res.iterations, 1);
  EXPECT_LE(control_sup_error(res.solution.control, zero_fn, 0.0, 2.0), 1e-14);
}

TEST(Fbsm, FixedPointDoesNotDependOnRelaxation) {
  const auto p = linear_example_problem();
  SweepConfig half, full;
  full.omega = 1.0;
  const SweepResult a = solve_fbsm(p, zero_control(p), half);
  SweepResult b;
  try {
    b = solve_fbsm(p, zero_control(p), full);
  } catch (const NoConvergence&) {
    GTEST_SKIP() << "undamped sweep did not converge";
  }
  for (double t = 0.0; t <= 4.0; t += 0.01)
    EXPECT_NEAR(a.solution.control.eval(t)[0], b.solution.control.eval(t)[0], 1e-7);
}

TEST(Fbsm, FixedPointSatisfiesMaximality) {
  const auto p = linear_example_problem();
  const SweepResult res = solve_fbsm(p, zero_control(p));
  MaximalityOptions opt;
  opt.tol = 1e-6;
  EXPECT_TRUE(check_maximality(p, res.solution, res.eta, opt).pass);
  LinearVerifyConfig cfg;
  cfg.tol = cfg.admissibility_tol = 1e-3;
  EXPECT_TRUE(verify_state_linear(p, res.solution, cfg).overall());
}

TEST(Fbsm, NoConvergenceCarriesLastIterate) {
  const auto p = linear_example_problem();
  SweepConfig cfg;
  cfg.max_iterations = 2;
  try {
    solve_fbsm(p, zero_control(p), cfg);
    FAIL();
  } catch (const NoConvergenceWith<SweepResult>& e) {
    EXPECT_EQ(e.result().iterations, 2);
    EXPECT_FALSE(e.result().converged);
    EXPECT_EQ(e.result().history.size(), 2u);
  }
}

TEST(Direct, LinearExampleCost) {
  const DirectResult& res = direct_linear(2000);
  EXPECT_TRUE(res.converged);
  EXPECT_NEAR(*res.solution.cost, oracle::kLinearCostPaperDecimal, 1e-2);
}

TEST(Direct, ControlErrorIsFirstOrder) {
  const double e1 = control_sup_error(direct_linear(1000).solution.control, oracle::linear_u, 0.0, 4.0);
  const double e2 = control_sup_error(direct_linear(2000).solution.control, oracle::linear_u, 0.0, 4.0);
  EXPECT_GT(e1 / e2, 1.8);
  EXPECT_LT(e1 / e2, 2.2);
}

TEST(Direct, GoellmannControl) {
  TranscriptionConfig cfg;
  cfg.subintervals = 1500;
  const DirectResult res = solve_direct_euler(goellmann_problem(), cfg);
  EXPECT_LE(control_sup_error(res.solution.control, oracle::goellmann_u, 0.0, 0.999), 1e-2);
  EXPECT_LE(control_sup_error(res.solution.control, zero_fn, 1.0, 3.0), 1e-2);
}

TEST(Direct, ZeroCostStopsImmediately) {
  const auto p = Registry::builtin().get("zero-cost").delayed();
  TranscriptionConfig cfg;
  cfg.subintervals = 100;
  const DirectResult res = solve_direct_euler(p, cfg);
  EXPECT_EQ(res.iterations, 0);
  EXPECT_EQ(res.stationarity, 0.0);
  EXPECT_EQ(discrete_adjoint_gradient(p, Matrix::Constant(1, 100, 0.4)).lpNorm<Eigen::Infinity>(), 0.0);
}

TEST(Direct, RejectsIncompatibleGrid) {
  TranscriptionConfig cfg;
  cfg.subintervals = 250;
  EXPECT_THROW(solve_direct_euler(linear_example_problem(), cfg), std::invalid_argument);
}

TEST(Direct, RejectsFixedTerminalPoint) {
  auto p = goellmann_problem();
  p.terminal = TerminalSet::point(Vector::Constant(1, 1.0));
  TranscriptionConfig cfg;
  cfg.subintervals = 300;
  EXPECT_THROW(solve_direct_euler(p, cfg), std::invalid_argument);
}

TEST(Direct, GradientVanishesAtOptimum) {
  const DirectResult& res = direct_linear(2000);
  EXPECT_LE(discrete_adjoint_gradient(linear_example_problem(), res.control_samples)
                .lpNorm<Eigen::Infinity>(),
            1e-6);
}

TEST(Direct, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(3);
  auto check = [&](auto&& problem, int ne) {
    std::normal_distribution<double> noise(0.0, 0.2);
    Matrix u(problem.m, ne);
    for (Eigen::Index i = 0; i < u.size(); ++i) u.data()[i] = noise(rng);
    const Vector g = discrete_adjoint_gradient(problem, u);
    std::uniform_int_distribution<Eigen::Index> pick(0, u.size() - 1);
    for (int k = 0; k < 20; ++k) {
      const Eigen::Index i = pick(rng);
      const double step = 1e-5;
      Matrix up = u, dn = u;
      up.data()[i] += step;
      dn.data()[i] -= step;
      const double fd = (discrete_objective(problem, up) - discrete_objective(problem, dn)) / (2 * step);
      EXPECT_LE(std::fabs(fd - g[i]), 1e-6 * std::max(1.0, std::fabs(g[i]))) << i;
    }
  };
  check(linear_example_problem(), 400);
  check(goellmann_problem(), 300);
}

TEST(SolveProperty, ObjectiveIsMonotone) {
  const DirectResult& res = direct_linear(1000);
  for (std::size_t k = 1; k < res.history.size(); ++k)
    EXPECT_LE(res.history[k].objective, res.history[k - 1].objective);
}

TEST(SolveProperty, RefinementApproachesAnalyticCost) {
  double prev = std::numeric_limits<double>::infinity();
  for (int ne : {500, 1000, 2000, 4000}) {
    const double gap = std::fabs(*direct_linear(ne).solution.cost - oracle::kLinearCostPaperDecimal);
    EXPECT_LT(gap, prev) << ne;
    prev = gap;
  }
}

TEST(SolveProperty, DiscreteAndQuadratureCostsConverge) {
  double prev = std::numeric_limits<double>::infinity();
  for (int ne : {500, 1000, 2000}) {
    const DirectResult& res = direct_linear(ne);
    const double gap = std::fabs(res.discrete_objective - *res.solution.cost);
    EXPECT_LT(gap, prev);
    prev = gap;
  }
}

TEST(ControlFromSamples, InterpolatesPerCell) {
  const auto lat = linear_example_problem().lattice();
  Matrix s(1, 40);
  for (int k = 0; k < 40; ++k) s(0, k) = 0.1 * k;
  const Trajectory u = control_from_samples(lat, s);
  EXPECT_NEAR(u.eval(0.0)[0], 0.0, 1e-12);
  EXPECT_NEAR(u.eval(1.05)[0], 1.05, 1e-9);
  EXPECT_NEAR(u.eval(4.0)[0], 4.0, 1e-9);
}
