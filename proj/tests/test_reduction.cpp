#include <gtest/gtest.h>

#include <random>

#include "retard_oc/cost.hpp"
#include "retard_oc/errors.hpp"
#include "retard_oc/reduction.hpp"
#include "retard_oc/registry.hpp"

using namespace retard_oc;

namespace {

Vector v1(double x) { return Vector::Constant(1, x); }

double sup_gap(const Trajectory& p, const Trajectory& q, double a, double b) {
  double worst = 0.0;
  for (int k = 0; k <= 2000; ++k) {
    const double t = a + (b - a) * k / 2000.0;
    worst = std::max(worst, (p.eval(t, Side::left) - q.eval(t, Side::left)).lpNorm<Eigen::Infinity>());
    worst = std::max(worst, (p.eval(t) - q.eval(t)).lpNorm<Eigen::Infinity>());
  }
  return worst;
}

struct Case {
  DelayedProblem problem;
  std::optional<StateLinearProblem> linear;
  CandidateSolution cand;
};

std::vector<Case> registered_candidates() {
  return {{linear_example_problem().to_delayed(), linear_example_problem(), linear_example_candidate()},
          {goellmann_problem(), std::nullopt, goellmann_candidate()}};
}

AugmentedProblem augment_case(const Case& c) {
  return c.linear ? augment(*c.linear, c.problem.lattice()) : augment(c.problem, c.problem.lattice());
}

}  // namespace

TEST(Augment, LinearExampleShape) {
  const auto p = linear_example_problem();
  const auto aug = augment(p, p.lattice());
  EXPECT_EQ(aug.cells, 4);
  EXPECT_EQ(aug.stacked_state_dimension(), 4);
  EXPECT_EQ(aug.stacked_control_dimension(), 4);
  EXPECT_EQ(aug.state_offset, 2);
  EXPECT_EQ(aug.control_offset, 1);
}

TEST(Augment, GoellmannShape) {
  const auto p = goellmann_problem();
  const auto aug = augment(p, p.lattice());
  EXPECT_EQ(aug.stacked_state_dimension(), 3);
  EXPECT_EQ(aug.state_offset, 1);
  EXPECT_EQ(aug.control_offset, 2);
}

TEST(Augment, SingleBlockReadsOnlyHistory) {
  const Registry reg = Registry::builtin();
  const Example& ex = reg.get("zero-cost");
  const auto p = ex.delayed();
  const auto aug = augment(p, p.lattice());
  EXPECT_EQ(aug.cells, 1);
  EXPECT_EQ(aug.state_offset, 1);
  EXPECT_EQ(aug.control_offset, 1);
  const auto back = reassemble(stack(ex.candidate(), aug), aug);
  EXPECT_EQ(back.state.eval(0.5)[0], 1.0);
}

TEST(Augment, RejectsMismatchedLattice) {
  const auto p = linear_example_problem();
  const auto other = make_lattice(Rational(0), Rational(4), Rational(2), Rational(1, 2));
  EXPECT_THROW(augment(p, other), RejectsMismatchedLattice);
  EXPECT_THROW(augment(p.to_delayed(), other), RejectsMismatchedLattice);
}

TEST(Reassemble, RoundTripIsIdentity) {
  for (const Case& c : registered_candidates()) {
    const auto aug = augment_case(c);
    const auto back = reassemble(stack(c.cand, aug), aug);
    const double a = c.problem.a.to_double(), b = c.problem.b.to_double();
    EXPECT_LE(sup_gap(back.state, c.cand.state, a, b), 1e-12) << c.problem.name;
    EXPECT_LE(sup_gap(back.control, c.cand.control, a, b), 1e-12) << c.problem.name;
    EXPECT_EQ(back.state.history_start(), c.cand.state.history_start());
  }
}

TEST(Reassemble, BrokenSeamIsRejected) {
  const auto p = linear_example_problem();
  const auto aug = augment(p, p.lattice());
  StackedSolution st = stack(linear_example_candidate(), aug);
  const Trajectory good = st.state;
  st.state = Trajectory::function(4, Rational(0), aug.h, [good](double s) {
    Vector x = good.eval(s);
    x[2] += 0.1;
    return x;
  });
  EXPECT_GT(linkage_residual(st.state, aug), 0.09);
  EXPECT_THROW(reassemble(st, aug), SeamMismatch);
}

TEST(ReductionProperty, CostEquivalence) {
  for (const Case& c : registered_candidates()) {
    const auto aug = augment_case(c);
    EXPECT_NEAR(augmented_cost(aug, stack(c.cand, aug)), evaluate_cost(c.problem, c.cand), 1e-10);
  }
}

TEST(ReductionProperty, CostEquivalenceOnPerturbedCandidates) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> amp(0.0, 0.3);
  for (const Case& c : registered_candidates()) {
    const auto aug = augment_case(c);
    for (int k = 0; k < 5; ++k) {
      const double A = amp(rng), w = 1.0 + k;
      const Trajectory u0 = c.cand.control;
      CandidateSolution pert;
      pert.control = Trajectory::function(1, c.problem.a, c.problem.b, [=](double t) {
        return Vector(u0.eval(t).array() + A * std::sin(w * t));
      });
      pert.state = integrate_forward(c.problem, pert.control);
      EXPECT_NEAR(augmented_cost(aug, stack(pert, aug)), evaluate_cost(c.problem, pert), 1e-10);
    }
  }
}

TEST(ReductionProperty, DynamicsEquivalence) {
  for (const Case& c : registered_candidates()) {
    const auto aug = augment_case(c);
    const StackedSolution st = stack(c.cand, aug);
    const Trajectory X = integrate_augmented(aug, st.control);
    const auto back = reassemble(StackedSolution{X, st.control}, aug, 1e-8);
    const Trajectory direct = integrate_forward(c.problem, c.cand.control);
    EXPECT_LE(sup_gap(back.state, direct, c.problem.a.to_double(), c.problem.b.to_double()), 1e-8)
        << c.problem.name;
  }
}

TEST(ReductionProperty, OffsetsAreExactIntegers) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> num(0, 12), den(1, 12);
  for (int k = 0; k < 300; ++k) {
    StateLinearProblem p = Registry::builtin().get("zero-dynamics").linear();
    p.a = Rational(0);
    p.b = Rational(num(rng) + 1, den(rng));
    p.r = Rational(num(rng), den(rng));
    p.s = Rational(num(rng), den(rng));
    if (p.r.is_zero() && p.s.is_zero()) continue;
    p.state_history = Trajectory::constant(-p.r - Rational(1), Rational(0), v1(2));
    p.control_history = p.s.is_zero() ? Trajectory() : Trajectory::constant(-p.s, Rational(0), v1(0));
    const auto aug = augment(p, p.lattice());
    EXPECT_EQ(Rational(aug.state_offset) * aug.h, p.r);
    EXPECT_EQ(Rational(aug.control_offset) * aug.h, p.s);
    EXPECT_EQ(Rational(aug.cells) * aug.h, p.b - p.a);
  }
}
