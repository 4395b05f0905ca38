#include "retard_oc/reduction.hpp"

#include <cmath>

#include "retard_oc/errors.hpp"
#include "retard_oc/runge_kutta.hpp"

namespace retard_oc {
namespace {

Side side_in_cell(double sigma, double h) {
  return std::fabs(sigma - h) <= breakpoint_tolerance(h) ? Side::left : Side::right;
}

// Block i of a stacked curve is the original trajectory on cell i.
class StackedCurve final : public Curve {
 public:
  StackedCurve(Trajectory original, std::vector<double> starts, double h)
      : original_(std::move(original)), starts_(std::move(starts)), h_(h) {}
  int dimension() const override {
    return original_.dimension() * static_cast<int>(starts_.size());
  }
  Vector value(double sigma) const override {
    const int w = original_.dimension();
    Vector out(dimension());
    const Side side = side_in_cell(sigma, h_);
    for (std::size_t i = 0; i < starts_.size(); ++i)
      out.segment(static_cast<Eigen::Index>(i) * w, w) = original_.eval(starts_[i] + sigma, side);
    return out;
  }

 private:
  Trajectory original_;
  std::vector<double> starts_;
  double h_;
};

// Cell i of a reassembled trajectory is block i of the stacked one.
class BlockCurve final : public Curve {
 public:
  BlockCurve(Trajectory stacked, int block, int width, double start, double h)
      : stacked_(std::move(stacked)), block_(block), width_(width), start_(start), h_(h) {}
  int dimension() const override { return width_; }
  Vector value(double t) const override {
    const double sigma = t - start_;
    return stacked_.eval(sigma, side_in_cell(sigma, h_)).segment(block_ * width_, width_);
  }

 private:
  Trajectory stacked_;
  int block_, width_;
  double start_, h_;
};

std::vector<double> cell_starts(const AugmentedProblem& aug) {
  std::vector<double> out;
  for (std::int64_t i = 0; i < aug.cells; ++i) out.push_back((aug.a + Rational(i) * aug.h).to_double());
  return out;
}

}  // namespace

AugmentedProblem augment(const DelayedProblem& p, const CommensurabilityLattice& lat) {
  if (lat.a() != p.a || lat.b() != p.b || lat.r() != p.r || lat.s() != p.s)
    throw RejectsMismatchedLattice("lattice (a, b, r, s) = (" + lat.a().str() + ", " +
                                   lat.b().str() + ", " + lat.r().str() + ", " + lat.s().str() +
                                   ") does not match the problem");
  AugmentedProblem aug;
  aug.cells = lat.cells();
  aug.a = lat.a();
  aug.h = lat.h();
  aug.n = p.n;
  aug.m = p.m;
  aug.state_offset = lat.state_shift();
  aug.control_offset = lat.control_shift();
  aug.initial_block = p.state_history.eval(p.a, Side::left);
  aug.state_history = p.state_history;
  aug.control_history = p.control_history;

  const std::int64_t N = aug.cells, dr = aug.state_offset, ds = aug.control_offset;
  const int n = p.n, m = p.m;
  const double h = aug.length(), r = p.r.to_double(), s = p.s.to_double();
  const std::vector<double> starts = cell_starts(aug);

  // Delayed arguments of block i: another block, or the frozen history.
  auto delayed = [=](double sigma, const Vector& X, const Vector& W, std::int64_t i) {
    const Side side = side_in_cell(sigma, h);
    const double t = starts[static_cast<std::size_t>(i)] + sigma;
    const Vector x = X.segment(i * n, n);
    const Vector u = W.segment(i * m, m);
    Vector y = dr == 0 ? x
               : i - dr >= 0 ? Vector(X.segment((i - dr) * n, n))
                             : p.state_history.eval(t - r, side);
    Vector v = ds == 0 ? u
               : i - ds >= 0 ? Vector(W.segment((i - ds) * m, m))
                             : p.control_history.eval(t - s, side);
    return std::tuple<double, Vector, Vector, Vector, Vector>{t, x, y, u, v};
  };

  aug.dynamics = [=](double sigma, const Vector& X, const Vector& W) {
    Vector out(n * N);
    for (std::int64_t i = 0; i < N; ++i) {
      auto [t, x, y, u, v] = delayed(sigma, X, W, i);
      out.segment(i * n, n) = p.dynamics(t, x, y, u, v);
    }
    return out;
  };
  aug.running_cost = [=](double sigma, const Vector& X, const Vector& W) {
    double total = 0.0;
    for (std::int64_t i = 0; i < N; ++i) {
      auto [t, x, y, u, v] = delayed(sigma, X, W, i);
      total += p.running_cost(t, x, y, u, v);
    }
    return total;
  };
  aug.terminal_cost = [=](const Vector& X) { return p.g0(X.segment((N - 1) * n, n)); };
  return aug;
}

AugmentedProblem augment(const StateLinearProblem& p, const CommensurabilityLattice& lat) {
  return augment(p.to_delayed(), lat);
}

Trajectory stack_control(const Trajectory& control, const AugmentedProblem& aug) {
  auto curve = std::make_shared<StackedCurve>(control, cell_starts(aug), aug.length());
  return Trajectory(curve->dimension(), Rational(0), {Segment{Rational(0), aug.h, curve}});
}

StackedSolution stack(const CandidateSolution& cand, const AugmentedProblem& aug) {
  return {stack_control(cand.state, aug), stack_control(cand.control, aug)};
}

double linkage_residual(const Trajectory& X, const AugmentedProblem& aug) {
  const int n = aug.n;
  const Vector start = X.eval(Rational(0));
  const Vector end = X.eval(aug.h, Side::left);
  double worst = (start.head(n) - aug.initial_block).lpNorm<Eigen::Infinity>();
  for (std::int64_t i = 0; i + 1 < aug.cells; ++i)
    worst = std::max(worst,
                     (start.segment((i + 1) * n, n) - end.segment(i * n, n)).lpNorm<Eigen::Infinity>());
  return worst;
}

CandidateSolution reassemble(const StackedSolution& stacked, const AugmentedProblem& aug,
                             double tol) {
  const double seam = linkage_residual(stacked.state, aug);
  if (!(seam <= tol))
    throw SeamMismatch("block linkage residual " + std::to_string(seam) + " exceeds " +
                       std::to_string(tol));
  const auto starts = cell_starts(aug);
  const double h = aug.length();
  auto unstack = [&](const Trajectory& traj, int width) {
    std::vector<Segment> segs;
    for (std::int64_t i = 0; i < aug.cells; ++i) {
      auto curve = std::make_shared<BlockCurve>(traj, static_cast<int>(i), width,
                                                starts[static_cast<std::size_t>(i)], h);
      segs.push_back(Segment{aug.a + Rational(i) * aug.h, aug.a + Rational(i + 1) * aug.h, curve});
    }
    return Trajectory(width, aug.a, std::move(segs));
  };
  CandidateSolution out;
  out.state = unstack(stacked.state, aug.n).with_history(aug.state_history);
  out.control = unstack(stacked.control, aug.m);
  if (!aug.control_history.empty()) out.control = out.control.with_history(aug.control_history);
  return out;
}

double augmented_cost(const AugmentedProblem& aug, const StackedSolution& stacked,
                      const QuadratureConfig& cfg) {
  const auto weights = cell_quadrature_weights(cfg);
  const double h = aug.length();
  double total = 0.0;
  for (int j = 0; j <= cfg.steps_per_cell; ++j) {
    const double sigma = h * j / cfg.steps_per_cell;
    const Side side = j == cfg.steps_per_cell ? Side::left : Side::right;
    total += weights[static_cast<std::size_t>(j)] *
             aug.running_cost(sigma, stacked.state.eval(sigma, side),
                              stacked.control.eval(sigma, side));
  }
  return h * total + aug.terminal_cost(stacked.state.eval(aug.h, Side::left));
}

Trajectory integrate_augmented(const AugmentedProblem& aug, const Trajectory& W,
                               const IntegratorConfig& cfg) {
  if (cfg.substeps_per_cell < 1) throw std::invalid_argument("substeps_per_cell must be >= 1");
  const Tableau& tab = tableau_for(cfg.scheme);
  const int n = aug.n;
  const double h = aug.length();
  StageRhs rhs = [&](double sigma, const Vector& X, Side side) {
    return aug.dynamics(sigma, X, W.eval(sigma, side));
  };
  Vector start = aug.initial_block.replicate(aug.cells, 1);
  std::shared_ptr<const NodalCurve> curve;
  for (std::int64_t sweep = 0; sweep < aug.cells; ++sweep) {
    Vector z = start;
    curve = integrate_interval(tab, 0.0, h, cfg.substeps_per_cell, z, rhs, cfg.dense_output);
    for (std::int64_t i = 0; i + 1 < aug.cells; ++i) start.segment((i + 1) * n, n) = z.segment(i * n, n);
  }
  return Trajectory(aug.stacked_state_dimension(), Rational(0), {Segment{Rational(0), aug.h, curve}});
}

}  // namespace retard_oc
