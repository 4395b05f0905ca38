#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "retard_oc/differentiation.hpp"
#include "retard_oc/errors.hpp"
#include "retard_oc/sufficiency.hpp"

namespace retard_oc {
namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double inf_norm(const Vector& v) { return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0; }

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

struct LinearContext {
  const StateLinearProblem& p;
  const Trajectory& state;
  Trajectory control;
  Rational b_minus_s;

  LinearContext(const StateLinearProblem& problem, const CandidateSolution& cand)
      : p(problem),
        state(cand.state),
        control(with_control_history(cand.control, problem.control_history)),
        b_minus_s(problem.b - problem.s) {}

  double criterion(const AdjointTrajectory& eta, const Rational& t, const Vector& u,
                   std::optional<Side> limit = {}) const {
    const Side side = limit.value_or(Side::right);
    const Vector x = state.eval(t, side);
    const Vector y = state.eval(t - p.r, side);
    const Vector v = control.eval(t - p.s, side);
    double value =
        hamiltonian_state_linear(p, 1, t.to_double(), x, y, u, v, eta.eta.eval(t, side));
    bool chi = p.a <= t && t <= b_minus_s;
    if (limit == Side::right) chi = p.a <= t && t < b_minus_s;
    if (limit == Side::left) chi = p.a < t && t <= b_minus_s;
    if (chi) {
      const Rational ts = t + p.s;
      value += hamiltonian_state_linear(p, 0, ts.to_double(), state.eval(ts, side),
                                        state.eval(ts - p.r, side), control.eval(ts, side), u,
                                        eta.eta.eval(ts, side));
    }
    return value;
  }
};

double golden_section(const std::function<double(double)>& f, double lo, double hi) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + std::fabs(lo) + std::fabs(hi)); ++it) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 >= f2 ? x1 : x2;
}

Vector argmax_scalar(const std::function<double(const Vector&)>& crit, const ControlSet& U,
                     const Vector& center) {
  auto f = [&](double w) {
    Vector u(1);
    u[0] = w;
    return crit(u);
  };
  double best_u, best_f;
  if (U.is_box()) {
    const double lo = U.lower()[0], hi = U.upper()[0];
    best_u = lo;
    best_f = f(lo);
    if (f(hi) > best_f) {
      best_u = hi;
      best_f = f(hi);
    }
    if (hi > lo) {
      constexpr int pieces = 8;
      for (int k = 0; k < pieces; ++k) {
        const double a = lo + (hi - lo) * k / pieces, b = lo + (hi - lo) * (k + 1) / pieces;
        const double w = golden_section(f, a, b);
        const double fw = f(w);
        if (fw > best_f) {
          best_u = w;
          best_f = fw;
        }
      }
    }
  } else {
    const double c = center.size() == 1 ? center[0] : 0.0;
    const double fc = f(c);
    double step = 1e-3 * (1.0 + std::fabs(c));
    const double dir = f(c + step) >= f(c - step) ? 1.0 : -1.0;
    double prev = c, cur = c + dir * step, fprev = fc, fcur = f(cur);
    int grow = 0;
    while (fcur > fprev) {
      if (++grow > 80 || !std::isfinite(fcur)) throw UnboundedCriterion("criterion has no maximum on U");
      step *= 2.0;
      prev = cur;
      fprev = fcur;
      cur = prev + dir * step;
      fcur = f(cur);
    }
    const double lo = std::min(prev - dir * step / 2.0, cur), hi = std::max(prev - dir * step / 2.0, cur);
    best_u = golden_section(f, lo, hi);
    best_f = f(best_u);
    if (fc > best_f) best_u = c;
  }
  Vector out(1);
  out[0] = best_u;
  return out;
}

Vector projected_ascent(const std::function<double(const Vector&)>& crit, const ControlSet& U,
                        Vector u) {
  u = U.project(u);
  double fu = crit(u);
  double step = 1.0;
  for (int it = 0; it < 500; ++it) {
    const Vector g = fd_gradient(crit, u);
    if (inf_norm(g) < 1e-12) break;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      const Vector trial = U.project(u + step * g);
      const double ft = crit(trial);
      if (ft >= fu + 1e-4 * g.dot(trial - u)) {
        if (!U.is_box() && inf_norm(trial) > 1e12)
          throw UnboundedCriterion("criterion has no maximum on U");
        const double moved = inf_norm(trial - u);
        u = trial;
        fu = ft;
        accepted = true;
        step *= 2.0;
        if (moved < 1e-14 * (1.0 + inf_norm(u))) it = 500;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  return u;
}

}  // namespace

std::vector<Rational> lattice_samples(const CommensurabilityLattice& lat, int per_cell) {
  if (per_cell < 1) throw std::invalid_argument("need at least one sample per cell");
  std::vector<Rational> out;
  const Rational d = lat.h() / Rational(per_cell);
  for (std::int64_t k = 0; k <= lat.cells() * per_cell; ++k) out.push_back(lat.a() + Rational(k) * d);
  return out;
}

double hamiltonian_state_linear(const StateLinearProblem& p, int which, double t, const Vector& x,
                                const Vector& y, const Vector& u, const Vector& v,
                                const Vector& eta) {
  if (which != 0 && which != 1) throw std::invalid_argument("Hamiltonian index must be 0 or 1");
  Vector rhs = p.A(t) * x + p.A_D(t) * y;
  if (which == 1)
    rhs += p.g(t, u);
  else
    rhs += p.g_D(t, v);
  return -(p.state_cost(t, x, y) + p.control_cost(t, u, v)) + eta.dot(rhs);
}

double hamiltonian_nonlinear(const DelayedProblem& p, double t, const Vector& x, const Vector& y,
                             const Vector& u, const Vector& v, const Vector& eta) {
  return -p.running_cost(t, x, y, u, v) + eta.dot(p.dynamics(t, x, y, u, v));
}

double maximality_criterion(const StateLinearProblem& p, const CandidateSolution& cand,
                            const AdjointTrajectory& eta, const Rational& t, const Vector& u,
                            std::optional<Side> limit) {
  return LinearContext(p, cand).criterion(eta, t, u, limit);
}

Vector argmax_criterion(const std::function<double(const Vector&)>& crit, const ControlSet& U,
                        bool quadratic, const Vector& center_in) {
  const int m = U.dimension();
  const Vector center = center_in.size() == m ? center_in : Vector::Zero(m);

  if (quadratic) {
    const double q0 = crit(center);
    Vector g(m), qp(m);
    Matrix H(m, m);
    for (int i = 0; i < m; ++i) {
      Vector e = center;
      e[i] += 1.0;
      qp[i] = crit(e);
      e[i] -= 2.0;
      const double qm = crit(e);
      g[i] = 0.5 * (qp[i] - qm);
      H(i, i) = qp[i] + qm - 2.0 * q0;
    }
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        Vector e = center;
        e[i] += 1.0;
        e[j] += 1.0;
        H(i, j) = H(j, i) = crit(e) - qp[i] - qp[j] + q0;
      }
    Eigen::SelfAdjointEigenSolver<Matrix> es(H);
    const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
    const double zero = 1e-12 * scale;
    const bool negative_definite = (es.eigenvalues().array() < -zero).all();
    if (!U.is_box()) {
      Vector d = Vector::Zero(m);
      for (int k = 0; k < m; ++k) {
        const double lambda = es.eigenvalues()[k];
        const Vector vk = es.eigenvectors().col(k);
        const double proj = vk.dot(g);
        if (lambda < -zero) {
          d -= (proj / lambda) * vk;
        } else if (lambda > zero || std::fabs(proj) > 1e-10 * (1.0 + inf_norm(g)) * scale) {
          throw UnboundedCriterion("maximality criterion is not bounded above on U");
        }
      }
      return center + d;
    }
    if (negative_definite && m == 1) return U.project(center + Vector::Constant(1, -g[0] / H(0, 0)));
    if (negative_definite) {
      auto model = [&](const Vector& u) {
        const Vector d = u - center;
        return q0 + g.dot(d) + 0.5 * d.dot(H * d);
      };
      return projected_ascent(model, U, center - H.ldlt().solve(g));
    }
  }

  if (m == 1) return argmax_scalar(crit, U, center);

  std::vector<Vector> starts{center};
  std::mt19937_64 rng(0x5eedULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int k = 0; k < 7; ++k) {
    Vector s(m);
    for (int i = 0; i < m; ++i) {
      if (U.is_box()) {
        std::uniform_real_distribution<double> unif(U.lower()[i], U.upper()[i]);
        s[i] = unif(rng);
      } else {
        s[i] = center[i] + (1.0 + inf_norm(center)) * normal(rng);
      }
    }
    starts.push_back(s);
  }
  Vector best;
  double best_f = -std::numeric_limits<double>::infinity();
  for (const Vector& s : starts) {
    Vector u = projected_ascent(crit, U, s);
    const double fu = crit(u);
    if (fu > best_f) {
      best = u;
      best_f = fu;
    }
  }
  return best;
}

Vector argmax_control_state_linear(const StateLinearProblem& p, const CandidateSolution& cand,
                                   const AdjointTrajectory& eta, const Rational& t,
                                   std::optional<Side> limit) {
  const LinearContext ctx(p, cand);
  auto crit = [&](const Vector& u) { return ctx.criterion(eta, t, u, limit); };
  return argmax_criterion(crit, p.controls, p.control_quadratic,
                          ctx.control.eval(t, limit.value_or(Side::right)));
}

CheckResult check_maximality(const StateLinearProblem& p, const CandidateSolution& cand,
                             const AdjointTrajectory& eta, const MaximalityOptions& opt) {
  CheckResult out;
  out.name = "maximality";
  const LinearContext ctx(p, cand);
  const auto samples = lattice_samples(p.lattice(), opt.grid_points_per_cell);

  auto gap_at = [&](std::size_t k) -> double {
    const Rational& t = samples[k];
    const Vector uc = ctx.control.eval(t);
    auto crit = [&](const Vector& u) { return ctx.criterion(eta, t, u); };
    const double c0 = crit(uc);
    double gap;
    try {
      gap = crit(argmax_criterion(crit, p.controls, p.control_quadratic, uc)) - c0;
    } catch (const UnboundedCriterion&) {
      return std::numeric_limits<double>::infinity();
    }
    std::mt19937_64 rng(mix_seed(opt.seed, k));
    std::normal_distribution<double> normal(0.0, 1.0);
    const double base = 1.0 + inf_norm(uc);
    for (int j = 0; j < opt.probes; ++j) {
      Vector u(p.m);
      for (int i = 0; i < p.m; ++i) {
        if (p.controls.is_box()) {
          std::uniform_real_distribution<double> unif(p.controls.lower()[i], p.controls.upper()[i]);
          u[i] = unif(rng);
        } else {
          u[i] = uc[i] + (j % 2 == 0 ? 1e-2 : 1.0) * base * normal(rng);
        }
      }
      gap = std::max(gap, crit(u) - c0);
    }
    return gap;
  };

  const WorstSample w = worst_sample(samples.size(), gap_at, opt.execution);
  out.worst_residual = std::max(0.0, w.value);
  out.time = samples[w.index].to_double();
  out.point = to_std(ctx.control.eval(samples[w.index]));
  out.pass = w.value <= opt.tol;
  if (std::isinf(w.value)) out.detail = "criterion unbounded above on U";
  return out;
}

CheckResult check_convexity_f0x(const StateLinearProblem& p, const CandidateSolution& cand,
                                const ConvexitySpec& spec) {
  CheckResult out;
  out.name = "convexity";
  const int n = p.n;
  const auto samples = lattice_samples(p.lattice(), spec.grid_points_per_cell);
  std::vector<Vector> points(samples.size());
  std::vector<double> times(samples.size());
  Vector lo = Vector::Constant(2 * n, std::numeric_limits<double>::infinity());
  Vector hi = -lo;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const Vector x = cand.state.eval(samples[k]), y = cand.state.eval(samples[k] - p.r);
    Vector z(2 * n);
    z << x, y;
    lo = lo.cwiseMin(z);
    hi = hi.cwiseMax(z);
    points[k] = z;
    times[k] = samples[k].to_double();
  }
  lo.array() -= spec.half_width;
  hi.array() += spec.half_width;
  auto f = [&](double t, const Vector& z) { return p.state_cost(t, z.head(n), z.tail(n)); };

  struct Pair {
    double t;
    Vector p, q;
  };
  auto make_pair = [&](std::size_t k) {
    std::mt19937_64 rng(mix_seed(spec.seed, k));
    std::uniform_int_distribution<std::size_t> pick(0, samples.size() - 1);
    Pair pr{times[pick(rng)], Vector(2 * n), Vector(2 * n)};
    for (int i = 0; i < 2 * n; ++i) {
      std::uniform_real_distribution<double> unif(lo[i], hi[i]);
      pr.p[i] = unif(rng);
      pr.q[i] = unif(rng);
    }
    return pr;
  };
  const WorstSample mid = worst_sample(
      static_cast<std::size_t>(spec.pairs),
      [&](std::size_t k) {
        const Pair pr = make_pair(k);
        return f(pr.t, 0.5 * (pr.p + pr.q)) - 0.5 * (f(pr.t, pr.p) + f(pr.t, pr.q));
      },
      spec.execution);

  const WorstSample hess = worst_sample(
      samples.size(),
      [&](std::size_t k) {
        const Matrix H =
            fd_hessian([&](const Vector& z) { return f(times[k], z); }, points[k]);
        const double lambda = Eigen::SelfAdjointEigenSolver<Matrix>(H).eigenvalues().minCoeff();
        // Second differences lose about eps |f| / step^2 to rounding.
        const double allowed = std::max(spec.tol, 1e-6 * (1.0 + std::fabs(f(times[k], points[k]))));
        return -lambda - allowed;
      },
      spec.execution);

  const double mid_v = mid.found ? mid.value : 0.0;
  const double hess_v = hess.found ? hess.value : -1.0;
  out.pass = mid_v <= spec.tol && hess_v <= 0.0;
  if (mid_v > spec.tol || hess_v <= 0.0) {
    const Pair pr = make_pair(mid.index);
    out.worst_residual = std::max(0.0, mid_v);
    out.time = pr.t;
    out.point = to_std(pr.p);
    const auto q = to_std(pr.q);
    out.point.insert(out.point.end(), q.begin(), q.end());
    out.detail = "midpoint pair (p, q)";
  } else {
    out.worst_residual = std::max(0.0, hess_v);
    out.time = times[hess.index];
    out.point = to_std(points[hess.index]);
    out.detail = "negative Hessian eigenvalue";
  }
  return out;
}

CheckResult check_transversality(const AdjointTrajectory& eta, double tol) {
  CheckResult out;
  out.name = "transversality";
  const Vector eb = eta.eta.eval(eta.eta.end(), Side::left);
  out.worst_residual = inf_norm(eb);
  out.time = eta.eta.end().to_double();
  out.pass = out.worst_residual <= tol;
  return out;
}

CheckResult check_continuity(const StateLinearProblem& p, const CandidateSolution& cand,
                             int grid_points_per_cell, Execution execution) {
  CheckResult out;
  out.name = "continuity";
  const Trajectory control = with_control_history(cand.control, p.control_history);
  const auto samples = lattice_samples(p.lattice(), grid_points_per_cell);
  const double a = p.a.to_double(), b = p.b.to_double();

  auto jump_at = [&](std::size_t k) {
    const Rational& tr = samples[k];
    const double t = tr.to_double();
    const Vector x = cand.state.eval(tr), y = cand.state.eval(tr - p.r);
    const Vector u = control.eval(tr), v = control.eval(tr - p.s);
    auto bundle = [&](double tau) {
      const Matrix A = p.A(tau), AD = p.A_D(tau);
      const Vector gu = p.g(tau, u), gv = p.g_D(tau, v);
      auto [gx, gy] = p.state_cost_grad(tau, x, y);
      std::vector<double> out(A.data(), A.data() + A.size());
      out.insert(out.end(), AD.data(), AD.data() + AD.size());
      out.insert(out.end(), gu.data(), gu.data() + gu.size());
      out.insert(out.end(), gv.data(), gv.data() + gv.size());
      out.insert(out.end(), gx.data(), gx.data() + gx.size());
      out.insert(out.end(), gy.data(), gy.data() + gy.size());
      out.push_back(p.state_cost(tau, x, y));
      out.push_back(p.control_cost(tau, u, v));
      return out;
    };
    const double delta = 1e-7 * (1.0 + std::fabs(t));
    const auto b0 = bundle(t);
    double scale = 1.0, jump = 0.0;
    for (double v : b0) {
      if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
      scale = std::max(scale, std::fabs(v));
    }
    for (double tau : {t - delta, t + delta}) {
      if (tau < a || tau > b) continue;
      const auto b1 = bundle(tau);
      for (std::size_t i = 0; i < b0.size(); ++i) {
        if (!std::isfinite(b1[i])) return std::numeric_limits<double>::infinity();
        jump = std::max(jump, std::fabs(b1[i] - b0[i]));
      }
    }
    return jump / scale;
  };
  const WorstSample w = worst_sample(samples.size(), jump_at, execution);
  out.worst_residual = w.value;
  out.time = samples[w.index].to_double();
  out.pass = w.value <= 1e-4;
  out.detail = "relative change over 1e-7 time offsets";
  return out;
}

CheckResult check_admissibility(const StateLinearProblem& p, const CandidateSolution& cand,
                                const IntegratorConfig& integrator, int grid_points_per_cell,
                                double tol) {
  CheckResult out;
  out.name = "admissibility";
  const auto samples = lattice_samples(p.lattice(), grid_points_per_cell);
  for (const Rational& t : samples) {
    const Vector u = cand.control.eval(t);
    if (!p.controls.contains(u, 1e-12)) {
      out.pass = false;
      out.worst_residual = std::numeric_limits<double>::infinity();
      out.time = t.to_double();
      out.point = to_std(u);
      out.detail = "control outside U";
      return out;
    }
  }
  const Trajectory x = integrate_forward(p, cand.control, integrator);
  double worst = 0.0;
  for (const Rational& t : samples) {
    const double d = inf_norm(cand.state.eval(t) - x.eval(t));
    if (!(d <= worst)) {
      worst = d;
      out.time = t.to_double();
    }
  }
  out.worst_residual = worst;
  out.pass = worst <= tol;
  out.detail = "state vs integrated response";
  return out;
}

CheckResult check_adjoint_equation(const StateLinearProblem& p, const CandidateSolution& cand,
                                   const AdjointTrajectory& eta, int grid_points_per_cell,
                                   double tol) {
  CheckResult out;
  out.name = "adjoint_equation";
  const auto lat = p.lattice();
  const double h = lat.h().to_double();
  const double r = p.r.to_double();
  const Rational b_minus_r = p.b - p.r;
  const double delta = 1e-5 * h;
  double worst = 0.0;

  for (std::int64_t i = 0; i < lat.cells(); ++i) {
    const double t0 = lat.breakpoint(i).to_double();
    for (int j = 1; j < grid_points_per_cell; ++j) {
      const double t = t0 + h * j / grid_points_per_cell;
      const Vector z = eta(t);
      const Vector deriv = (eta(t + delta) - eta(t - delta)) / (2.0 * delta);
      const Vector xt = cand.state.eval(t);
      auto [gx, gy] = p.state_cost_grad(t, xt, cand.state.eval(t - r));
      Vector rhs = gx - p.A(t).transpose() * z;
      if (lat.breakpoint(i) < b_minus_r) {
        auto [ax, ay] = p.state_cost_grad(t + r, cand.state.eval(t + r), xt);
        rhs += ay - p.A_D(t + r).transpose() * eta(t + r);
      }
      const double d = inf_norm(deriv - rhs) / (1.0 + inf_norm(rhs));
      if (!(d <= worst)) {
        worst = d;
        out.time = t;
      }
    }
  }
  for (std::int64_t i = 1; i < lat.cells(); ++i) {
    const Rational t = lat.breakpoint(i);
    const double d = inf_norm(eta.eta.eval(t, Side::left) - eta.eta.eval(t, Side::right));
    if (!(d <= worst)) {
      worst = d;
      out.time = t.to_double();
    }
  }
  out.worst_residual = worst;
  out.pass = worst <= tol;
  out.detail = "supplied adjoint: ODE residual and continuity";
  return out;
}

Certificate verify_state_linear(const StateLinearProblem& p, const CandidateSolution& cand,
                                const LinearVerifyConfig& cfg,
                                std::optional<AdjointTrajectory> adjoint) {
  Certificate cert;
  cert.subject = p.name.empty() ? "state-linear problem" : p.name;
  cert.seed = cfg.seed;
  cert.tolerances = {{"residual", cfg.tol},
                     {"admissibility", cfg.admissibility_tol},
                     {"convexity", cfg.convexity.tol},
                     {"convexity_half_width", cfg.convexity.half_width},
                     {"convexity_pairs", static_cast<double>(cfg.convexity.pairs)},
                     {"maximality_probes", static_cast<double>(cfg.probes)},
                     {"grid_points_per_cell", static_cast<double>(cfg.grid_points_per_cell)}};

  auto guarded = [&](const char* name, auto&& run) {
    try {
      cert.checks.push_back(run());
    } catch (const std::exception& e) {
      CheckResult failed;
      failed.name = name;
      failed.worst_residual = std::numeric_limits<double>::infinity();
      failed.detail = e.what();
      cert.checks.push_back(failed);
    }
  };

  guarded("continuity",
          [&] { return check_continuity(p, cand, cfg.grid_points_per_cell, cfg.execution); });
  guarded("admissibility", [&] {
    return check_admissibility(p, cand, cfg.integrator, cfg.grid_points_per_cell,
                               cfg.admissibility_tol);
  });
  guarded("convexity", [&] {
    ConvexitySpec spec = cfg.convexity;
    spec.seed = cfg.seed;
    spec.execution = cfg.execution;
    return check_convexity_f0x(p, cand, spec);
  });

  std::optional<AdjointTrajectory> eta = adjoint;
  std::string adjoint_error;
  if (eta) {
    guarded("adjoint_equation", [&] {
      return check_adjoint_equation(p, cand, *eta, cfg.grid_points_per_cell, cfg.tol);
    });
  } else {
    try {
      eta = integrate_adjoint_linear(p, cand, cfg.integrator);
    } catch (const std::exception& e) {
      adjoint_error = e.what();
    }
  }
  guarded("transversality", [&] {
    if (!eta) throw Error("adjoint unavailable: " + adjoint_error);
    return check_transversality(*eta, cfg.tol);
  });
  guarded("maximality", [&] {
    if (!eta) throw Error("adjoint unavailable: " + adjoint_error);
    MaximalityOptions opt;
    opt.grid_points_per_cell = cfg.grid_points_per_cell;
    opt.tol = cfg.tol;
    opt.probes = cfg.probes;
    opt.seed = cfg.seed;
    opt.execution = cfg.execution;
    return check_maximality(p, cand, *eta, opt);
  });

  try {
    cert.cost = evaluate_cost(p, cand, cfg.quadrature);
  } catch (const std::exception&) {
  }
  return cert;
}

}  // namespace retard_oc
