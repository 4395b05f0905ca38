#include <algorithm>
#include <cmath>
#include <limits>

#include "retard_oc/differentiation.hpp"
#include "retard_oc/errors.hpp"
#include "retard_oc/sufficiency.hpp"

namespace retard_oc {
namespace {

double inf_norm(const Vector& v) { return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0; }

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

CheckResult failed_check(const std::string& name, const std::string& why) {
  CheckResult c;
  c.name = name;
  c.worst_residual = std::numeric_limits<double>::infinity();
  c.detail = why;
  return c;
}

}  // namespace

ValueFunctionCandidate::ValueFunctionCandidate(std::vector<ValueFunctionPiece> pieces)
    : pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw std::invalid_argument("value function needs at least one piece");
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    if (!pieces_[i].S) throw std::invalid_argument("value function piece without S");
    if (!(pieces_[i].start < pieces_[i].end)) throw std::invalid_argument("empty value function piece");
    if (i > 0 && pieces_[i - 1].end != pieces_[i].start)
      throw std::invalid_argument("value function pieces do not tile their domain");
  }
}

ValueFunctionCandidate ValueFunctionCandidate::zero(const Rational& a, const Rational& b) {
  ValueFunctionPiece piece;
  piece.start = a;
  piece.end = b;
  piece.S = [](double, const Vector&) { return 0.0; };
  piece.dt = [](double, const Vector&) { return 0.0; };
  piece.dx = [](double, const Vector& x) { return Vector(Vector::Zero(x.size())); };
  return ValueFunctionCandidate({piece});
}

std::size_t ValueFunctionCandidate::piece_index(const Rational& t, Side side) const {
  if (t < pieces_.front().start || pieces_.back().end < t)
    throw OutOfDomain("time " + t.str() + " outside the value function's domain");
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    const auto& pc = pieces_[k];
    const bool owns = (pc.start <= t && t < pc.end) || (k + 1 == pieces_.size() && t == pc.end);
    if (!owns) continue;
    if (side == Side::left && t == pc.start && k > 0) return k - 1;
    return k;
  }
  return pieces_.size() - 1;
}

std::size_t ValueFunctionCandidate::piece_index(double t, Side side) const {
  const double lo = pieces_.front().start.to_double(), hi = pieces_.back().end.to_double();
  if (t < lo - breakpoint_tolerance(lo) || t > hi + breakpoint_tolerance(hi))
    throw OutOfDomain("time outside the value function's domain");
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    const double s = pieces_[k].start.to_double(), e = pieces_[k].end.to_double();
    const bool at_end = std::fabs(t - e) <= breakpoint_tolerance(t);
    const bool at_start = std::fabs(t - s) <= breakpoint_tolerance(t);
    if (at_start && side == Side::left && k > 0) return k - 1;
    if (at_start) return k;
    if (t > s && t < e && !at_end) return k;
    if (at_end && k + 1 == pieces_.size()) return k;
  }
  return pieces_.size() - 1;
}

double ValueFunctionCandidate::S(double t, const Vector& x, Side side) const {
  return pieces_[piece_index(t, side)].S(t, x);
}

double ValueFunctionCandidate::d1(double t, const Vector& x, Side side) const {
  const auto& pc = pieces_[piece_index(t, side)];
  if (pc.dt) return pc.dt(t, x);
  return fd_derivative([&](double tau) { return pc.S(tau, x); }, t);
}

Vector ValueFunctionCandidate::d2(double t, const Vector& x, Side side) const {
  const auto& pc = pieces_[piece_index(t, side)];
  if (pc.dx) return pc.dx(t, x);
  return fd_gradient([&](const Vector& z) { return pc.S(t, z); }, x);
}

double ValueFunctionCandidate::d1_fd(double t, const Vector& x, Side side) const {
  const auto& pc = pieces_[piece_index(t, side)];
  return fd_derivative([&](double tau) { return pc.S(tau, x); }, t);
}

Vector ValueFunctionCandidate::d2_fd(double t, const Vector& x, Side side) const {
  const auto& pc = pieces_[piece_index(t, side)];
  return fd_gradient([&](const Vector& z) { return pc.S(t, z); }, x);
}

double hj_residual(const DelayedProblem& p, const ValueFunctionCandidate& S,
                   const Feedback& feedback, const CommensurabilityLattice& lat,
                   const Rational& t, const Trajectory& state,
                   const std::optional<Vector>& x_at_t) {
  const double td = t.to_double();
  const Vector x = x_at_t ? *x_at_t : state.eval(t);
  const Vector y = state.eval(t - p.r);
  const Vector eta = S.d2(td, x);
  const Vector u = feedback(td, x, y, eta);

  Vector v;
  const Rational ts = t - p.s;
  if (p.s.is_zero()) {
    v = u;
  } else if (ts < p.a) {
    v = p.control_history.eval(ts);
  } else {
    const Vector xs = state.eval(ts);
    v = feedback(ts.to_double(), xs, state.eval(ts - p.r), S.d2(ts.to_double(), xs));
  }

  const int count = (lat.is_breakpoint(t) && p.a < t && t < p.b) ? 2 : 1;
  return S.d1(td, x) +
         count * (-p.running_cost(td, x, y, u, v) + eta.dot(p.dynamics(td, x, y, u, v)));
}

std::vector<Rational> hj_sample_times(const CommensurabilityLattice& lat, int samples) {
  const auto per_cell = static_cast<int>((samples + lat.cells() - 1) / lat.cells());
  return lattice_samples(lat, std::max(per_cell, 1));
}

Certificate verify_nonlinear_hj(const DelayedProblem& p, const CandidateSolution& cand,
                                const ValueFunctionCandidate& S, const Feedback& feedback,
                                const HJConfig& cfg) {
  Certificate cert;
  cert.subject = p.name.empty() ? "delayed problem" : p.name;
  cert.tolerances = {{"residual", cfg.tol},
                     {"samples", static_cast<double>(cfg.samples)},
                     {"quadrature_steps_per_cell", static_cast<double>(cfg.quadrature.steps_per_cell)}};

  const auto lat = p.lattice();
  const auto times = hj_sample_times(lat, cfg.samples);
  std::vector<std::size_t> interior, breaks;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const Rational& t = times[k];
    (lat.is_breakpoint(t) && p.a < t && t < p.b ? breaks : interior).push_back(k);
  }
  const Trajectory control = with_control_history(cand.control, p.control_history);

  auto guarded = [&](std::vector<CheckResult>& into, const char* name, auto&& run) {
    try {
      into.push_back(run());
    } catch (const std::exception& e) {
      into.push_back(failed_check(name, e.what()));
    }
  };

  // (1) terminal condition
  guarded(cert.checks, "terminal", [&] {
    CheckResult c;
    c.name = "terminal";
    const double b = p.b.to_double();
    const Vector xb = cand.state.eval(p.b, Side::left);
    c.worst_residual = std::fabs(S.S(b, xb, Side::left) + p.g0(xb));
    c.time = b;
    c.point = to_std(xb);
    c.pass = c.worst_residual <= cfg.tol;
    if (!p.terminal.contains(xb, cfg.tol)) {
      c.pass = false;
      c.detail = "x(b) outside the terminal set";
    }
    return c;
  });

  // (2) HJ equation along the candidate
  guarded(cert.checks, "hj_residual", [&] {
    CheckResult c;
    c.name = "hj_residual";
    const WorstSample w = worst_sample(
        interior.size(),
        [&](std::size_t k) {
          return std::fabs(hj_residual(p, S, feedback, lat, times[interior[k]], cand.state));
        },
        cfg.execution);
    c.worst_residual = w.value;
    c.time = times[interior[w.index]].to_double();
    c.pass = w.value <= cfg.tol;
    c.detail = std::to_string(interior.size()) + " samples off interior breakpoints";
    return c;
  });

  // (3) the feedback law reproduces the candidate control
  guarded(cert.checks, "feedback", [&] {
    CheckResult c;
    c.name = "feedback";
    const WorstSample w = worst_sample(
        times.size(),
        [&](std::size_t k) {
          const Rational& t = times[k];
          const double td = t.to_double();
          const Vector x = cand.state.eval(t);
          const Vector u = feedback(td, x, cand.state.eval(t - p.r), S.d2(td, x));
          return inf_norm(u - control.eval(t));
        },
        cfg.execution);
    c.worst_residual = w.value;
    c.time = times[w.index].to_double();
    c.point = to_std(control.eval(times[w.index]));
    c.pass = w.value <= cfg.tol;
    return c;
  });

  // (4) smoothness of S across interior breakpoints, mixed partials inside cells
  guarded(cert.checks, "smoothness", [&] {
    CheckResult c;
    c.name = "smoothness";
    double jump = 0.0;
    for (std::int64_t i = 1; i < lat.cells(); ++i) {
      const Rational tb = lat.breakpoint(i);
      const double td = tb.to_double();
      const Vector xc = cand.state.eval(tb);
      for (double off : {0.0, -1.0, 1.0}) {
        const Vector x = (xc.array() + off).matrix();
        const double dv = std::fabs(S.S(td, x, Side::left) - S.S(td, x, Side::right));
        const double dg = inf_norm(S.d2(td, x, Side::left) - S.d2(td, x, Side::right));
        if (!c.time || std::max(dv, dg) > jump) {
          jump = std::max(dv, dg);
          c.time = td;
          c.point = to_std(x);
        }
      }
    }
    double mixed = 0.0;
    const double h = lat.h().to_double();
    for (std::int64_t i = 0; i < lat.cells(); ++i)
      for (double frac : {0.25, 0.5, 0.75}) {
        const double t = lat.breakpoint(i).to_double() + frac * h;
        const Vector x = cand.state.eval(t);
        const Vector d_t_d2 =
            (S.d2(t + 1e-5 * h, x) - S.d2(t - 1e-5 * h, x)) / (2e-5 * h);
        const Vector d_x_d1 = fd_gradient([&](const Vector& z) { return S.d1(t, z); }, x);
        mixed = std::max(mixed, inf_norm(d_t_d2 - d_x_d1) / (1.0 + inf_norm(d_x_d1)));
      }
    c.worst_residual = std::max(jump, mixed);
    c.pass = jump <= cfg.tol && mixed <= 1e-4;
    c.detail = "breakpoint jump " + std::to_string(jump) + ", mixed-partial asymmetry " +
               std::to_string(mixed);
    return c;
  });

  // (5) minimal cost
  guarded(cert.checks, "cost", [&] {
    CheckResult c;
    c.name = "cost";
    const double a = p.a.to_double();
    const Vector xa = cand.state.eval(p.a);
    const double cost = evaluate_cost(p, cand, cfg.quadrature);
    cert.cost = cost;
    c.worst_residual = std::fabs(-S.S(a, xa) - cost);
    c.time = a;
    c.point = to_std(xa);
    c.pass = c.worst_residual <= cfg.tol;
    return c;
  });

  // Diagnostics: not part of the verdict.
  guarded(cert.diagnostics, "hj_breakpoints", [&] {
    CheckResult c;
    c.name = "hj_breakpoints";
    double worst = 0.0;
    for (std::size_t k : breaks) {
      const double r = std::fabs(hj_residual(p, S, feedback, lat, times[k], cand.state));
      if (r >= worst) {
        worst = r;
        c.time = times[k].to_double();
      }
    }
    c.worst_residual = worst;
    c.pass = worst <= cfg.tol;
    c.detail = "indicator sum is 2 at interior breakpoints";
    return c;
  });

  guarded(cert.diagnostics, "hj_tube", [&] {
    CheckResult c;
    c.name = "hj_tube";
    const std::size_t per = cfg.tube_offsets.size();
    if (per == 0) {
      c.pass = true;
      return c;
    }
    const WorstSample w = worst_sample(
        interior.size() * per,
        [&](std::size_t k) {
          const Rational& t = times[interior[k / per]];
          const Vector x = (cand.state.eval(t).array() + cfg.tube_offsets[k % per]).matrix();
          return std::fabs(hj_residual(p, S, feedback, lat, t, cand.state, x));
        },
        cfg.execution);
    c.worst_residual = w.value;
    const Rational& t = times[interior[w.index / per]];
    c.time = t.to_double();
    c.point = to_std((cand.state.eval(t).array() + cfg.tube_offsets[w.index % per]).matrix());
    c.pass = w.value <= cfg.tol;
    c.detail = "x(t) offset, x(t-r) kept on the candidate";
    return c;
  });

  guarded(cert.diagnostics, "feedback_c1", [&] {
    CheckResult c;
    c.name = "feedback_c1";
    double worst = 0.0;
    for (std::size_t k : interior) {
      if (k % 16 != 0) continue;
      const double t = times[k].to_double();
      const Vector x = cand.state.eval(times[k]);
      const Vector y = cand.state.eval(times[k] - p.r);
      const Vector eta = S.d2(t, x);
      const int n = p.n;
      Vector z(3 * n);
      z << x, y, eta;
      const Matrix J = fd_jacobian(
          [&](const Vector& w) { return feedback(t, w.head(n), w.segment(n, n), w.tail(n)); }, z);
      worst = std::max(worst, J.cwiseAbs().maxCoeff());
    }
    c.worst_residual = worst;
    c.pass = std::isfinite(worst);
    c.detail = "largest finite-difference partial of the feedback in (x, y, eta)";
    return c;
  });

  return cert;
}

}  // namespace retard_oc
