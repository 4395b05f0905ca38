#pragma once

#include <vector>

#include "retard_oc/curve.hpp"
#include "retard_oc/lattice.hpp"
#include "retard_oc/rational.hpp"

namespace retard_oc {

struct Segment {
  Rational start;
  Rational end;
  CurvePtr curve;
};

/// Piecewise curve over [history_start, end] with the history segments
/// (initial functions) prepended to the main part that starts at
/// main_start.
///
/// Segments tile the domain with half-open intervals [t_i, t_{i+1}); the
/// last one is closed at `end`. Evaluation at a breakpoint returns the
/// right segment's value unless Side::left is requested.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(int dimension, Rational main_start, std::vector<Segment> segments);

  int dimension() const { return dim_; }
  const Rational& history_start() const { return segments_.front().start; }
  const Rational& main_start() const { return main_start_; }
  const Rational& end() const { return segments_.back().end; }
  const std::vector<Segment>& segments() const { return segments_; }
  bool empty() const { return segments_.empty(); }

  bool covers(double t) const;
  bool covers(const Rational& t) const {
    return !segments_.empty() && !(t < history_start()) && !(end() < t);
  }

  /// Throws OutOfDomain outside [history_start, end].
  Vector eval(double t, Side side = Side::right) const;
  Vector eval(const Rational& t, Side side = Side::right) const;

  /// Index into segments() of the owner of t.
  std::size_t segment_index(double t, Side side = Side::right) const;

  /// Segments [from, end] joined behind `history`'s segments. The
  /// history must end exactly where this trajectory's main part starts.
  Trajectory with_history(const Trajectory& history) const;

  /// Only the main part, history dropped.
  Trajectory main_part() const;

  static Trajectory constant(const Rational& start, const Rational& end, const Vector& value);
  static Trajectory function(int dimension, const Rational& start, const Rational& end,
                             std::function<Vector(double)> f);

 private:
  int dim_ = 0;
  Rational main_start_;
  std::vector<Segment> segments_;
  std::vector<double> starts_;  // segment starts as doubles, for lookup
};

/// Value of traj at t - tau, crossing into the history transparently.
Vector eval_delayed(const Trajectory& traj, double t, const Rational& tau,
                    Side side = Side::right);

}  // namespace retard_oc
