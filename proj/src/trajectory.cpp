#include "retard_oc/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "retard_oc/errors.hpp"

namespace retard_oc {

Trajectory::Trajectory(int dimension, Rational main_start, std::vector<Segment> segments)
    : dim_(dimension), main_start_(std::move(main_start)), segments_(std::move(segments)) {
  if (segments_.empty()) throw std::invalid_argument("trajectory needs at least one segment");
  bool main_start_is_boundary = false;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const Segment& seg = segments_[i];
    if (!seg.curve) throw std::invalid_argument("trajectory segment without curve");
    if (seg.curve->dimension() != dim_)
      throw std::invalid_argument("trajectory segment dimension mismatch");
    if (!(seg.start < seg.end)) throw std::invalid_argument("empty trajectory segment");
    if (i > 0 && segments_[i - 1].end != seg.start)
      throw std::invalid_argument("trajectory segments do not tile their domain");
    if (seg.start == main_start_) main_start_is_boundary = true;
    starts_.push_back(seg.start.to_double());
  }
  if (!main_start_is_boundary)
    throw std::invalid_argument("main start must coincide with a segment boundary");
}

bool Trajectory::covers(double t) const {
  if (segments_.empty()) return false;
  const double lo = history_start().to_double(), hi = end().to_double();
  return t >= lo - breakpoint_tolerance(lo) && t <= hi + breakpoint_tolerance(hi);
}

std::size_t Trajectory::segment_index(double t, Side side) const {
  if (segments_.empty()) throw OutOfDomain("evaluation of an empty trajectory");
  if (!covers(t)) {
    std::ostringstream msg;
    msg << "time " << t << " outside trajectory domain [" << history_start() << ", " << end()
        << "]";
    throw OutOfDomain(msg.str());
  }
  auto it = std::upper_bound(starts_.begin(), starts_.end(), t);
  std::size_t k = it == starts_.begin() ? 0 : static_cast<std::size_t>(it - starts_.begin()) - 1;
  // Snap onto nearby breakpoints so that rounding never decides ownership.
  if (k + 1 < starts_.size() && starts_[k + 1] - t <= breakpoint_tolerance(t)) ++k;
  if (std::fabs(t - starts_[k]) <= breakpoint_tolerance(t)) {
    if (side == Side::left && k > 0) --k;
  }
  return k;
}

Vector Trajectory::eval(double t, Side side) const {
  const Segment& seg = segments_[segment_index(t, side)];
  const double lo = seg.start.to_double(), hi = seg.end.to_double();
  return seg.curve->value(std::clamp(t, lo, hi));
}

Vector Trajectory::eval(const Rational& t, Side side) const {
  if (segments_.empty()) throw OutOfDomain("evaluation of an empty trajectory");
  if (!covers(t)) {
    std::ostringstream msg;
    msg << "time " << t << " outside trajectory domain [" << history_start() << ", " << end()
        << "]";
    throw OutOfDomain(msg.str());
  }
  for (std::size_t k = 0; k < segments_.size(); ++k) {
    const Segment& seg = segments_[k];
    bool owns = (seg.start <= t && t < seg.end) || (k + 1 == segments_.size() && t == seg.end);
    if (!owns) continue;
    if (side == Side::left && t == seg.start && k > 0) {
      return segments_[k - 1].curve->value(t.to_double());
    }
    return seg.curve->value(t.to_double());
  }
  throw OutOfDomain("time " + t.str() + " not owned by any segment");
}

Trajectory Trajectory::with_history(const Trajectory& history) const {
  if (history.dimension() != dim_) throw std::invalid_argument("history dimension mismatch");
  if (history.end() != history_start())
    throw std::invalid_argument("history does not end where the trajectory starts");
  std::vector<Segment> segs = history.segments_;
  segs.insert(segs.end(), segments_.begin(), segments_.end());
  return Trajectory(dim_, main_start_, std::move(segs));
}

Trajectory Trajectory::main_part() const {
  std::vector<Segment> segs;
  for (const Segment& seg : segments_)
    if (!(seg.start < main_start_)) segs.push_back(seg);
  return Trajectory(dim_, main_start_, std::move(segs));
}

Trajectory Trajectory::constant(const Rational& start, const Rational& end, const Vector& value) {
  return Trajectory(static_cast<int>(value.size()), start,
                    {Segment{start, end, std::make_shared<ConstantCurve>(value)}});
}

Trajectory Trajectory::function(int dimension, const Rational& start, const Rational& end,
                                std::function<Vector(double)> f) {
  return Trajectory(dimension, start,
                    {Segment{start, end, std::make_shared<FunctionCurve>(dimension, std::move(f))}});
}

Vector eval_delayed(const Trajectory& traj, double t, const Rational& tau, Side side) {
  return traj.eval(t - tau.to_double(), side);
}

}  // namespace retard_oc
