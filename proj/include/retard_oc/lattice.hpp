#pragma once

#include <cstdint>
#include <vector>

#include "retard_oc/rational.hpp"

namespace retard_oc {

/// Which one-sided limit to take when a time coincides with a breakpoint.
/// The right segment owns a breakpoint by default; `left` picks the limit
/// from the preceding segment (used at the right end of a cell).
enum class Side { right, left };

/// Exact time grid shared by both delays and the horizon.
///
/// h is the greatest common divisor of the nonzero members of {r, s, b-a},
/// so every delay is a whole number of cells and delayed arguments of a
/// lattice point are lattice points.
class CommensurabilityLattice {
 public:
  const Rational& a() const { return a_; }
  const Rational& b() const { return b_; }
  const Rational& r() const { return r_; }
  const Rational& s() const { return s_; }
  const Rational& h() const { return h_; }
  std::int64_t cells() const { return n_; }

  /// r / h and s / h, exact.
  std::int64_t state_shift() const { return state_shift_; }
  std::int64_t control_shift() const { return control_shift_; }

  /// a + i*h for i in [0, N]; may be called with negative i for history cells.
  Rational breakpoint(std::int64_t i) const { return a_ + Rational(i) * h_; }
  std::vector<Rational> breakpoints() const;

  /// Index of the cell that owns `t` under the half-open convention
  /// (the last cell owns b). Negative indices are history cells.
  std::int64_t cell_of(const Rational& t) const;

  /// Floating-point version. Times within a few ulps of a breakpoint are
  /// snapped onto it and resolved with `side`.
  std::int64_t cell_of(double t, Side side = Side::right) const;

  bool is_breakpoint(const Rational& t) const;

  friend CommensurabilityLattice make_lattice(const Rational& a, const Rational& b,
                                              const Rational& r, const Rational& s);

 private:
  Rational a_, b_, r_, s_, h_;
  std::int64_t n_ = 0;
  std::int64_t state_shift_ = 0;
  std::int64_t control_shift_ = 0;
};

/// Throws RejectsZeroDelays when r = s = 0, std::invalid_argument when
/// a >= b or a delay is negative.
CommensurabilityLattice make_lattice(const Rational& a, const Rational& b, const Rational& r,
                                     const Rational& s);

/// Convenience overload for floating-point input. Each value must have an
/// exact small-denominator rational form, else RejectsIncommensurable.
CommensurabilityLattice make_lattice(double a, double b, double r, double s);

/// Snap tolerance used when floating-point times are compared to breakpoints.
double breakpoint_tolerance(double t);

}  // namespace retard_oc
