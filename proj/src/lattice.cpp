#include "retard_oc/lattice.hpp"

#include <cmath>
#include <stdexcept>

#include "retard_oc/errors.hpp"

namespace retard_oc {

double breakpoint_tolerance(double t) { return 1e-12 * std::max(1.0, std::fabs(t)); }

CommensurabilityLattice make_lattice(const Rational& a, const Rational& b, const Rational& r,
                                     const Rational& s) {
  if (!(a < b)) throw std::invalid_argument("lattice requires a < b");
  if (r.sign() < 0 || s.sign() < 0) throw std::invalid_argument("delays must be non-negative");
  if (r.is_zero() && s.is_zero()) throw RejectsZeroDelays();

  CommensurabilityLattice lat;
  lat.a_ = a;
  lat.b_ = b;
  lat.r_ = r;
  lat.s_ = s;
  lat.h_ = gcd(gcd(r, s), b - a);
  Rational n = (b - a) / lat.h_;
  Rational rs = r / lat.h_;
  Rational ss = s / lat.h_;
  if (!n.is_integer() || !rs.is_integer() || !ss.is_integer())
    throw std::logic_error("lattice gcd does not divide its inputs");
  lat.n_ = n.num();
  lat.state_shift_ = rs.num();
  lat.control_shift_ = ss.num();
  return lat;
}

CommensurabilityLattice make_lattice(double a, double b, double r, double s) {
  return make_lattice(Rational::from_double(a), Rational::from_double(b), Rational::from_double(r),
                      Rational::from_double(s));
}

std::vector<Rational> CommensurabilityLattice::breakpoints() const {
  std::vector<Rational> out;
  out.reserve(static_cast<std::size_t>(n_ + 1));
  for (std::int64_t i = 0; i <= n_; ++i) out.push_back(breakpoint(i));
  return out;
}

std::int64_t CommensurabilityLattice::cell_of(const Rational& t) const {
  if (t == b_) return n_ - 1;
  return ((t - a_) / h_).floor();
}

std::int64_t CommensurabilityLattice::cell_of(double t, Side side) const {
  const double hd = h_.to_double();
  const double x = (t - a_.to_double()) / hd;
  const double nearest = std::round(x);
  if (std::fabs(x - nearest) * hd <= breakpoint_tolerance(t)) {
    auto k = static_cast<std::int64_t>(nearest);
    if (k == n_) return n_ - 1;
    return side == Side::left ? k - 1 : k;
  }
  return static_cast<std::int64_t>(std::floor(x));
}

bool CommensurabilityLattice::is_breakpoint(const Rational& t) const {
  return ((t - a_) / h_).is_integer();
}

}  // namespace retard_oc
