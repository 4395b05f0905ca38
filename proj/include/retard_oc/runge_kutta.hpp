#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "retard_oc/curve.hpp"
#include "retard_oc/lattice.hpp"

namespace retard_oc {

enum class Scheme { rk4, rk6 };

/// Explicit Butcher tableau; a is strictly lower triangular, row-major.
struct Tableau {
  std::vector<double> c;
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  int order = 0;

  std::size_t stages() const { return c.size(); }
};

inline const Tableau& classical_rk4() {
  static const Tableau t{{0.0, 0.5, 0.5, 1.0},
                         {{}, {0.5}, {0.0, 0.5}, {0.0, 0.0, 1.0}},
                         {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0},
                         4};
  return t;
}

// Butcher's seven-stage sixth-order method.
inline const Tableau& butcher_rk6() {
  static const Tableau t{
      {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0, 0.5, 0.5, 1.0},
      {{},
       {1.0 / 3.0},
       {0.0, 2.0 / 3.0},
       {1.0 / 12.0, 1.0 / 3.0, -1.0 / 12.0},
       {-1.0 / 16.0, 9.0 / 8.0, -3.0 / 16.0, -3.0 / 8.0},
       {0.0, 9.0 / 8.0, -3.0 / 8.0, -3.0 / 4.0, 0.5},
       {9.0 / 44.0, -9.0 / 11.0, 63.0 / 44.0, 18.0 / 11.0, 0.0, -16.0 / 11.0}},
      {11.0 / 120.0, 0.0, 27.0 / 40.0, 27.0 / 40.0, -4.0 / 15.0, -4.0 / 15.0, 11.0 / 120.0},
      6};
  return t;
}

inline const Tableau& tableau_for(Scheme scheme) {
  return scheme == Scheme::rk4 ? classical_rk4() : butcher_rk6();
}

using StageRhs = std::function<Vector(double, const Vector&, Side)>;

/// Fixed-step integration from t_from to t_to (backward when t_to < t_from),
/// updating z in place. Stages at the right end of the interval are
/// evaluated with Side::left. Returns the node curve, Hermite when `dense`.
std::shared_ptr<const NodalCurve> integrate_interval(const Tableau& tab, double t_from,
                                                     double t_to, int steps, Vector& z,
                                                     const StageRhs& rhs, bool dense);

}  // namespace retard_oc
