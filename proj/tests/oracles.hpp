#pragma once

// Closed forms written out independently of the library's registry, plus
// constants frozen from a 40-digit mpmath evaluation.

#include <cmath>

namespace oracle {

inline const double e = std::exp(1.0);
inline const double e2 = std::exp(2.0);
inline const double e4 = std::exp(4.0);
inline const double e6 = std::exp(6.0);

// (23 + e^2 + 34 e^4 - 2 e^6) / 16
constexpr double kLinearCost = 67.49178564002278335;
constexpr double kLinearCostPaperDecimal = 67.491786;

// Quadrature of x*^2 + u*^2 over [0, 3], equal to -S(0, 1).
constexpr double kGoellmannCost = 2.761594155955764888;

// H^1 at t = 0, x = y = 1, u = v = 0 with eta(0) = e^2 (-e^2 - 1).
constexpr double kLinearHamiltonianAtZero = -124.97441226414977861;

inline double linear_x(double t) {
  if (t <= 0.0) return 1.0;
  if (t <= 1.0) return -1.0 + 2.0 * std::exp(t);
  if (t <= 2.0)
    return ((e2 + 2.0 * e4 - 2.0 * e2 * t) * std::exp(-t) - 8.0 + (17.0 - 2.0 * e2) * std::exp(t)) /
           8.0;
  if (t <= 3.0)
    return (2.0 * std::exp(4.0 - t) + 4.0 +
            (-47.0 / e2 + 17.0 - 2.0 * e2 + 16.0 / e2 * t) * std::exp(t)) /
           8.0;
  return ((-e6 + e4 * t) * std::exp(-t) + 4.0 +
          (-51.0 / e2 + 24.0 - 2.0 * e2 + 17.0 / e2 * t - 2.0 * t) * std::exp(t)) /
         8.0;
}

inline double linear_eta(double t) {
  return t <= 2.0 ? std::exp(2.0 - t) * (t - e2 - 1.0) : 1.0 - std::exp(4.0 - t);
}

// u(t) = -eta(t + 1) / 20 on [0, 3], zero on ]3, 4].
inline double linear_u(double t) {
  if (t < 0.0 || t > 3.0) return 0.0;
  return -linear_eta(t + 1.0) / 20.0;
}

inline const double D = e2 + 1.0;

inline double goellmann_x(double t) {
  return t <= 2.0 ? 1.0 : (std::exp(t - 2.0) + std::exp(4.0 - t)) / D;
}

inline double goellmann_u(double t) {
  return (t >= 0.0 && t < 1.0) ? (std::exp(t) - std::exp(2.0 - t)) / D : 0.0;
}

// d/dx of the value function, piecewise on [0,1], [1,2], [2,3].
inline double goellmann_dSdx(double t) {
  const double D2 = D * D;
  if (t <= 1.0) return -2.0 * t + 5.0 + 2.0 * (e2 - 1.0) / D2;
  if (t <= 2.0)
    return -(4.0 * e2 / D2 + 2.0) * t + 4.0 * (e2 - 1.0) / D2 + 6.0 +
           (std::exp(2.0 * t - 2.0) - std::exp(6.0 - 2.0 * t)) / D2;
  return 2.0 * (std::exp(4.0 - t) - std::exp(t - 2.0)) / D;
}

}  // namespace oracle
