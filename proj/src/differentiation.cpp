#include "retard_oc/differentiation.hpp"

#include <cmath>
#include <limits>

#include "retard_oc/errors.hpp"

namespace retard_oc {
namespace {

const double kCbrtEps = std::cbrt(std::numeric_limits<double>::epsilon());

void require_finite(double v) {
  if (!std::isfinite(v)) throw NonFiniteDerivative("finite-difference probe returned a non-finite value");
}

}  // namespace

double central_step(double value) { return kCbrtEps * (1.0 + std::fabs(value)); }

Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& at) {
  Vector g(at.size());
  Vector p = at;
  for (Eigen::Index i = 0; i < at.size(); ++i) {
    const double step = central_step(at[i]);
    p[i] = at[i] + step;
    const double fp = f(p);
    p[i] = at[i] - step;
    const double fm = f(p);
    p[i] = at[i];
    require_finite(fp);
    require_finite(fm);
    g[i] = (fp - fm) / (2.0 * step);
  }
  return g;
}

Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& at) {
  Vector p = at;
  Matrix jac;
  for (Eigen::Index i = 0; i < at.size(); ++i) {
    const double step = central_step(at[i]);
    p[i] = at[i] + step;
    Vector fp = f(p);
    p[i] = at[i] - step;
    Vector fm = f(p);
    p[i] = at[i];
    if (i == 0) jac.resize(fp.size(), at.size());
    for (Eigen::Index k = 0; k < fp.size(); ++k) {
      require_finite(fp[k]);
      require_finite(fm[k]);
    }
    jac.col(i) = (fp - fm) / (2.0 * step);
  }
  return jac;
}

Matrix fd_hessian(const std::function<double(const Vector&)>& f, const Vector& at) {
  const Eigen::Index n = at.size();
  Matrix hess(n, n);
  Vector p = at;
  const double f0 = f(at);
  require_finite(f0);
  for (Eigen::Index i = 0; i < n; ++i) {
    // Fourth-root-of-epsilon scale for second differences.
    const double hi = 1e-4 * (1.0 + std::fabs(at[i]));
    for (Eigen::Index j = i; j < n; ++j) {
      const double hj = 1e-4 * (1.0 + std::fabs(at[j]));
      double value;
      if (i == j) {
        p[i] = at[i] + hi;
        const double fp = f(p);
        p[i] = at[i] - hi;
        const double fm = f(p);
        p[i] = at[i];
        require_finite(fp);
        require_finite(fm);
        value = (fp - 2.0 * f0 + fm) / (hi * hi);
      } else {
        auto eval = [&](double si, double sj) {
          p[i] = at[i] + si * hi;
          p[j] = at[j] + sj * hj;
          const double v = f(p);
          p[i] = at[i];
          p[j] = at[j];
          require_finite(v);
          return v;
        };
        value = (eval(1, 1) - eval(1, -1) - eval(-1, 1) + eval(-1, -1)) / (4.0 * hi * hj);
      }
      hess(i, j) = hess(j, i) = value;
    }
  }
  return hess;
}

double fd_derivative(const std::function<double(double)>& f, double at) {
  const double step = central_step(at);
  const double fp = f(at + step), fm = f(at - step);
  require_finite(fp);
  require_finite(fm);
  return (fp - fm) / (2.0 * step);
}

}  // namespace retard_oc
