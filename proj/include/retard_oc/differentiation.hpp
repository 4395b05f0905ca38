#pragma once

#include <functional>

#include "retard_oc/curve.hpp"

namespace retard_oc {

/// Central-difference step for a coordinate with magnitude |value|:
/// cube root of machine epsilon scaled by (1 + |value|).
double central_step(double value);

/// Gradient of a scalar function by central differences. Throws
/// NonFiniteDerivative when a probe is not finite.
Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& at);

/// Jacobian (rows = outputs) by central differences.
Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& at);

/// Symmetric Hessian by central differences of the gradient.
Matrix fd_hessian(const std::function<double(const Vector&)>& f, const Vector& at);

double fd_derivative(const std::function<double(double)>& f, double at);

}  // namespace retard_oc
