#pragma once

#include <Eigen/Core>
#include <functional>
#include <memory>
#include <vector>

namespace retard_oc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A vector-valued curve on a closed interval. Curves are immutable; a
/// Trajectory stitches them together and decides which one owns a
/// breakpoint.
class Curve {
 public:
  virtual ~Curve() = default;
  virtual int dimension() const = 0;
  virtual Vector value(double t) const = 0;
};

using CurvePtr = std::shared_ptr<const Curve>;

/// Closed-form curve backed by a callable.
class FunctionCurve final : public Curve {
 public:
  FunctionCurve(int dimension, std::function<Vector(double)> f)
      : dim_(dimension), f_(std::move(f)) {}
  int dimension() const override { return dim_; }
  Vector value(double t) const override { return f_(t); }

 private:
  int dim_;
  std::function<Vector(double)> f_;
};

class ConstantCurve final : public Curve {
 public:
  explicit ConstantCurve(Vector v) : v_(std::move(v)) {}
  int dimension() const override { return static_cast<int>(v_.size()); }
  Vector value(double) const override { return v_; }

 private:
  Vector v_;
};

/// Dense samples at increasing nodes.
///
/// With derivatives, values are reconstructed by Hermite interpolation over
/// a sliding window of `window` nodes (window 2 is the classical cubic
/// Hermite). Without derivatives a local Lagrange polynomial through
/// `2 * window - 2` nodes is used. Evaluation outside [nodes.front(),
/// nodes.back()] extrapolates with the nearest window.
class NodalCurve final : public Curve {
 public:
  NodalCurve(std::vector<double> nodes, Matrix values, int window = 4);
  NodalCurve(std::vector<double> nodes, Matrix values, Matrix derivatives, int window = 4);

  int dimension() const override { return static_cast<int>(values_.rows()); }
  Vector value(double t) const override;

  const std::vector<double>& nodes() const { return nodes_; }
  const Matrix& values() const { return values_; }
  bool has_derivatives() const { return derivatives_.size() > 0; }

 private:
  std::vector<double> nodes_;
  Matrix values_;       // dimension x nodes
  Matrix derivatives_;  // empty or dimension x nodes
  int window_;
};

/// Linear map of another curve's argument: value(t) = inner(t + offset).
class ShiftedCurve final : public Curve {
 public:
  ShiftedCurve(CurvePtr inner, double offset) : inner_(std::move(inner)), offset_(offset) {}
  int dimension() const override { return inner_->dimension(); }
  Vector value(double t) const override { return inner_->value(t + offset_); }

 private:
  CurvePtr inner_;
  double offset_;
};

}  // namespace retard_oc
