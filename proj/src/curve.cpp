#include "retard_oc/curve.hpp"

#include <algorithm>
#include <stdexcept>

namespace retard_oc {
namespace {

void validate(const std::vector<double>& nodes, const Matrix& values) {
  if (nodes.empty()) throw std::invalid_argument("NodalCurve needs at least one node");
  if (static_cast<std::size_t>(values.cols()) != nodes.size())
    throw std::invalid_argument("NodalCurve: node/value count mismatch");
  for (std::size_t i = 1; i < nodes.size(); ++i)
    if (!(nodes[i] > nodes[i - 1])) throw std::invalid_argument("NodalCurve: nodes must increase");
}

// Window [first, first + count) of nodes bracketing t.
std::pair<std::size_t, std::size_t> window_for(const std::vector<double>& nodes, double t,
                                               std::size_t count) {
  const std::size_t k = nodes.size();
  count = std::min(count, k);
  auto it = std::upper_bound(nodes.begin(), nodes.end(), t);
  std::size_t j = it == nodes.begin() ? 0 : static_cast<std::size_t>(it - nodes.begin()) - 1;
  j = std::min(j, k >= 2 ? k - 2 : 0);
  std::size_t half = count / 2;
  std::size_t first = j + 1 >= half ? j + 1 - half : 0;
  first = std::min(first, k - count);
  return {first, count};
}

}  // namespace

NodalCurve::NodalCurve(std::vector<double> nodes, Matrix values, int window)
    : nodes_(std::move(nodes)), values_(std::move(values)), window_(window) {
  validate(nodes_, values_);
  if (window_ < 1) throw std::invalid_argument("NodalCurve: window must be positive");
}

NodalCurve::NodalCurve(std::vector<double> nodes, Matrix values, Matrix derivatives, int window)
    : nodes_(std::move(nodes)),
      values_(std::move(values)),
      derivatives_(std::move(derivatives)),
      window_(window) {
  validate(nodes_, values_);
  if (derivatives_.rows() != values_.rows() || derivatives_.cols() != values_.cols())
    throw std::invalid_argument("NodalCurve: derivative shape mismatch");
  if (window_ < 1) throw std::invalid_argument("NodalCurve: window must be positive");
}

Vector NodalCurve::value(double t) const {
  if (nodes_.size() == 1) return values_.col(0);

  if (!has_derivatives()) {
    auto [first, count] = window_for(nodes_, t, static_cast<std::size_t>(std::max(2, 2 * window_ - 2)));
    Vector out = Vector::Zero(values_.rows());
    for (std::size_t i = first; i < first + count; ++i) {
      double w = 1.0;
      for (std::size_t j = first; j < first + count; ++j)
        if (j != i) w *= (t - nodes_[j]) / (nodes_[i] - nodes_[j]);
      out += w * values_.col(static_cast<Eigen::Index>(i));
    }
    return out;
  }

  auto [first, count] = window_for(nodes_, t, static_cast<std::size_t>(std::max(2, window_)));
  Vector out = Vector::Zero(values_.rows());
  for (std::size_t i = first; i < first + count; ++i) {
    double l = 1.0, dl = 0.0;
    for (std::size_t j = first; j < first + count; ++j) {
      if (j == i) continue;
      l *= (t - nodes_[j]) / (nodes_[i] - nodes_[j]);
      dl += 1.0 / (nodes_[i] - nodes_[j]);
    }
    const double dt = t - nodes_[i];
    const double l2 = l * l;
    const auto col = static_cast<Eigen::Index>(i);
    out += (1.0 - 2.0 * dl * dt) * l2 * values_.col(col) + dt * l2 * derivatives_.col(col);
  }
  return out;
}

}  // namespace retard_oc
