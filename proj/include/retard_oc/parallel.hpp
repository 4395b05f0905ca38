#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <vector>

namespace retard_oc {

/// How sample loops run. `serial` is the reference implementation; the
/// OpenMP version must produce identical results.
enum class Execution { serial, parallel };

/// out[i] = f(i) for i in [0, count). If any call throws, the exception of
/// the lowest failing index is rethrown after the loop.
template <class T, class F>
std::vector<T> parallel_map(std::size_t count, F&& f, Execution execution = Execution::parallel) {
  std::vector<T> out(count);
  std::vector<std::exception_ptr> errors(count);
  const auto n = static_cast<std::int64_t>(count);
  if (execution == Execution::serial) {
    for (std::int64_t i = 0; i < n; ++i) {
      try {
        out[i] = f(static_cast<std::size_t>(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      try {
        out[i] = f(static_cast<std::size_t>(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

struct WorstSample {
  double value = -std::numeric_limits<double>::infinity();
  std::size_t index = 0;
  bool found = false;
};

/// Largest residual(i) over [0, count); ties go to the lowest index, so the
/// result does not depend on thread scheduling. NaN counts as worst.
template <class F>
WorstSample worst_sample(std::size_t count, F&& residual,
                         Execution execution = Execution::parallel) {
  const auto values = parallel_map<double>(count, residual, execution);
  WorstSample w;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (std::isnan(v)) {
      if (!(w.found && std::isnan(w.value))) w = {v, i, true};
      continue;
    }
    if (w.found && std::isnan(w.value)) continue;
    if (!w.found || v > w.value) w = {v, i, true};
  }
  return w;
}

}  // namespace retard_oc
