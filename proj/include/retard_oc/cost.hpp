#pragma once

#include <vector>

#include "retard_oc/problem.hpp"

namespace retard_oc {

enum class QuadratureRule { simpson, boole };

struct QuadratureConfig {
  int steps_per_cell = 256;
  QuadratureRule rule = QuadratureRule::boole;
};

/// Weights w_0..w_steps of the composite rule on one cell of unit length.
std::vector<double> cell_quadrature_weights(const QuadratureConfig& cfg);

/// g0(x(b)) plus the running cost integrated cell by cell on the lattice.
/// No quadrature panel straddles a breakpoint, and cell endpoints are
/// evaluated with the one-sided limit from inside the cell.
double evaluate_cost(const DelayedProblem& problem, const CandidateSolution& cand,
                     const QuadratureConfig& cfg = {});
double evaluate_cost(const StateLinearProblem& problem, const CandidateSolution& cand,
                     const QuadratureConfig& cfg = {});

}  // namespace retard_oc
