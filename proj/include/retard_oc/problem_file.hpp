#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "retard_oc/problem.hpp"
#include "retard_oc/sufficiency.hpp"

namespace retard_oc {

/// c_0 + c_1 t + c_2 t^2 + ...
struct Polynomial {
  std::vector<double> coeffs;

  double operator()(double t) const;
  Polynomial derivative() const;
};

/// Problem files describe state-linear problems whose data are polynomial
/// in t. One `key = value` per line, `#` starts a comment.
///
///   value  := number | poly | vector | matrix | "free" | "box" vector vector
///   number := integer | decimal | p/q
///   poly   := number | "poly(" number {"," number} ")"      coefficients c0, c1, ...
///   vector := "[" item {"," item} "]"
///   matrix := "[" vector {"," vector} "]"
///
/// Keys (n x n, n x m, ... shapes are checked):
///   name                 optional identifier
///   a, b, r, s           rationals
///   n, m                 dimensions
///   A, A_D               n x n
///   g.const, g_D.const   n-vectors                 default 0
///   g.lin, g_D.lin       n x m                     default 0
///   g.quad.K, g_D.quad.K m x m, adds u' Q u to component K (1-based)
///   cost.xx cost.xy cost.yy cost.x cost.y cost.const
///                        f0_x = x'Qxx x + x'Qxy y + y'Qyy y + qx.x + qy.y + c
///   cost.uu cost.uv cost.vv cost.u cost.v
///                        f0_u, same shape in (u, v)
///   phi                  n-vector, history on [a - r, a]
///   psi                  m-vector, history on [a - s, a)  default 0
///   U                    free | box [lower] [upper]       default free
///
/// Throws ParseError with the offending line number.
StateLinearProblem parse_problem(std::string_view text);
StateLinearProblem load_problem_file(const std::string& path);

/// Value-function files give S(t, x) = x'P_i x + eta_i . x + c_i on each
/// lattice cell i (0-based), with the same value grammar:
///   eta.I = [poly, ...]   n-vector   required
///   c.I   = poly                     required
///   P.I   = n x n matrix             optional
ValueFunctionCandidate parse_value_function(std::string_view text,
                                            const CommensurabilityLattice& lattice, int n);
ValueFunctionCandidate load_value_function_file(const std::string& path,
                                                const CommensurabilityLattice& lattice, int n);

}  // namespace retard_oc
