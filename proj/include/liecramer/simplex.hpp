#pragma once

#include <optional>

#include "liecramer/lie.hpp"

namespace liecramer {

struct LinearProgramSolution {
  Vector x;
  double objective = 0.0;
};

/// Dense two-phase simplex with Bland's rule for
///   maximize c^T x  subject to  A x = b, x >= 0.
/// Returns nullopt when the feasible set is empty (phase-one residual above
/// `feasibility_tol`). Unboundedness is reported as an InvalidArgument error.
/// Intended for the tiny programs that arise from convex-hull membership.
std::optional<LinearProgramSolution> solve_lp(const Vector& c, const Matrix& a, const Vector& b,
                                              double feasibility_tol = 1e-9);

}  // namespace liecramer
