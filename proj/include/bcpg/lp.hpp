#pragma once

// Exact feasibility for small dense linear systems over the rationals.

#include "bcpg/rational.hpp"

#include <optional>

namespace bcpg {

/// { x : rows * x <= rhs, lower <= x <= upper } with finite bounds.
struct LinearSystem {
  int variables = 0;
  std::vector<RationalVector> rows;
  RationalVector rhs;
  RationalVector lower;
  RationalVector upper;
};

/// A feasible point, or nullopt when the polytope is empty. Two-phase
/// primal simplex (phase one only) with Bland's rule, so it terminates.
std::optional<RationalVector> find_feasible_point(const LinearSystem& sys);

}  // namespace bcpg
