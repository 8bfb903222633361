#pragma once

#include <vector>

#include "jetvar/expr.hpp"

namespace jetvar {

/// Small dense symbolic matrix, row-major.
using ExprMatrix = std::vector<std::vector<Expr>>;

/// Laplace expansion; meant for dimensions up to 4.
Expr determinant(const ExprMatrix& a);
/// Adjugate over determinant. The determinant is returned through `det`
/// so callers can check it numerically for singularity.
ExprMatrix inverse(const ExprMatrix& a, Expr* det = nullptr);

ExprMatrix transpose(const ExprMatrix& a);

} // namespace jetvar
