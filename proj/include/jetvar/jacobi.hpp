#pragma once

#include <vector>

#include "jetvar/variational.hpp"

namespace jetvar {

/// Negative-control hook: scales the first-order momenta p_i^mu by
/// (1 + momentum_fault) inside the Jacobi Lagrangian.
struct JacobiOptions {
    double momentum_fault = 0.0;
};

struct JacobiLagrangian {
    JetChart chart;  // composite extension of the source chart
    Expr density;    // p_i X^i + p_i^mu d_mu X^i (+ p_i^{mu nu} d_{mu nu} X^i)
};

JacobiLagrangian jacobi_lagrangian(const Lagrangian& L, const JacobiOptions& opts = {});

/// density(lambda X-layer) - lambda density for a fixed lambda; zero when the
/// density is linear in the perturbation coordinates.
Expr homogeneity_defect(const JacobiLagrangian& J, const Number& lambda = Number::rational(5, 2));

/// Field equations of the Jacobi Lagrangian with (y, X) varied independently,
/// on the doubled chart c.doubled() where X^i(x) has ordinary jets.
struct JacobiEquations {
    JetChart chart;
    std::vector<Expr> base_eq;          // coefficient of delta X^i, equals E_i
    std::vector<Expr> perturbation_eq;  // coefficient of delta y^k
};

JacobiEquations jacobi_equations(const Lagrangian& L, const JacobiOptions& opts = {});

/// perturbation_eq with X_I -> d_I X for a generic composite X(x, y), minus
/// J^{2k}X(E). Lives on the composite chart; vanishes identically when the
/// prolonged field is tangent to the field equations.
struct TangencyDefect {
    JetChart chart;
    std::vector<Expr> defect;
};

TangencyDefect tangency_defect(const Lagrangian& L, const JacobiOptions& opts = {});

/// True when every component passes is_zero.
bool tangency_holds(const TangencyDefect& t, const ZeroTest& z = {});

/// Expand E_k about a solution to first order in X(x):
/// X^i d_i p_k + X^i_mu d_i^mu p_k - d_mu(X^i d_i p_k^mu + X^i_e d_i^e p_k^mu).
/// On the doubled chart. Order-1 Lagrangians only (unsupported-order otherwise).
std::vector<Expr> first_order_linearization(const Lagrangian& L);

} // namespace jetvar
