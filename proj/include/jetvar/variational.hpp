#pragma once

#include <vector>

#include "jetvar/eval.hpp"
#include "jetvar/jet.hpp"
#include "jetvar/matrix.hpp"

namespace jetvar {

/// Scalar density of order 1 or 2. The chart is always carried at order 2k
/// so that the field equations live on it.
class Lagrangian {
public:
    /// Throws unsupported-order, unknown-symbol, or order-overflow if the
    /// density uses jets above `order` or composite coordinates.
    Lagrangian(const JetChart& chart, Expr density, int order);

    const JetChart& chart() const { return chart_; }
    const Expr& density() const { return density_; }
    int order() const { return order_; }

private:
    JetChart chart_;
    Expr density_;
    int order_;
};

struct Momenta {
    std::vector<Expr> p;                            // p_i
    std::vector<std::vector<Expr>> p_mu;            // p_i^mu
    std::vector<std::vector<std::vector<Expr>>> p_munu;  // p_i^{mu nu}, order 2 only, symmetric
};

/// p_i = dL/dy^i, p_i^mu = dL/dy^i_mu, p_i^{mu nu} in the symmetrized convention.
Momenta momenta(const Lagrangian& L);

struct EulerLagrangeForm {
    JetChart chart;
    std::vector<Expr> E;
};

/// E_i = p_i - d_mu p_i^mu (+ d_{mu nu} p_i^{mu nu}), summed over ordered indices.
EulerLagrangeForm euler_lagrange(const Lagrangian& L);

struct FirstVariation {
    Expr variation;              // J^kX(L)
    Expr interior;               // E_i X^i
    std::vector<Expr> boundary;  // F^mu, one per base direction
};

/// Splits J^kX(L) into E_i X^i plus the divergence d_mu F^mu. X depends on
/// base and order-0 fiber coordinates only.
FirstVariation first_variation(const Lagrangian& L, const std::vector<Expr>& X);

/// E_i evaluated on the jet of the section at x. Parameter values, if any,
/// come from `params`.
std::vector<double> residual(const EulerLagrangeForm& E, const SectionSamples& s, const std::vector<double>& x,
                             const Bindings& params = {});

/// Fibered change of coordinates given through its inverse: old base
/// coordinates as functions of the new ones, old fiber coordinates as
/// functions of new base and fiber coordinates. New coordinates reuse the
/// chart's names. Jacobians are derived from the inverse unless supplied.
struct FiberedDiffeo {
    std::vector<Expr> base_inverse;    // x^mu(x')
    std::vector<Expr> fiber_inverse;   // y^k(x', y')
    Expr jacobian_density;             // det dx/dx'; empty -> derived
    ExprMatrix fiber_jacobian;         // dy^k/dy'^i; empty -> derived
    bool has_jacobian_density = false;
};

struct ChartChangeReport {
    bool ok = false;
    double max_defect = 0.0;  // max |lhs - rhs| / (1 + |lhs| + |rhs|)
    int points = 0;
};

/// Checks E'_i = Jbar E_k Jbar^k_i at `points` random points with relative
/// tolerance `tol`. Throws singular-jacobian when dx/dx' degenerates at a
/// sample point.
ChartChangeReport chart_change_check(const Lagrangian& L, const FiberedDiffeo& diffeo, int points = 50,
                                     double tol = 1e-8, std::uint64_t seed = 0x5eed);

} // namespace jetvar
