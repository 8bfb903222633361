#pragma once

#include <string>
#include <vector>

#include "jetvar/variational.hpp"

namespace jetvar {

/// Second variation of a first-order Lagrangian on the chart with fibers
/// (y, dy, d2y): the first-variation slots use the perturbation names (X),
/// the second-variation slots prefix them with another X (XX, XXx1, ...).
struct SecondVariation {
    JetChart chart;
    Expr density;  // (p d2y + p^mu d_mu d2y) + quadratic part
    std::vector<std::string> first_slots;   // X names
    std::vector<std::string> second_slots;  // XX names

    /// density with every d2y jet set to zero.
    Expr quadratic() const;
    /// Expression on the original chart with dy = X, d2y = dX/dy^k X^k and their
    /// total derivatives.
    Expr along_field(const std::vector<Expr>& X, const JetChart& original) const;
};

/// Throws unsupported-order for order-2 Lagrangians.
SecondVariation second_variation(const Lagrangian& L);

/// Blocks of the bilinear form on (dy^i, dy^i_mu):
/// A[k][i] = d_k p_i, B[i][k][a] = d_i p_k^a, C[i][mu][k][a] = d_k^a p_i^mu.
struct HessianForm {
    std::vector<std::vector<Expr>> A;
    std::vector<std::vector<std::vector<Expr>>> B;
    std::vector<std::vector<std::vector<std::vector<Expr>>>> C;

    /// A dy dy + 2 B dy dy_a + C dy_mu dy_a, in the jet names of `doubled`
    /// (the X fibers of the source chart's doubled chart).
    Expr quadratic(const JetChart& source) const;
};

HessianForm hessian(const Lagrangian& L);

/// A trial deformation along a solution, as closed-form functions of the
/// single base coordinate.
struct TrialDeformation {
    std::vector<Expr> components;
    double t_start = 0.0;
    double t_end = 1.0;
};

enum class Verdict { StableTrialwise, Marginal, Unstable };
const char* to_string(Verdict v);

struct StabilityOptions {
    int panels = 10000;
    Bindings params;             // values for chart parameters
    bool check_solution = true;  // residual of the solution at 11 nodes
    double solution_tol = 1e-8;
};

struct StabilityResult {
    double integral = 0.0;
    Verdict verdict = Verdict::Marginal;
    double max_solution_residual = 0.0;
};

/// Simpson quadrature of the Hessian quadratic form along the solution with
/// dy = xi(t), dy_t = xi'(t). One-dimensional base only. Throws
/// endpoint-violation if xi does not vanish (1e-12) at both ends, and
/// invalid-argument if the solution residual exceeds solution_tol.
/// The verdict is marginal within 1e-6 * interval length of zero.
StabilityResult stability_integral(const Lagrangian& L, const SectionSamples& solution, const TrialDeformation& xi,
                                   const StabilityOptions& opts = {});

/// Verdict for a given integral over an interval of the given length.
Verdict classify(double integral, double length);

/// Taylor coefficients of the flow of X: dy = X, d2y^i = X^i_k dy^k,
/// d3y^i = X^i_k d2y^k + X^i_kn dy^k dy^n. Expressions in (x, y).
struct ThirdOrder {
    std::vector<Expr> d1;
    std::vector<Expr> d2;
    std::vector<Expr> d3;
};

ThirdOrder third_order_coefficients(const std::vector<Expr>& X, const JetChart& c);

} // namespace jetvar
