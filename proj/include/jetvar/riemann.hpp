#pragma once

// Riemannian specialization: metrics, Christoffel symbols, curvature and the
// geodesic Jacobi equation.
//
// Curvature convention:
//   R^r_{s m n} = d_m G^r_{n s} - d_n G^r_{m s} + G^r_{m l} G^l_{n s} - G^r_{n l} G^l_{m s}
//   R_{a s m n} = g_{a r} R^r_{s m n}
// so that the curvature block K_{ab} = R_{a m n b} u^m u^n on the unit sphere
// is K(u_a u_b - g_ab |u|^2), negative semidefinite.

#include <optional>
#include <string>
#include <vector>

#include "jetvar/matrix.hpp"
#include "jetvar/variational.hpp"

namespace jetvar {

class MetricChart {
public:
    /// Throws asymmetric-input unless g is symmetric (canonical or is_zero
    /// equality) and singular-metric if det g falls below 1e-12 at any of 20
    /// random sample points in [-2, 2]^n.
    MetricChart(std::vector<std::string> coords, ExprMatrix g, std::optional<ExprMatrix> inverse = std::nullopt);

    int dim() const { return static_cast<int>(coords_.size()); }
    const std::vector<std::string>& coords() const { return coords_; }
    const ExprMatrix& g() const { return g_; }
    const ExprMatrix& inverse() const { return ginv_; }

private:
    std::vector<std::string> coords_;
    ExprMatrix g_;
    ExprMatrix ginv_;
};

using Christoffel = std::vector<std::vector<std::vector<Expr>>>;  // G[l][m][n]

/// G^l_{mn} = 1/2 g^{lr} (d_m g_{rn} + d_n g_{rm} - d_r g_{mn}).
Christoffel christoffel(const MetricChart& g);

struct CurvatureData {
    Christoffel gamma;
    std::vector<std::vector<std::vector<std::vector<Expr>>>> R;     // R^r_{smn} as R[r][s][m][n]
    std::vector<std::vector<std::vector<std::vector<Expr>>>> Rlow;  // R_{asmn}
};

CurvatureData riemann(const MetricChart& g);

/// K_{ab} = R_{a m n b} u^m u^n for velocity components u.
ExprMatrix curvature_block(const CurvatureData& cd, const std::vector<Expr>& u);

/// L = 1/2 g_{mn} x^m_t x^n_t on the chart (t; coords), order 1.
Lagrangian geodesic_lagrangian(const MetricChart& g, const std::string& time = "t");

/// Covariant Jacobi equation for x-only perturbations along a curve:
/// D_t D_t X^r + R^r_{s m n} u^s X^m u^n, with D_t X^r = X^r_t + G^r_{mn} u^m X^n.
/// Expressions live on the doubled chart of the geodesic Lagrangian
/// (fibers coords then X-names, order 2).
struct GeodesicJacobi {
    JetChart chart;
    std::vector<Expr> equations;
};

GeodesicJacobi geodesic_jacobi_equation(const MetricChart& g, const std::string& time = "t");

/// Substitution x^r_tt -> -G^r_{mn} x^m_t x^n_t on a chart carrying the coordinates as fibers.
SubstitutionMap geodesic_shell(const MetricChart& g, const Christoffel& gamma, const JetChart& c);

/// g = 4 R^4 / (R^2 + x^2 + y^2)^2 delta on coordinates (x, y). Throws
/// invalid-argument for radius <= 0.
MetricChart sphere_stereographic(double radius = 1.0, const std::string& x = "x", const std::string& y = "y");

/// Named metrics: "flat2" (delta on x, y) and "sphere1" (unit sphere,
/// stereographic). Throws invalid-argument for other names.
MetricChart metric_from_catalog(const std::string& name);

struct Eigen2 {
    double l1 = 0.0, l2 = 0.0;        // descending
    std::vector<double> v2;          // unit eigenvector of l2
};

/// Closed-form eigen-decomposition. Throws asymmetric-input if the
/// off-diagonal entries differ by more than 1e-12.
Eigen2 eigen2x2_symmetric(const std::vector<std::vector<double>>& m);

} // namespace jetvar
