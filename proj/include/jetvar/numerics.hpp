#pragma once

// Numerical front: geodesic integration, dragging solutions along a flow,
// conjugate points and finite-difference derivative checks.

#include <optional>
#include <string>
#include <vector>

#include "jetvar/flow.hpp"
#include "jetvar/ode.hpp"
#include "jetvar/riemann.hpp"

namespace jetvar {

/// First-order system on (x, u): x' = u, u' = -G(u, u).
OdeSystem geodesic_system(const MetricChart& g);

/// Geodesic trajectory with state layout (x, u).
Trajectory integrate_geodesic(const MetricChart& g, const std::vector<double>& x0, const std::vector<double>& u0,
                              double t0, double t1, double h = 1e-3);

/// 1/2 g(u, u) at each node of a geodesic trajectory.
std::vector<double> geodesic_energy(const MetricChart& g, const Trajectory& traj);

struct DragOptions {
    double h = 1e-3;      // flow step
    int nodes = 101;      // solution nodes checked, evenly spread over the grid
    double chart_bound = 1e3;
    Bindings params;
};

/// Drags a solution of a first-order Lagrangian by the flow of the vertical
/// field X to parameter s and returns max |E_i| along the dragged curve.
/// The solution trajectory has state layout (y, y_t) with y_tt read from the
/// stored derivatives. The jets of the dragged curve come from the flow of
/// the second prolongation of X, which is the jet of the dragged curve.
/// Throws flow-left-chart when the flow leaves |coordinate| <= chart_bound.
double drag_and_verify(const Lagrangian& L, const Trajectory& solution, const std::vector<Expr>& X, double s,
                       const DragOptions& opts = {});

struct ConjugateOptions {
    double h = 1e-3;
    double tol = 1e-6;  // bisection width in t
};

/// Integrates the geodesic, the Jacobi field with X(t0) = 0, DX(t0) = v0 and a
/// parallel-transported frame vector e starting at the negative eigenvector
/// of the curvature block, then bisects the first sign change of g(X, e).
/// An empty v0 starts the field along e. Two-dimensional metrics only.
/// Returns nullopt if there is no sign change in the span.
std::optional<double> conjugate_point_scan(const MetricChart& g, const Trajectory& geodesic,
                                           const std::vector<double>& v0, const ConjugateOptions& opts = {});

/// Eigenvalues of the curvature block along a geodesic: rows (t, l1, l2)
/// every `stride` nodes.
std::vector<std::vector<double>> curvature_eigen_track(const MetricChart& g, const Trajectory& geodesic,
                                                       int stride = 100);

/// Max over symbols and sample points of |de/dv - central difference| /
/// max(1, |de/dv|). Points are uniform in [-2, 2]; non-finite points are
/// redrawn. Symbols default to all free symbols of e.
double fd_gradient_check(const Expr& e, std::vector<std::string> symbols = {}, int samples = 20,
                         std::uint64_t seed = 0x5eed);

} // namespace jetvar
