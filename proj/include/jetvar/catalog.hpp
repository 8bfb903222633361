#pragma once

// Standard Lagrangians used by the demos and the self-check.

#include "jetvar/variational.hpp"

namespace jetvar::catalog {

/// 1/2 y_t^2
Lagrangian free_particle();
/// 1/2 y_t^2 - 1/2 w^2 y^2, parameter w
Lagrangian oscillator();
/// Geodesic Lagrangian of the unit sphere in stereographic coordinates (x, y).
Lagrangian sphere_geodesic();
/// 1/2 (phi_t^2 - phi_x^2) - 1/2 m^2 phi^2 on base (t, x), parameter m
Lagrangian scalar_field();
/// 1/2 y_tt^2
Lagrangian beam();

} // namespace jetvar::catalog
