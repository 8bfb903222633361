#include "jetvar/catalog.hpp"

#include "jetvar/riemann.hpp"

namespace jetvar::catalog {

namespace {
Expr s(const char* n) { return Expr::symbol(n); }
Expr half() { return Expr::rational(1, 2); }
} // namespace

Lagrangian free_particle() { return Lagrangian(JetChart({"t"}, {"y"}, 1), half() * s("y_t") * s("y_t"), 1); }

Lagrangian oscillator()
{
    return Lagrangian(JetChart({"t"}, {"y"}, 1, {"w"}),
                      half() * s("y_t") * s("y_t") - half() * s("w") * s("w") * s("y") * s("y"), 1);
}

Lagrangian sphere_geodesic() { return geodesic_lagrangian(sphere_stereographic()); }

Lagrangian scalar_field()
{
    return Lagrangian(JetChart({"t", "x"}, {"phi"}, 1, {"m"}),
                      half() * (s("phi_t") * s("phi_t") - s("phi_x") * s("phi_x")) -
                          half() * s("m") * s("m") * s("phi") * s("phi"),
                      1);
}

Lagrangian beam() { return Lagrangian(JetChart({"t"}, {"y"}, 2), half() * s("y_tt") * s("y_tt"), 2); }

} // namespace jetvar::catalog
