#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "jetvar/error.hpp"
#include "jetvar/jacobi.hpp"
#include "jetvar/riemann.hpp"

using namespace jetvar;

namespace {

Expr sym(const std::string& s) { return Expr::symbol(s); }

std::vector<std::vector<double>> eval_block(const ExprMatrix& K, const Bindings& b)
{
    std::vector<std::vector<double>> out(K.size());
    for (std::size_t a = 0; a < K.size(); ++a)
        for (const auto& e : K[a]) out[a].push_back(evaluate(e, b));
    return out;
}

// A non-conformal 2-metric with off-diagonal terms.
MetricChart warped()
{
    Expr x = sym("x"), y = sym("y");
    Expr a = Expr(2) + sin(x) * sin(x), b = x * y / (Expr(4) + y * y), c = Expr(3) + cos(y) * x * x;
    return MetricChart({"x", "y"}, {{a, b}, {b, c}});
}

} // namespace

TEST_CASE("metric chart validation")
{
    Expr x = sym("x"), y = sym("y");
    CHECK_THROWS_AS(MetricChart({"x", "y"}, {{Expr(1), x}, {y, Expr(1)}}), Error);
    try {
        MetricChart({"x", "y"}, {{Expr(1), Expr(1)}, {Expr(1), Expr(1)}});
        FAIL("expected singular metric");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SingularMetric);
    }
    CHECK_THROWS_AS(MetricChart({"x", "y"}, {{sym("z"), Expr(0)}, {Expr(0), Expr(1)}}), Error);
    CHECK_THROWS_AS(sphere_stereographic(0.0), Error);
    CHECK_THROWS_AS(metric_from_catalog("torus"), Error);
    CHECK(metric_from_catalog("flat2").dim() == 2);
}

TEST_CASE("stereographic sphere metric values")
{
    MetricChart s = sphere_stereographic();
    CHECK(evaluate(s.g()[0][0], {{"x", 0.0}, {"y", 0.0}}) == doctest::Approx(4.0));
    CHECK(evaluate(s.g()[0][0], {{"x", 1.0}, {"y", 0.0}}) == doctest::Approx(1.0));
    CHECK(evaluate(s.g()[0][1], {{"x", 1.0}, {"y", 0.0}}) == 0.0);
    MetricChart s2 = sphere_stereographic(2.0);
    CHECK(evaluate(s2.g()[1][1], {{"x", 2.0}, {"y", 0.0}}) == doctest::Approx(1.0));
}

TEST_CASE("Christoffel symbols")
{
    Christoffel flat = christoffel(metric_from_catalog("flat2"));
    for (const auto& a : flat)
        for (const auto& b : a)
            for (const auto& c : b) CHECK(c == Expr(0));

    // Hand differentiation of the conformal factor 4/(1+r^2)^2: G^1_11 = -2x/(1+r^2).
    Christoffel G = christoffel(sphere_stereographic());
    Expr x = sym("x"), y = sym("y"), q = Expr(1) + x * x + y * y;
    CHECK(is_zero(G[0][0][0] + Expr(2) * x / q));
    CHECK(is_zero(G[0][1][1] - Expr(2) * x / q));
    CHECK(is_zero(G[1][0][1] + Expr(2) * x / q));

    // Symmetry and metric compatibility on a non-conformal metric.
    MetricChart w = warped();
    Christoffel H = christoffel(w);
    for (int l = 0; l < 2; ++l)
        for (int m = 0; m < 2; ++m)
            for (int n = 0; n < 2; ++n) {
                CHECK(H[l][m][n] == H[l][n][m]);
                std::vector<Expr> t{partial(w.g()[m][n], w.coords()[l])};
                for (int r = 0; r < 2; ++r) {
                    t.push_back(-(H[r][l][m] * w.g()[r][n]));
                    t.push_back(-(H[r][l][n] * w.g()[m][r]));
                }
                CHECK(is_zero(add(t)));
            }
}

TEST_CASE("geodesic Euler-Lagrange equations")
{
    for (const MetricChart& g : {sphere_stereographic(), warped()}) {
        Lagrangian L = geodesic_lagrangian(g);
        EulerLagrangeForm E = euler_lagrange(L);
        Christoffel G = christoffel(g);
        const JetChart& c = L.chart();
        for (int l = 0; l < 2; ++l) {
            std::vector<Expr> t{E.E[l]};
            for (int v = 0; v < 2; ++v) {
                std::vector<Expr> acc{c.jet(v, {2})};
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) acc.push_back(G[v][a][b] * c.jet(a, {1}) * c.jet(b, {1}));
                t.push_back(g.g()[l][v] * add(acc));
            }
            CHECK(is_zero(add(t)));
        }
    }
}

TEST_CASE("curvature identities")
{
    CurvatureData flat = riemann(metric_from_catalog("flat2"));
    for (const auto& a : flat.R)
        for (const auto& b : a)
            for (const auto& c : b)
                for (const auto& d : c) CHECK(d == Expr(0));

    for (const MetricChart& g : {sphere_stereographic(), warped()}) {
        CurvatureData cd = riemann(g);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int c = 0; c < 2; ++c)
                    for (int d = 0; d < 2; ++d) {
                        CHECK(is_zero(cd.R[a][b][c][d] + cd.R[a][b][d][c]));
                        CHECK(is_zero(cd.Rlow[a][b][c][d] + cd.Rlow[b][a][c][d]));
                        CHECK(is_zero(cd.R[a][b][c][d] + cd.R[a][c][d][b] + cd.R[a][d][b][c]));
                    }
    }
}

TEST_CASE("unit sphere has sectional curvature 1")
{
    MetricChart g = sphere_stereographic();
    CurvatureData cd = riemann(g);
    Expr K = cd.Rlow[0][1][0][1] / (g.g()[0][0] * g.g()[1][1] - g.g()[0][1] * g.g()[1][0]);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int k = 0; k < 20; ++k) CHECK(evaluate(K, {{"x", u(rng)}, {"y", u(rng)}}) == doctest::Approx(1.0).epsilon(1e-12));
    MetricChart g2 = sphere_stereographic(2.0);
    CurvatureData c2 = riemann(g2);
    Expr K2 = c2.Rlow[0][1][0][1] / (g2.g()[0][0] * g2.g()[1][1]);
    CHECK(evaluate(K2, {{"x", 0.3}, {"y", -1.2}}) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("equator curvature block and its eigenvalues")
{
    CurvatureData cd = riemann(sphere_stereographic());
    ExprMatrix K = curvature_block(cd, {sym("u1"), sym("u2")});
    for (int k = 0; k < 20; ++k) {
        double t = 2 * std::numbers::pi * k / 20.0 + 0.1;
        Bindings b{{"x", std::cos(t)}, {"y", std::sin(t)}, {"u1", -std::sin(t)}, {"u2", std::cos(t)}};
        auto M = eval_block(K, b);
        CHECK(M[0][0] == doctest::Approx(-std::cos(t) * std::cos(t)).epsilon(1e-12));
        CHECK(M[0][1] == doctest::Approx(-std::cos(t) * std::sin(t)).epsilon(1e-12));
        CHECK(M[1][1] == doctest::Approx(-std::sin(t) * std::sin(t)).epsilon(1e-12));
        Eigen2 e = eigen2x2_symmetric(M);
        CHECK(std::fabs(e.l1) <= 1e-9);
        CHECK(std::fabs(e.l2 + 1) <= 1e-9);
        // Negative mode is normal to the equator.
        CHECK(std::fabs(std::fabs(e.v2[0] * std::cos(t) + e.v2[1] * std::sin(t)) - 1) <= 1e-9);
    }
}

TEST_CASE("eigen2x2")
{
    Eigen2 id = eigen2x2_symmetric({{1, 0}, {0, 1}});
    CHECK(id.l1 == 1.0);
    CHECK(id.l2 == 1.0);
    Eigen2 e = eigen2x2_symmetric({{2, 1}, {1, 2}});
    CHECK(e.l1 == doctest::Approx(3));
    CHECK(e.l2 == doctest::Approx(1));
    CHECK(std::fabs(e.v2[0] + e.v2[1]) <= 1e-12);
    try {
        eigen2x2_symmetric({{1, 2}, {0, 1}});
        FAIL("expected asymmetric input");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::AsymmetricInput);
    }
}

TEST_CASE("geodesic Jacobi equation")
{
    // Flat: D_t D_t X = X_tt.
    GeodesicJacobi flat = geodesic_jacobi_equation(metric_from_catalog("flat2"));
    CHECK(is_zero(flat.equations[0] - sym("Xx_tt")));
    CHECK(is_zero(flat.equations[1] - sym("Xy_tt")));

    // Cross-check against the Jacobi module on shell: linearized E_k = -g_kr (Jacobi)^r.
    for (const MetricChart& g : {sphere_stereographic(), warped()}) {
        Lagrangian L = geodesic_lagrangian(g);
        JacobiEquations J = jacobi_equations(L);
        GeodesicJacobi gj = geodesic_jacobi_equation(g);
        SubstitutionMap shell = geodesic_shell(g, christoffel(g), gj.chart);
        for (int k = 0; k < 2; ++k) {
            std::vector<Expr> t{J.perturbation_eq[k]};
            for (int r = 0; r < 2; ++r) t.push_back(g.g()[k][r] * gj.equations[r]);
            CHECK(is_zero(substitute(add(t), shell)));
        }
    }

    // Normal field of magnitude f on the equator reduces to f'' + f.
    GeodesicJacobi gj = geodesic_jacobi_equation(sphere_stereographic());
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 20; ++k) {
        double t = 0.3 * k, f = u(rng), fd = u(rng), fdd = u(rng);
        double c = std::cos(t), s = std::sin(t);
        // X = f (c, s); X' = f'(c, s) + f(-s, c); X'' = f''(c,s) + 2f'(-s,c) - f(c,s).
        Bindings b{{"t", t},
                   {"x", c},
                   {"y", s},
                   {"x_t", -s},
                   {"y_t", c},
                   {"x_tt", -c},
                   {"y_tt", -s},
                   {"Xx", f * c},
                   {"Xy", f * s},
                   {"Xx_t", fd * c - f * s},
                   {"Xy_t", fd * s + f * c},
                   {"Xx_tt", fdd * c - 2 * fd * s - f * c},
                   {"Xy_tt", fdd * s + 2 * fd * c - f * s}};
        double e0 = evaluate(gj.equations[0], b), e1 = evaluate(gj.equations[1], b);
        CHECK(e0 == doctest::Approx((fdd + f) * c).epsilon(1e-10).scale(1));
        CHECK(e1 == doctest::Approx((fdd + f) * s).epsilon(1e-10).scale(1));
    }
}
