#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "jetvar/error.hpp"
#include "jetvar/secondvariation.hpp"
#include "suite.hpp"
#include "taylor.hpp"

using namespace jetvar;
using namespace testsuite;

namespace {

const double pi = std::numbers::pi;

StabilityResult sphere_trial(double a, const Expr& f)
{
    Expr t = sym("t");
    auto sol = SectionSamples::analytic({cos(t), sin(t)});
    TrialDeformation xi{{f * cos(t), f * sin(t)}, 0.0, a * pi};
    return stability_integral(sphere_geodesic(), sol, xi);
}

} // namespace

TEST_CASE("second variation of the free particle is (X_t)^2")
{
    SecondVariation sv = second_variation(free_particle());
    CHECK(sv.first_slots == std::vector<std::string>{"X"});
    CHECK(sv.second_slots == std::vector<std::string>{"XX"});
    CHECK(is_zero(sv.quadratic() - sym("X_t") * sym("X_t")));
    CHECK(is_zero(sv.density - sym("X_t") * sym("X_t") - sym("y_t") * sym("XX_t")));
}

TEST_CASE("second variation of the oscillator")
{
    SecondVariation sv = second_variation(oscillator());
    Expr w = sym("w"), X = sym("X");
    CHECK(is_zero(sv.quadratic() - sym("X_t") * sym("X_t") + w * w * X * X));
    CHECK(is_zero(sv.density - sv.quadratic() - sym("y_t") * sym("XX_t") + w * w * sym("y") * sym("XX")));
}

TEST_CASE("hessian quadratic matches the second variation's quadratic part")
{
    for (const auto& L : {oscillator(), sphere_geodesic(), coupled(), scalar_field()}) {
        SecondVariation sv = second_variation(L);
        Expr q = hessian(L).quadratic(L.chart());
        // Both charts name the X-layer identically.
        CHECK(is_zero(q - sv.quadratic()));
    }
}

TEST_CASE("second variation along a field is the twice-applied prolongation")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 6; ++trial) {
        auto P = random_problem(rng, 1 + trial % 2);
        const JetChart& c = P.L.chart();
        auto pro = prolong_vertical_field(P.X, 1, c);
        Expr once = prolonged_action(P.L.density(), pro, c);
        Expr twice = prolonged_action(once, pro, c);
        CHECK(is_zero(second_variation(P.L).along_field(P.X, c) - twice));
    }
    Lagrangian L = scalar_field();
    std::vector<Expr> X{sin(sym("phi")) * sym("x") + sym("t")};
    auto pro = prolong_vertical_field(X, 1, L.chart());
    Expr twice = prolonged_action(prolonged_action(L.density(), pro, L.chart()), pro, L.chart());
    CHECK(is_zero(second_variation(L).along_field(X, L.chart()) - twice));
}

TEST_CASE("Taylor gap of the second-order expansion decays like s^3")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 8; ++trial) {
        auto P = random_problem(rng, 1 + trial % 2);
        Bindings pt;
        for (const auto* j : P.L.chart().fiber_jets(1)) pt[j->name] = u(rng);
        pt["t"] = u(rng);
        double e1 = second_order_gap(P.L, P.X, pt, 1e-2), e2 = second_order_gap(P.L, P.X, pt, 1e-3);
        CAPTURE(trial);
        CHECK(slope(e1, e2, 1e-2, 1e-3) >= 2.9);
    }
}

TEST_CASE("sphere equator trial integrals")
{
    Expr t = sym("t");
    for (double a : {0.5, 0.9, 1.0, 1.1, 2.0}) {
        Expr f = sin(t / Expr::real(a));
        StabilityResult r = sphere_trial(a, f);
        CAPTURE(a);
      
        // Exact: int (f'^2 - f^2) over [0, a pi] = pi (1 - a^2) / (2a).
        CHECK(std::fabs(r.integral - pi * (1 - a * a) / (2 * a)) <= 1e-6);
        CHECK(r.max_solution_residual <= 1e-12);
        Verdict want = a < 1 ? Verdict::StableTrialwise : a > 1 ? Verdict::Unstable : Verdict::Marginal;
        CHECK(r.verdict == want);
    }
    CHECK(std::string(to_string(Verdict::Unstable)) == "unstable");
    CHECK(std::string(to_string(Verdict::StableTrialwise)) == "stable-trialwise");
}

TEST_CASE("zero trial gives zero")
{
    StabilityResult r = sphere_trial(1.0, Expr(0));
    CHECK(r.integral == 0.0);
    CHECK(r.verdict == Verdict::Marginal);
}

TEST_CASE("free particle straight line is nonnegative for random trials")
{
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> k(1, 6), c(-3, 3);
    Expr t = sym("t");
    auto sol = SectionSamples::analytic({Expr(2) * t + Expr(1)});
    for (int trial = 0; trial < 20; ++trial) {
        // Sums of sine modes vanish at both ends of [0, pi].
        Expr f = Expr(c(rng)) * sin(Expr(k(rng)) * t) + Expr(c(rng)) * sin(Expr(k(rng)) * t) + sin(t);
        StabilityResult r = stability_integral(free_particle(), sol, {{f}, 0.0, pi});
        CHECK(r.integral >= -1e-12);
    }
}

TEST_CASE("oscillator threshold matches the first eigenvalue")
{
    // Half-period sine on [0, T] gives (pi^2/T^2 - w^2) T/2.
    Expr t = sym("t");
    auto sol = SectionSamples::analytic({Expr(0)});
    StabilityOptions opts;
    opts.params = {{"w", 1.0}};
    for (double T : {2.0, 4.0}) {
        StabilityResult r = stability_integral(oscillator(), sol, {{sin(Expr::real(pi / T) * t)}, 0.0, T}, opts);
        CHECK(std::fabs(r.integral - (pi * pi / (T * T) - 1) * T / 2) <= 1e-9);
    }
}

TEST_CASE("stability errors")
{
    Expr t = sym("t");
    auto sol = SectionSamples::analytic({cos(t), sin(t)});
    CHECK_THROWS_WITH_AS(stability_integral(sphere_geodesic(), sol, {{cos(t), Expr(0)}, 0.0, pi}),
                         doctest::Contains("endpoint"), Error);
    auto off = SectionSamples::analytic({t, t * t});
    try {
        stability_integral(sphere_geodesic(), off, {{sin(t), Expr(0)}, 0.0, pi});
        FAIL("expected a residual error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidArgument);
    }
    CHECK_THROWS_AS(second_variation(beam()), Error);
    CHECK_THROWS_AS(hessian(beam()), Error);
    CHECK_THROWS_AS(stability_integral(scalar_field(), sol, {{Expr(0)}, 0.0, 1.0}), Error);
    CHECK(classify(1e-7, 1.0) == Verdict::Marginal);
    CHECK(classify(-1e-3, 1.0) == Verdict::Unstable);
}

TEST_CASE("third-order coefficients")
{
    JetChart c({"t"}, {"y"}, 1);
    Expr y = sym("y");
    ThirdOrder e = third_order_coefficients({y}, c);
    CHECK(is_zero(e.d2[0] - y));
    CHECK(is_zero(e.d3[0] - y));
    ThirdOrder q = third_order_coefficients({y * y}, c);
    CHECK(is_zero(q.d2[0] - Expr(2) * pow(y, Number(3))));
    CHECK(is_zero(q.d3[0] - Expr(6) * pow(y, Number(4))));

    // Exact flows: y e^s and y / (1 - s y).
    auto gap = [&](const ThirdOrder& k, double y0, double s, double exact) {
        Bindings b{{"y", y0}, {"t", 0.0}};
        double taylor = y0 + s * evaluate(k.d1[0], b) + s * s / 2 * evaluate(k.d2[0], b) +
                        s * s * s / 6 * evaluate(k.d3[0], b);
        return std::fabs(exact - taylor);
    };
    double y0 = 0.7;
    double g1 = gap(e, y0, 1e-1, y0 * std::exp(1e-1)), g2 = gap(e, y0, 1e-2, y0 * std::exp(1e-2));
    CHECK(slope(g1, g2, 1e-1, 1e-2) >= 3.9);
    double h1 = gap(q, y0, 1e-1, y0 / (1 - 1e-1 * y0)), h2 = gap(q, y0, 1e-2, y0 / (1 - 1e-2 * y0));
    CHECK(slope(h1, h2, 1e-1, 1e-2) >= 3.9);

    CHECK_THROWS_AS(third_order_coefficients({sym("y_t")}, c), Error);
}
