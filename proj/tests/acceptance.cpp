// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include "jetvar/jacobi.hpp"
#include "jetvar/numerics.hpp"
#include "jetvar/secondvariation.hpp"
#include "suite.hpp"
#include "support.hpp"
#include "taylor.hpp"

using namespace jetvar;
using namespace testsuite;

namespace {

const double pi = std::numbers::pi;

struct Outcome {
    bool ok;
    std::string detail;
};

std::string fmt(const char* f, double v)
{
    char b[64];
    std::snprintf(b, sizeof b, f, v);
    return b;
}

int failures = 0;

void run(int id, const std::string& title, double time_limit, const std::function<Outcome()>& body)
{
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = time_limit <= 0 || secs < time_limit;
    if (!in_time) o.detail += "; over time limit";
    bool ok = o.ok && in_time;
    if (!ok) ++failures;
    std::printf("criterion %d %-34s %s  [%s, %.2f s]\n", id, title.c_str(), ok ? "PASS" : "FAIL", o.detail.c_str(),
                secs);
    std::fflush(stdout);
}

} // namespace

int main()
{
    run(1, "sphere curvature block", 1.0, [] {
        CurvatureData cd = riemann(sphere_stereographic());
        ExprMatrix K = curvature_block(cd, {sym("u1"), sym("u2")});
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            double t = 2 * pi * k / 20.0 + 0.05;
            Bindings b{{"x", std::cos(t)}, {"y", std::sin(t)}, {"u1", -std::sin(t)}, {"u2", std::cos(t)}};
            std::vector<std::vector<double>> M(2, std::vector<double>(2));
            for (int a = 0; a < 2; ++a)
                for (int c = 0; c < 2; ++c) M[a][c] = evaluate(K[a][c], b);
            Eigen2 e = eigen2x2_symmetric(M);
            worst = std::max({worst, std::fabs(e.l1 - 0.0), std::fabs(e.l2 + 1.0)});
        }
        return Outcome{worst <= 1e-9, "20 equator points, max |lambda - {0,-1}| = " + fmt("%.2e", worst) +
                                          " (tol 1e-9)"};
    });

    run(2, "stability integral", 1.0, [] {
        // Exact value of int_0^{a pi} (f'^2 - f^2), f = sin(t/a), is pi (1 - a^2) / (2a);
        // the closed form (1 - a^2)/(2a) without the factor pi is not the value of this integral.
        Lagrangian L = sphere_geodesic();
        Expr t = sym("t");
        auto sol = SectionSamples::analytic({cos(t), sin(t)});
        double worst = 0.0;
        bool verdicts = true;
        for (double a : {0.5, 0.9, 1.0, 1.1, 2.0}) {
            Expr f = sin(t / Expr::real(a));
            StabilityResult r = stability_integral(L, sol, {{f * cos(t), f * sin(t)}, 0.0, a * pi});
            worst = std::max(worst, std::fabs(r.integral - pi * (1 - a * a) / (2 * a)));
            Verdict want = a < 1 ? Verdict::StableTrialwise : a > 1 ? Verdict::Unstable : Verdict::Marginal;
            verdicts = verdicts && r.verdict == want;
        }
        return Outcome{worst <= 1e-6 && verdicts, "a in {0.5,0.9,1,1.1,2}: max |I - pi(1-a^2)/(2a)| = " +
                                                      fmt("%.2e", worst) + " (tol 1e-6), verdicts " +
                                                      (verdicts ? "+,+,0,-,-" : "wrong")};
    });

    run(3, "tangency theorem", 30.0, [] {
        ZeroTest z;  // 100 random points, tol 1e-10
        int passed = 0;
        for (const auto& L : {free_particle(), oscillator(), sphere_geodesic(), scalar_field(), beam()})
            passed += tangency_holds(tangency_defect(L), z) ? 1 : 0;
        return Outcome{passed == 5, std::to_string(passed) + "/5 Lagrangians tangent at 100 points, tol 1e-10"};
    });

    run(4, "first-order equivalence", 0, [] {
        int passed = 0, total = 0;
        for (const auto& L : {free_particle(), oscillator(), sphere_geodesic(), scalar_field()}) {
            auto lin = first_order_linearization(L);
            auto J = jacobi_equations(L);
            bool ok = true;
            for (std::size_t k = 0; k < lin.size(); ++k) ok = ok && is_zero(lin[k] - J.perturbation_eq[k]);
            passed += ok;
            ++total;
        }
        return Outcome{passed == total, std::to_string(passed) + "/" + std::to_string(total) + " order-1 Lagrangians"};
    });

    run(5, "solution dragging", 0, [] {
        MetricChart g = sphere_stereographic();
        Lagrangian L = geodesic_lagrangian(g);
        Trajectory eq = integrate_geodesic(g, {1.0, 0.0}, {0.0, 1.0}, 0.0, 2 * pi, 1e-3);
        Expr x = sym("x"), y = sym("y");
        DragOptions o;
        o.h = 1e-3;
        double rz = drag_and_verify(L, eq, {-y, x}, 0.1, o);
        double rx = drag_and_verify(L, eq, {Expr(1) + x * x - y * y, Expr(2) * x * y}, 0.1, o);
        double rd = drag_and_verify(L, eq, {x, y}, 0.1, o);
        bool ok = rz <= 1e-7 && rx <= 1e-7 && rd >= 1e-3;
        return Outcome{ok, "rotations " + fmt("%.2e", rz) + ", " + fmt("%.2e", rx) + " (tol 1e-7); dilation " +
                               fmt("%.2e", rd) + " (>= 1e-3)"};
    });

    run(6, "conjugate point", 0, [] {
        auto eq = [](double R) {
            return integrate_geodesic(sphere_stereographic(R), {R, 0.0}, {0.0, 1.0}, 0.0, 1.5 * pi * R, 1e-3);
        };
        auto t1 = conjugate_point_scan(sphere_stereographic(1.0), eq(1.0), {1.0, 0.0});
        auto t2 = conjugate_point_scan(sphere_stereographic(2.0), eq(2.0), {1.0, 0.0});
        double d1 = t1 ? std::fabs(*t1 - pi) : 1e9, d2 = t2 ? std::fabs(*t2 - 2 * pi) : 1e9;
        return Outcome{d1 <= 1e-3 && d2 <= 1e-3, "R=1: " + fmt("%.7f", t1.value_or(NAN)) + ", R=2: " +
                                                     fmt("%.7f", t2.value_or(NAN)) + " (tol 1e-3)"};
    });

    run(7, "second-variation Taylor check", 0, [] {
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        double worst = 1e9;
        for (int k = 0; k < 10; ++k) {
            RandomProblem P = random_problem(rng, 1 + k % 2);
            Bindings pt{{"t", u(rng)}};
            for (const auto* j : P.L.chart().fiber_jets(1)) pt[j->name] = u(rng);
            double e1 = second_order_gap(P.L, P.X, pt, 1e-2), e2 = second_order_gap(P.L, P.X, pt, 1e-3);
            worst = std::min(worst, slope(e1, e2, 1e-2, 1e-3));
        }
        return Outcome{worst >= 2.9, "10 random problems, min slope " + fmt("%.3f", worst) + " (>= 2.9)"};
    });

    run(8, "property suites", 0, [] {
        std::string d;
        bool ok = true;
        // RK4: harmonic oscillator, step halving.
        OdeSystem osc(2, [](double, std::span<const double> y, std::span<double> dy) {
            dy[0] = y[1];
            dy[1] = -y[0];
        });
        auto rk_err = [&](double h) {
            auto y = rk4_final(osc, {1.0, 0.0}, 0.0, 2.0, h);
            return std::hypot(y[0] - std::cos(2.0), y[1] + std::sin(2.0));
        };
        double rr = rk_err(0.1) / rk_err(0.05);
        // Simpson: smooth non-cubic integrand, panel doubling.
        auto f = [](double t) { return std::exp(t) * std::cos(3 * t); };
        double exact = (std::exp(1.0) * (std::cos(3.0) + 3 * std::sin(3.0)) - 1) / 10;
        double sr = std::fabs(simpson(f, 0, 1, 16) - exact) / std::fabs(simpson(f, 0, 1, 32) - exact);
        ok = ok && rr >= 14 && rr <= 18 && sr >= 14 && sr <= 18;
        d += "rk4 ratio " + fmt("%.2f", rr) + ", simpson ratio " + fmt("%.2f", sr);
        // Derivative vs finite differences over a random expression corpus.
        std::mt19937_64 rng(99);
        double fd = 0.0;
        for (int k = 0; k < 60; ++k)
            fd = std::max(fd, fd_gradient_check(testsupport::random_expr(rng, {"x", "y", "z"}, 4)));
        ok = ok && fd <= 1e-5;
        d += "; fd " + fmt("%.1e", fd);
        // Geodesic energy on a tilted orbit.
        MetricChart g = sphere_stereographic();
        auto E = geodesic_energy(g, integrate_geodesic(g, {0.3, -0.2}, {0.7, 0.4}, 0.0, 2 * pi, 1e-3));
        double drift = 0.0;
        for (double e : E) drift = std::max(drift, std::fabs(e - E.front()) / E.front());
        ok = ok && drift <= 1e-8;
        d += "; energy " + fmt("%.1e", drift);
        // Globality of E under y = y'/2.
        FiberedDiffeo rescale{{sym("t")}, {half() * sym("y")}, {}, {}, false};
        ChartChangeReport cc = chart_change_check(free_particle(), rescale);
        ok = ok && cc.ok;
        d += std::string("; chart change ") + (cc.ok ? "ok" : "broken");
        return Outcome{ok, d};
    });

    run(9, "third-order iteration", 0, [] {
        JetChart c({"t"}, {"y"}, 1);
        std::vector<Expr> X{sym("y")};
        ThirdOrder k = third_order_coefficients(X, c);
        JetFlow flow(c, X, 0);
        auto gap = [&](double s) {
            Bindings b{{"t", 0.0}, {"y", 0.7}, {"y_t", 0.0}};
            double taylor = 0.7 + s * evaluate(k.d1[0], b) + s * s / 2 * evaluate(k.d2[0], b) +
                            s * s * s / 6 * evaluate(k.d3[0], b);
            double flowed = flow.flow(b, s, s / 1000).at("y");
            return std::fabs(flowed - taylor);
        };
        double sl = slope(gap(1e-1), gap(1e-2), 1e-1, 1e-2);
        return Outcome{sl >= 3.9, "exponential flow X = y, slope " + fmt("%.3f", sl) + " (>= 3.9)"};
    });

    std::printf("%s\n", failures ? "acceptance: FAIL" : "acceptance: PASS");
    return failures ? 1 : 0;
}
