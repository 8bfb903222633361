#include "doctest.h"

#include <cmath>
#include <random>
#include <set>

#include "jetvar/error.hpp"
#include "jetvar/jet.hpp"
#include "support.hpp"

using namespace jetvar;

namespace {

std::set<std::string> names_of(const JetChart& c)
{
    std::set<std::string> out;
    for (const auto& s : c.symbols()) out.insert(s.name);
    return out;
}

Expr sym(const char* s) { return Expr::symbol(s); }

ErrorKind kind_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error thrown");
    return ErrorKind::InvalidArgument;
}

} // namespace

TEST_CASE("make_chart symbol sets")
{
    CHECK(names_of(JetChart::make(1, 1, 2)) == std::set<std::string>{"t", "y", "y_t", "y_tt"});
    JetChart mech({"t"}, {"x1", "x2"}, 1);
    CHECK(names_of(mech) == std::set<std::string>{"t", "x1", "x2", "x1_t", "x2_t"});
    JetChart plane = JetChart::make(2, 1, 2);
    CHECK(plane.fiber_jets(2).size() - plane.fiber_jets(1).size() == 3);
    JetChart big = JetChart::make(3, 2, 2);
    CHECK(big.fiber_jets(2).size() - big.fiber_jets(1).size() == 2 * 3 * 4 / 2);
    CHECK(kind_of([] { JetChart::make(1, 1, 5); }) == ErrorKind::UnsupportedOrder);
    CHECK(kind_of([] { JetChart::make(0, 1, 1); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("composite_extend adds mixed jets")
{
    JetChart c = composite_extend(JetChart::make(1, 1, 1));
    std::set<std::string> added;
    for (const auto* s : c.composite_symbols()) added.insert(s->name);
    CHECK(added == std::set<std::string>{"X", "X_t", "X_y", "X_tt", "X_ty", "X_yy"});
    // two fibers over one base: z^a, z^a_mu, z^a_i, then the four kinds of second jets
    JetChart c2 = composite_extend(JetChart({"t"}, {"x1", "x2"}, 1));
    CHECK(c2.composite_symbols().size() == 2 * (1 + (1 + 2) + (1 + 2 + 3)));
    CHECK(c2.has("Xx1_tx2"));
    CHECK(kind_of([&] { composite_extend(c); }) == ErrorKind::AlreadyComposite);
}

TEST_CASE("multiplicity and sym_partial")
{
    CHECK(multiplicity({1, 1}) == 2);
    CHECK(multiplicity({2, 0}) == 1);
    CHECK(multiplicity({2, 1, 1}) == 12);
    JetChart c({"t", "x"}, {"phi"}, 2);
    Expr e = sym("phi_tx") * sym("phi_tx");
    CHECK(chart_partial(e, "phi_tx", c) == Expr(2) * sym("phi_tx"));
    CHECK(sym_partial(e, "phi_tx", c) == sym("phi_tx"));
    CHECK(kind_of([&] { chart_partial(e, "psi", c); }) == ErrorKind::UnknownSymbol);
}

TEST_CASE("total derivative examples")
{
    JetChart c = JetChart::make(1, 1, 2);
    CHECK(total_derivative(sym("y"), 0, c) == sym("y_t"));
    CHECK(total_derivative(sym("t") * sym("y"), 0, c) == sym("y") + sym("t") * sym("y_t"));
    CHECK(kind_of([&] { total_derivative(sym("y_tt"), 0, c); }) == ErrorKind::OrderOverflow);

    JetChart comp = composite_extend(JetChart({"t"}, {"x1", "x2"}, 2));
    Expr dX = total_derivative(sym("Xx1"), 0, comp);
    CHECK(dX == sym("Xx1_t") + sym("x1_t") * sym("Xx1_x1") + sym("x2_t") * sym("Xx1_x2"));

    // second composite derivative, one fiber: z_tt + 2 z_ty y_t + y_t^2 z_yy + y_tt z_y
    JetChart c1 = composite_extend(JetChart::make(1, 1, 2));
    Expr d2 = total_derivative(total_derivative(sym("X"), 0, c1), 0, c1);
    Expr expect = sym("X_tt") + Expr(2) * sym("X_ty") * sym("y_t") + sym("y_t") * sym("y_t") * sym("X_yy") +
                  sym("y_tt") * sym("X_y");
    CHECK(d2 == expect);
}

TEST_CASE("total derivative is a derivation and commutes")
{
    JetChart c({"t", "x"}, {"u", "v"}, 3);
    std::mt19937_64 rng(11);
    std::vector<std::string> names{"t", "x", "u", "v", "u_t", "v_x"};
    for (int k = 0; k < 20; ++k) {
        Expr a = testsupport::random_expr(rng, names, 2);
        Expr b = testsupport::random_expr(rng, names, 2);
        CHECK(total_derivative(a * b, 1, c) == total_derivative(a, 1, c) * b + a * total_derivative(b, 1, c));
        CHECK(total_derivative(total_derivative(a, 0, c), 1, c) ==
              total_derivative(total_derivative(a, 1, c), 0, c));
    }
    JetChart comp = composite_extend(JetChart({"t", "x"}, {"u"}, 3));
    Expr z = sym("X") * sym("u") + sym("X_u") * sym("t");
    CHECK(is_zero(total_derivative(total_derivative(z, 0, comp), 1, comp) -
                  total_derivative(total_derivative(z, 1, comp), 0, comp)));
}

TEST_CASE("prolong_vertical_field examples")
{
    JetChart c = JetChart::make(1, 1, 2);
    auto p = prolong_vertical_field({Expr(1)}, 2, c);
    CHECK(p.at("X") == Expr(1));
    CHECK(p.at("X_t") == Expr(0));
    CHECK(p.at("X_tt") == Expr(0));
    auto q = prolong_vertical_field({sym("y")}, 1, JetChart::make(1, 1, 1));
    CHECK(q.at("X") == sym("y"));
    CHECK(q.at("X_t") == sym("y_t"));

    JetChart plane({"t"}, {"x1", "x2"}, 2);
    auto r = prolong_vertical_field({-sym("x2"), sym("x1")}, 2, plane);
    // d_t(-x2) = -x2_t, d_t(x1) = x1_t by hand
    CHECK(r.at("Xx1") == -sym("x2"));
    CHECK(r.at("Xx1_t") == -sym("x2_t"));
    CHECK(r.at("Xx2_t") == sym("x1_t"));
    CHECK(r.at("Xx1_tt") == -sym("x2_tt"));

    // prolongation may exceed the chart order
    auto deep = prolong_vertical_field({sym("y") * sym("y")}, 4, JetChart::make(1, 1, 2));
    CHECK(deep.count("X_tttt") == 1);
    CHECK(kind_of([&] { prolong_vertical_field({sym("y_t")}, 1, c); }) == ErrorKind::JetDependence);
}

TEST_CASE("prolonged action pairs with raw partials")
{
    JetChart c({"t", "x"}, {"u"}, 2);
    Expr e = sym("u_tx") * sym("u_tx") + sym("u") * sym("u_x");
    auto p = prolong_vertical_field({sym("u")}, 2, c);
    // J^2X(e) with X = u equals the s-derivative of e(e^s u) at s = 0, i.e. 2 e for this quadratic e
    CHECK(prolonged_action(e, p, c) == Expr(2) * e);
}

TEST_CASE("numeric_jet examples")
{
    JetChart c = JetChart::make(1, 1, 2);
    Expr t = sym("t");
    auto b = numeric_jet(SectionSamples::analytic({t * t}), c, {1.0}, 2);
    CHECK(b.at("y") == 1.0);
    CHECK(b.at("y_t") == 2.0);
    CHECK(b.at("y_tt") == 2.0);

    JetChart mech({"t"}, {"x1", "x2"}, 1);
    auto e = numeric_jet(SectionSamples::analytic({cos(t), sin(t)}), mech, {0.0}, 1);
    CHECK(e.at("x1") == 1.0);
    CHECK(e.at("x2") == 0.0);
    CHECK(e.at("x1_t") == doctest::Approx(0.0));
    CHECK(e.at("x2_t") == 1.0);

    // tabulated and callable agree with the analytic closure
    std::vector<double> ts, dummy;
    std::vector<std::vector<double>> vs;
    for (int k = 0; k <= 400; ++k) {
        double tk = -1.0 + 2.0 * k / 400;
        ts.push_back(tk);
        vs.push_back({std::sin(2 * tk) * std::exp(tk / 3)});
    }
    auto tab = SectionSamples::tabulated(ts, vs);
    auto cal = SectionSamples::callable([](const std::vector<double>& x) {
        return std::vector<double>{std::sin(2 * x[0]) * std::exp(x[0] / 3)};
    }, 1);
    auto ana = SectionSamples::analytic({sin(Expr(2) * t) * exp(t / Expr(3))});
    for (double x : {-0.97, -0.3, 0.123, 0.8, 1.0}) {
        auto a = numeric_jet(ana, c, {x}, 2);
        auto bt = numeric_jet(tab, c, {x}, 2);
        auto bc = numeric_jet(cal, c, {x}, 2);
        for (const char* k : {"y", "y_t", "y_tt"}) {
            CHECK(std::fabs(a.at(k) - bt.at(k)) <= 1e-6);
            CHECK(std::fabs(a.at(k) - bc.at(k)) <= 1e-6);
        }
    }
    CHECK(kind_of([&] { numeric_jet(tab, c, {1.5}, 1); }) == ErrorKind::Domain);
}

TEST_CASE("chain-rule consistency along sections")
{
    JetChart c({"t"}, {"y1", "y2"}, 2);
    Expr t = sym("t");
    auto s = SectionSamples::analytic({sin(t) + t * t, exp(t / Expr(2))});
    std::mt19937_64 rng(3);
    std::vector<std::string> names{"t", "y1", "y2", "y1_t", "y2_t"};
    for (int k = 0; k < 15; ++k) {
        Expr e = testsupport::random_expr(rng, names, 3);
        Expr de = total_derivative(e, 0, c);
        for (double x : {-0.5, 0.4}) {
            const double h = 1e-5;
            double fd = (evaluate(e, numeric_jet(s, c, {x + h}, 1)) - evaluate(e, numeric_jet(s, c, {x - h}, 1))) /
                        (2 * h);
            double an = evaluate(de, numeric_jet(s, c, {x}, 2));
            CHECK(std::fabs(an - fd) <= 1e-4 * (1 + std::fabs(an)));
        }
    }
}

TEST_CASE("prolongation naturality along a section")
{
    JetChart c({"t"}, {"y1", "y2"}, 2);
    Expr t = sym("t");
    Expr y1 = sin(t), y2 = t * t * t - t;
    auto s = SectionSamples::analytic({y1, y2});
    std::vector<Expr> X{sym("y1") * sym("y2") + sym("t"), cos(sym("y1"))};
    auto p = prolong_vertical_field(X, 2, c);
    SubstitutionMap along{{"y1", y1}, {"y2", y2}};
    for (int i = 0; i < 2; ++i) {
        Expr Xt = substitute(X[i], along);  // X evaluated along the section, a function of t
        std::string base = i == 0 ? "Xx1" : "Xx2";
        (void)base;
        const char* n0 = i == 0 ? "Xy1" : "Xy2";
        const char* n2 = i == 0 ? "Xy1_tt" : "Xy2_tt";
        for (double x : {-0.7, 0.2, 1.1}) {
            auto jb = numeric_jet(s, c, {x}, 2);
            CHECK(std::fabs(evaluate(p.at(n0), jb) - evaluate(Xt, {{"t", x}})) <= 1e-12);
            double direct = evaluate(partial(partial(Xt, "t"), "t"), {{"t", x}});
            CHECK(std::fabs(evaluate(p.at(n2), jb) - direct) <= 1e-6);
        }
    }
}

TEST_CASE("composite jets from analytic composite sections")
{
    JetChart c = composite_extend(JetChart::make(1, 1, 1));
    Expr t = sym("t"), y = sym("y");
    auto s = SectionSamples::analytic({t * t}, {t * y * y});
    auto b = numeric_jet(s, c, {2.0}, 1);
    // z = t y^2 at y = 4: z = 32, z_t = 16, z_y = 16, z_ty = 8, z_yy = 4, z_tt = 0
    CHECK(b.at("X") == 32.0);
    CHECK(b.at("X_t") == 16.0);
    CHECK(b.at("X_y") == 16.0);
    CHECK(b.at("X_ty") == 8.0);
    CHECK(b.at("X_yy") == 4.0);
    CHECK(b.at("X_tt") == 0.0);
    // d_t z along the section equals the derivative of t -> z(t, y(t)) = t^5
    Expr dz = total_derivative(sym("X"), 0, c);
    CHECK(evaluate(dz, b) == doctest::Approx(5 * 16.0));
}
