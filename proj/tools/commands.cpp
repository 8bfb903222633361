#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>

#include "json.hpp"

#include "jetvar/catalog.hpp"
#include "jetvar/error.hpp"
#include "jetvar/jacobi.hpp"
#include "jetvar/numerics.hpp"
#include "jetvar/secondvariation.hpp"

namespace jetvar::cli {

using json = nlohmann::ordered_json;

namespace {

const double pi = std::numbers::pi;

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// Rounding noise below 1e-12 is shown as 0 so reports stay readable.
std::string snapped(double v) { return num(std::fabs(v) < 1e-12 ? 0.0 : v); }

const char* pass(bool ok) { return ok ? "PASS" : "FAIL"; }

std::string joined(const std::vector<std::string>& v)
{
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : " ") + x;
    return s;
}

ZeroTest zero_test(const ProblemSpec* spec, const RunOptions& o)
{
    ZeroTest z;
    if (o.tol) z.tol = *o.tol;
    else if (spec && spec->tol) z.tol = *spec->tol;
    if (o.seed) z.seed = *o.seed;
    else if (spec && spec->seed) z.seed = *spec->seed;
    return z;
}

double step(const ProblemSpec* spec, const RunOptions& o)
{
    return o.h ? *o.h : spec && spec->h ? *spec->h : 1e-3;
}

int panel_count(const ProblemSpec* spec, const RunOptions& o)
{
    return o.panels ? *o.panels : spec && spec->panels ? *spec->panels : 10000;
}

std::string multi_label(const JetChart& c, int i, const std::vector<int>& dirs)
{
    std::string s = "[" + c.fiber_names()[i];
    if (!dirs.empty()) {
        s += ";";
        for (std::size_t k = 0; k < dirs.size(); ++k) s += (k ? "," : "") + c.base_names()[dirs[k]];
    }
    return s + "]";
}

// Emits a two-column key/value section in either format.
struct Section {
    std::string title;
    std::vector<std::pair<std::string, std::string>> rows;
};

void emit(std::ostream& os, const RunOptions& o, const std::string& command, const json& head,
          const std::vector<Section>& sections, const std::vector<std::pair<std::string, bool>>& checks,
          const json& extra = json::object())
{
    if (o.json) {
        json j;
        j["command"] = command;
        for (auto it = head.begin(); it != head.end(); ++it) j[it.key()] = it.value();
        for (const auto& s : sections) {
            json sec = json::object();
            for (const auto& [k, v] : s.rows) sec[k] = v;
            j[s.title] = sec;
        }
        for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
        json ch = json::object();
        for (const auto& [k, v] : checks) ch[k] = pass(v);
        j["checks"] = ch;
        os << j.dump(2) << "\n";
        return;
    }
    for (auto it = head.begin(); it != head.end(); ++it)
        os << it.key() << ": " << (it.value().is_string() ? it.value().get<std::string>() : it.value().dump()) << "\n";
    for (const auto& s : sections) {
        os << s.title << ":\n";
        for (const auto& [k, v] : s.rows) os << "  " << k << " = " << v << "\n";
    }
    for (auto it = extra.begin(); it != extra.end(); ++it)
        os << it.key() << ": " << (it.value().is_string() ? it.value().get<std::string>() : it.value().dump()) << "\n";
    for (const auto& [k, v] : checks) os << k << ": " << pass(v) << "\n";
}

json chart_head(const JetChart& c, int order)
{
    json h;
    h["base"] = joined(c.base_names());
    h["fibers"] = joined(c.fiber_names());
    h["order"] = order;
    if (!c.parameter_names().empty()) h["params"] = joined(c.parameter_names());
    return h;
}

bool all_pass(const std::vector<std::pair<std::string, bool>>& checks)
{
    for (const auto& c : checks)
        if (!c.second) return false;
    return true;
}

} // namespace

int cmd_derive(const ProblemSpec& spec, const RunOptions& o, std::ostream& os)
{
    Lagrangian L = problem_lagrangian(spec);
    const JetChart& c = L.chart();
    const int m = c.m(), n = c.n();
    Momenta P = momenta(L);
    EulerLagrangeForm E = euler_lagrange(L);

    Section mom{"momenta", {}}, el{"euler_lagrange", {}}, bd{"boundary", {}};
    for (int i = 0; i < n; ++i) {
        mom.rows.emplace_back("p" + multi_label(c, i, {}), to_sexpr(P.p[i]));
        for (int mu = 0; mu < m; ++mu) mom.rows.emplace_back("p" + multi_label(c, i, {mu}), to_sexpr(P.p_mu[i][mu]));
        if (L.order() == 2)
            for (int mu = 0; mu < m; ++mu)
                for (int nu = mu; nu < m; ++nu)
                    mom.rows.emplace_back("p" + multi_label(c, i, {mu, nu}), to_sexpr(P.p_munu[i][mu][nu]));
        el.rows.emplace_back("E[" + c.fiber_names()[i] + "]", to_sexpr(E.E[i]));
    }
    // Boundary form for a generic perturbation X with jets X_nu.
    JetChart d = c.doubled(c.order());
    for (int mu = 0; mu < m; ++mu) {
        std::vector<Expr> terms;
        for (int i = 0; i < n; ++i) {
            Expr coeff = P.p_mu[i][mu];
            if (L.order() == 2)
                for (int nu = 0; nu < m; ++nu) {
                    coeff -= total_derivative(P.p_munu[i][mu][nu], nu, c);
                    terms.push_back(P.p_munu[i][mu][nu] * d.jet(n + i, d.unit(nu)));
                }
            terms.push_back(coeff * d.fiber(n + i));
        }
        bd.rows.emplace_back("F[" + c.base_names()[mu] + "]", to_sexpr(add(std::move(terms))));
    }
    std::vector<std::pair<std::string, bool>> checks;
    if (!spec.field.empty()) {
        FirstVariation fv = first_variation(L, spec.field);
        std::vector<Expr> div{fv.variation, -fv.interior};
        for (int mu = 0; mu < m; ++mu) div.push_back(-total_derivative(fv.boundary[mu], mu, c));
        checks.emplace_back("first_variation_split", is_zero(add(div), zero_test(&spec, o)));
    }
    emit(os, o, "derive", chart_head(c, L.order()), {mom, el, bd}, checks);
    return all_pass(checks) ? 0 : 1;
}

int cmd_jacobi(const ProblemSpec& spec, const RunOptions& o, std::ostream& os)
{
    Lagrangian L = problem_lagrangian(spec);
    JacobiOptions jo;
    if (o.fault) jo.momentum_fault = 0.1;
    ZeroTest z = zero_test(&spec, o);
    JacobiLagrangian J = jacobi_lagrangian(L, jo);
    JacobiEquations eqs = jacobi_equations(L, jo);
    TangencyDefect td = tangency_defect(L, jo);
    const JetChart& c = L.chart();

    Section jl{"jacobi", {{"density", to_sexpr(J.density)}}};
    Section be{"base_eq", {}}, pe{"perturbation_eq", {}};
    for (int i = 0; i < c.n(); ++i) {
        be.rows.emplace_back("[" + c.fiber_names()[i] + "]", to_sexpr(eqs.base_eq[i]));
        pe.rows.emplace_back("[" + c.fiber_names()[i] + "]", to_sexpr(eqs.perturbation_eq[i]));
    }
    double worst = 0.0;
    bool tangent = true;
    for (const auto& d : td.defect) {
        double r = zero_test_residual(d, z);
        if (r < 0) tangent = false;
        worst = std::max(worst, std::fabs(r));
        tangent = tangent && r >= 0 && r <= z.tol;
    }
    std::vector<std::pair<std::string, bool>> checks;
    checks.emplace_back("homogeneity", is_zero(homogeneity_defect(J), z));
    checks.emplace_back("tangent_to_field_equations", tangent);
    if (L.order() == 1) {
        auto lin = first_order_linearization(L);
        bool same = true;
        for (std::size_t k = 0; k < lin.size(); ++k) same = same && is_zero(lin[k] - eqs.perturbation_eq[k], z);
        checks.emplace_back("first_order_equivalence", same);
    }
    json extra;
    extra["tangency_residual"] = num(worst);
    emit(os, o, "jacobi", chart_head(c, L.order()), {jl, be, pe}, checks, extra);
    return all_pass(checks) ? 0 : 1;
}

namespace {

void write_rows(const std::string& path, const std::string& header, const std::vector<std::vector<double>>& rows)
{
    std::ofstream f(path);
    if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write '" + path + "'");
    f << header << "\n";
    for (const auto& r : rows) {
        for (std::size_t k = 0; k < r.size(); ++k) f << (k ? "," : "") << num(r[k]);
        f << "\n";
    }
}

} // namespace

int cmd_stability(const ProblemSpec& spec, const RunOptions& o, std::ostream& os)
{
    Lagrangian L = problem_lagrangian(spec);
    const JetChart& c = L.chart();
    if (spec.solution.size() != static_cast<std::size_t>(c.n()))
        throw UsageError("stability needs a 'solution' with one component per fiber");
    if (!spec.interval) throw UsageError("stability needs an 'interval'");
    if (spec.trials.empty()) throw UsageError("stability needs at least one 'trial'");
    for (const auto& tr : spec.trials)
        if (tr.size() != spec.solution.size()) throw UsageError("each 'trial' needs one component per fiber");
    auto [t0, t1] = *spec.interval;
    SectionSamples sol = SectionSamples::analytic(spec.solution);
    StabilityOptions so;
    so.panels = panel_count(&spec, o);
    so.params = spec.param_values();

    Section ints{"trials", {}};
    json tr = json::array();
    bool unstable = false, all_marginal = true;
    for (std::size_t k = 0; k < spec.trials.size(); ++k) {
        StabilityResult r = stability_integral(L, sol, {spec.trials[k], t0, t1}, so);
        ints.rows.emplace_back("integral[" + std::to_string(k + 1) + "]", snapped(r.integral) + " " + to_string(r.verdict));
        unstable = unstable || r.verdict == Verdict::Unstable;
        all_marginal = all_marginal && r.verdict == Verdict::Marginal;
    }
    json extra;
    extra["verdict"] = unstable ? "unstable" : all_marginal ? "marginal" : "no instability found";

    auto g = problem_metric(spec);
    if (g && g->dim() == 2) {
        const std::string& t = c.base_names()[0];
        Bindings at{{t, t0}};
        for (const auto& [k, v] : spec.param_values()) at[k] = v;
        std::vector<double> x0, u0;
        for (const auto& e : spec.solution) {
            x0.push_back(evaluate(e, at));
            u0.push_back(evaluate(partial(e, t), at));
        }
        double h = step(&spec, o);
        Trajectory geo = integrate_geodesic(*g, x0, u0, t0, t1, h);
        auto tc = conjugate_point_scan(*g, geo, {}, {h, 1e-6});
        extra["conjugate_point"] = tc ? num(*tc) : "none";
        auto track = curvature_eigen_track(*g, geo, std::max(1, static_cast<int>(geo.size() / 100)));
        double lmin = 0.0;
        for (const auto& r : track) lmin = std::min(lmin, r[2]);
        extra["min_curvature_eigenvalue"] = num(lmin);
        if (!o.out_dir.empty()) {
            std::filesystem::create_directories(o.out_dir);
            write_rows(o.out_dir + "/eigen_track.csv", "t,lambda1,lambda2", track);
            std::ofstream f(o.out_dir + "/geodesic.csv");
            std::vector<std::string> names = g->coords();
            for (const auto& x : g->coords()) names.push_back("u_" + x);
            geo.write_csv(f, names);
        }
    }
    emit(os, o, "stability", chart_head(c, L.order()), {ints}, {}, extra);
    return 0;
}

int cmd_demo_sphere(const RunOptions& o, std::ostream& os)
{
    const double R = o.radius;
    MetricChart g = sphere_stereographic(R);
    Lagrangian L = geodesic_lagrangian(g);
    const double h = step(nullptr, o);
    std::vector<std::pair<std::string, bool>> checks;
    json extra;

    // Curvature block on the equator (R cos(t/R), R sin(t/R)); expected eigenvalues 0 and -1/R^2.
    CurvatureData cd = riemann(g);
    ExprMatrix K = curvature_block(cd, {Expr::symbol("u1"), Expr::symbol("u2")});
    double worst = 0.0, l1 = 0.0, l2 = 0.0;
    for (int k = 0; k < 20; ++k) {
        double t = 2 * pi * R * k / 20.0;
        Bindings b{{"x", R * std::cos(t / R)}, {"y", R * std::sin(t / R)}, {"u1", -std::sin(t / R)}, {"u2", std::cos(t / R)}};
        std::vector<std::vector<double>> M(2, std::vector<double>(2));
        for (int a = 0; a < 2; ++a)
            for (int c = 0; c < 2; ++c) M[a][c] = evaluate(K[a][c], b);
        M[0][1] = M[1][0] = 0.5 * (M[0][1] + M[1][0]);
        Eigen2 e = eigen2x2_symmetric(M);
        worst = std::max({worst, std::fabs(e.l1), std::fabs(e.l2 + 1 / (R * R))});
        l1 = e.l1;
        l2 = e.l2;
    }
    extra["eigenvalues"] = snapped(l1) + " " + snapped(l2);
    checks.emplace_back("eigenvalues", worst <= 1e-9);

    // Trial integrals along the equator, f = sin(t/(aR)) on [0, a pi R].
    Expr t = Expr::symbol("t");
    auto sol = SectionSamples::analytic({Expr::real(R) * cos(t / Expr::real(R)), Expr::real(R) * sin(t / Expr::real(R))});
    std::vector<double> as = o.a ? std::vector<double>{*o.a} : std::vector<double>{0.5, 2.0};
    StabilityOptions so;
    so.panels = panel_count(nullptr, o);
    for (double a : as) {
        Expr f = sin(t / Expr::real(a * R));
        Expr nx = cos(t / Expr::real(R)), ny = sin(t / Expr::real(R));
        StabilityResult r = stability_integral(L, sol, {{f * nx, f * ny}, 0.0, a * pi * R}, so);
        double want = pi * (1 - a * a) / (2 * a * R);
        Verdict wv = classify(want, a * pi * R);
        if (std::fabs(a - 1) < 1e-12) wv = Verdict::Marginal;
        extra["integral[a=" + num(a) + "]"] = snapped(r.integral) + " " + to_string(r.verdict);
        checks.emplace_back("integral[a=" + num(a) + "]", std::fabs(r.integral - want) <= 1e-6 && r.verdict == wv);
    }

    // First conjugate point along the equator.
    Trajectory geo = integrate_geodesic(g, {R, 0.0}, {0.0, 1.0}, 0.0, 1.5 * pi * R, h);
    auto tc = conjugate_point_scan(g, geo, {}, {h, 1e-6});
    extra["conjugate_point"] = tc ? num(*tc) : "none";
    checks.emplace_back("conjugate_point", tc && std::fabs(*tc - pi * R) <= 1e-3);

    // Dragging the equator by isometries and by a dilation.
    Trajectory eq = integrate_geodesic(g, {R, 0.0}, {0.0, 1.0}, 0.0, 2 * pi * R, h);
    Expr x = Expr::symbol("x"), y = Expr::symbol("y"), R2 = Expr::real(R * R);
    DragOptions dopt;
    dopt.h = h;
    double rz = drag_and_verify(L, eq, {-y, x}, 0.1, dopt);
    double rx = drag_and_verify(L, eq, {R2 + x * x - y * y, Expr(2) * x * y}, 0.1, dopt);
    double rd = drag_and_verify(L, eq, {x, y}, 0.1, dopt);
    extra["drag_residual"] = num(std::max(rz, rx));
    extra["drag_residual_dilation"] = num(rd);
    checks.emplace_back("drag_isometries", rz <= 1e-7 && rx <= 1e-7);
    checks.emplace_back("drag_dilation_control", rd >= 1e-3);

    json head;
    head["radius"] = num(R);
    emit(os, o, "demo-sphere", head, {}, checks, extra);
    return all_pass(checks) ? 0 : 1;
}

int cmd_selfcheck(const RunOptions& o, std::ostream& os)
{
    using Check = std::pair<std::string, std::function<std::pair<bool, std::string>()>>;
    ZeroTest z = zero_test(nullptr, o);
    std::vector<Check> suite;

    suite.emplace_back("exprcore.derivatives", [] {
        Expr x = Expr::symbol("x"), y = Expr::symbol("y");
        double e = std::max(fd_gradient_check(x * x * y - Expr(3) * pow(y, Number(3)) + Expr(7)),
                            fd_gradient_check(sin(x * y) + cos(y) * exp(x / Expr(2))));
        for (const auto& r : euler_lagrange(catalog::sphere_geodesic()).E) e = std::max(e, fd_gradient_check(r));
        return std::make_pair(e <= 1e-5, num(e));
    });
    suite.emplace_back("exprcore.serialization", [] {
        bool ok = true;
        for (const auto& r : euler_lagrange(catalog::sphere_geodesic()).E)
            ok = ok && from_sexpr(to_sexpr(r)) == r && parse_infix(to_infix(r)) == r;
        return std::make_pair(ok, std::string(ok ? "round trip" : "mismatch"));
    });
    suite.emplace_back("jetspace.commuting_total_derivatives", [z] {
        JetChart c({"t", "x"}, {"phi"}, 3);
        Expr e = sin(Expr::symbol("phi")) * Expr::symbol("phi_x") * Expr::symbol("t");
        Expr d = total_derivative(total_derivative(e, 0, c), 1, c) - total_derivative(total_derivative(e, 1, c), 0, c);
        bool ok = is_zero(d, z);
        return std::make_pair(ok, std::string(ok ? "zero" : "nonzero"));
    });
    suite.emplace_back("variational.chart_change", [] {
        FiberedDiffeo rescale{{Expr::symbol("t")}, {Expr::rational(1, 2) * Expr::symbol("y")}, {}, {}, false};
        ChartChangeReport r = chart_change_check(catalog::free_particle(), rescale);
        return std::make_pair(r.ok, num(r.max_defect));
    });
    suite.emplace_back("jacobi.tangency", [z, &o] {
        JacobiOptions jo;
        if (o.fault) jo.momentum_fault = 0.1;
        bool ok = true;
        for (const auto& L : {catalog::free_particle(), catalog::oscillator(), catalog::sphere_geodesic(),
                              catalog::scalar_field(), catalog::beam()})
            ok = ok && tangency_holds(tangency_defect(L, jo), z);
        return std::make_pair(ok, std::string(ok ? "tangent" : "not tangent"));
    });
    suite.emplace_back("jacobi.first_order_equivalence", [z] {
        bool ok = true;
        for (const auto& L : {catalog::free_particle(), catalog::oscillator(), catalog::sphere_geodesic(),
                              catalog::scalar_field()}) {
            auto lin = first_order_linearization(L);
            auto J = jacobi_equations(L);
            for (std::size_t k = 0; k < lin.size(); ++k) ok = ok && is_zero(lin[k] - J.perturbation_eq[k], z);
        }
        return std::make_pair(ok, std::string(ok ? "equal" : "differ"));
    });
    suite.emplace_back("secondvariation.equator_trials", [] {
        Lagrangian L = catalog::sphere_geodesic();
        Expr t = Expr::symbol("t");
        auto sol = SectionSamples::analytic({cos(t), sin(t)});
        double worst = 0.0;
        bool ok = true;
        for (double a : {0.5, 2.0}) {
            Expr f = sin(t / Expr::real(a));
            auto r = stability_integral(L, sol, {{f * cos(t), f * sin(t)}, 0.0, a * pi});
            worst = std::max(worst, std::fabs(r.integral - pi * (1 - a * a) / (2 * a)));
            ok = ok && r.verdict == (a < 1 ? Verdict::StableTrialwise : Verdict::Unstable);
        }
        return std::make_pair(ok && worst <= 1e-6, num(worst));
    });
    suite.emplace_back("riemann.identities", [z] {
        CurvatureData cd = riemann(sphere_stereographic());
        bool ok = true;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int c = 0; c < 2; ++c)
                    for (int d = 0; d < 2; ++d)
                        ok = ok && is_zero(cd.R[a][b][c][d] + cd.R[a][c][d][b] + cd.R[a][d][b][c], z) &&
                             is_zero(cd.Rlow[a][b][c][d] + cd.Rlow[b][a][c][d], z);
        return std::make_pair(ok, std::string(ok ? "bianchi and antisymmetry" : "violated"));
    });
    suite.emplace_back("riemann.equator_eigenvalues", [] {
        ExprMatrix K = curvature_block(riemann(sphere_stereographic()), {Expr::symbol("u1"), Expr::symbol("u2")});
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            double t = 0.3 * k;
            Bindings b{{"x", std::cos(t)}, {"y", std::sin(t)}, {"u1", -std::sin(t)}, {"u2", std::cos(t)}};
            double off = 0.5 * (evaluate(K[0][1], b) + evaluate(K[1][0], b));
            Eigen2 e = eigen2x2_symmetric({{evaluate(K[0][0], b), off}, {off, evaluate(K[1][1], b)}});
            worst = std::max({worst, std::fabs(e.l1), std::fabs(e.l2 + 1)});
        }
        return std::make_pair(worst <= 1e-9, num(worst));
    });
    suite.emplace_back("numerics.rk4_order", [] {
        OdeSystem sys(2, [](double, std::span<const double> y, std::span<double> d) {
            d[0] = y[1];
            d[1] = -y[0];
        });
        auto err = [&](double h) {
            auto y = rk4_final(sys, {1.0, 0.0}, 0.0, 2.0, h);
            return std::hypot(y[0] - std::cos(2.0), y[1] + std::sin(2.0));
        };
        double r = err(0.1) / err(0.05);
        return std::make_pair(r >= 14 && r <= 18, num(r));
    });
    suite.emplace_back("numerics.simpson_order", [] {
        auto f = [](double t) { return std::exp(t) * std::cos(3 * t); };
        double exact = (std::exp(1.0) * (std::cos(3.0) + 3 * std::sin(3.0)) - 1) / 10;
        double r = std::fabs(simpson(f, 0, 1, 16) - exact) / std::fabs(simpson(f, 0, 1, 32) - exact);
        return std::make_pair(r >= 14 && r <= 18, num(r));
    });
    suite.emplace_back("numerics.energy_conservation", [] {
        MetricChart g = sphere_stereographic();
        auto E = geodesic_energy(g, integrate_geodesic(g, {0.3, -0.2}, {0.7, 0.4}, 0.0, 2 * pi));
        double drift = 0.0;
        for (double e : E) drift = std::max(drift, std::fabs(e - E.front()) / E.front());
        return std::make_pair(drift <= 1e-8, num(drift));
    });
    suite.emplace_back("numerics.conjugate_point", [] {
        MetricChart g = sphere_stereographic();
        auto tc = conjugate_point_scan(g, integrate_geodesic(g, {1.0, 0.0}, {0.0, 1.0}, 0.0, 4.0), {});
        double d = tc ? std::fabs(*tc - pi) : 1e9;
        return std::make_pair(d <= 1e-3, tc ? num(*tc) : std::string("none"));
    });

    std::sort(suite.begin(), suite.end(), [](const Check& a, const Check& b) { return a.first < b.first; });
    std::vector<std::pair<std::string, bool>> checks;
    json results = json::array();
    for (const auto& [name, fn] : suite) {
        std::pair<bool, std::string> r;
        try {
            r = fn();
        } catch (const std::exception& e) {
            r = {false, e.what()};
        }
        checks.emplace_back(name, r.first);
        results.push_back({{"name", name}, {"status", pass(r.first)}, {"value", r.second}});
    }
    bool ok = all_pass(checks);
    if (o.json) {
        json j;
        j["command"] = "selfcheck";
        j["results"] = results;
        j["status"] = pass(ok);
        os << j.dump(2) << "\n";
    } else {
        for (const auto& r : results)
            os << r["status"].get<std::string>() << " " << r["name"].get<std::string>() << " ("
               << r["value"].get<std::string>() << ")\n";
        os << "selfcheck: " << pass(ok) << "\n";
    }
    return ok ? 0 : 1;
}

} // namespace jetvar::cli
