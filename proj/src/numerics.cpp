#include "jetvar/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <memory>
#include <random>

#include "jetvar/error.hpp"

namespace jetvar {

namespace {

std::vector<std::string> velocity_names(const MetricChart& g)
{
    std::vector<std::string> u;
    for (const auto& x : g.coords()) u.push_back("u_" + x);
    return u;
}

// -G^r_{mn} u^m u^n in the coordinate and velocity symbols.
std::vector<Expr> geodesic_acceleration(const MetricChart& g, const Christoffel& G, const std::vector<Expr>& u)
{
    const int n = g.dim();
    std::vector<Expr> out;
    for (int r = 0; r < n; ++r) {
        std::vector<Expr> t;
        for (int m = 0; m < n; ++m)
            for (int k = 0; k < n; ++k) t.push_back(G[r][m][k] * u[m] * u[k]);
        out.push_back(-add(std::move(t)));
    }
    return out;
}

} // namespace

OdeSystem geodesic_system(const MetricChart& g)
{
    auto un = velocity_names(g);
    std::vector<Expr> u, rhs;
    for (const auto& s : un) u.push_back(Expr::symbol(s));
    rhs = u;
    for (auto& a : geodesic_acceleration(g, christoffel(g), u)) rhs.push_back(a);
    std::vector<std::string> state = g.coords();
    state.insert(state.end(), un.begin(), un.end());
    return OdeSystem::from_exprs(rhs, "__t", state);
}

Trajectory integrate_geodesic(const MetricChart& g, const std::vector<double>& x0, const std::vector<double>& u0,
                              double t0, double t1, double h)
{
    if (static_cast<int>(x0.size()) != g.dim() || static_cast<int>(u0.size()) != g.dim())
        throw Error(ErrorKind::InvalidArgument, "initial data has wrong dimension");
    std::vector<double> y = x0;
    y.insert(y.end(), u0.begin(), u0.end());
    return rk4(geodesic_system(g), y, t0, t1, h);
}

std::vector<double> geodesic_energy(const MetricChart& g, const Trajectory& traj)
{
    const int n = g.dim();
    auto un = velocity_names(g);
    std::vector<Expr> terms;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) terms.push_back(g.g()[a][b] * Expr::symbol(un[a]) * Expr::symbol(un[b]));
    std::vector<std::string> in = g.coords();
    in.insert(in.end(), un.begin(), un.end());
    CompiledExpr prog(Expr::rational(1, 2) * add(std::move(terms)), in);
    std::vector<double> out;
    for (const auto& s : traj.states()) out.push_back(prog.run(std::span<const double>(s))[0]);
    return out;
}

double drag_and_verify(const Lagrangian& L, const Trajectory& solution, const std::vector<Expr>& X, double s,
                       const DragOptions& opts)
{
    if (L.order() != 1) throw Error(ErrorKind::UnsupportedOrder, "dragging is implemented for first-order Lagrangians");
    const JetChart& c = L.chart();
    if (c.m() != 1) throw Error(ErrorKind::InvalidArgument, "dragging needs a one-dimensional base");
    const int n = c.n();
    if (solution.states().front().size() != static_cast<std::size_t>(2 * n))
        throw Error(ErrorKind::InvalidArgument, "solution state must be (y, y_t)");
    JetFlow flow(c, X, 2);
    EulerLagrangeForm E = euler_lagrange(L);
    std::vector<std::string> in;
    for (const auto* j : c.fiber_jets(2)) in.push_back(j->name);
    in.push_back(c.base_names()[0]);
    for (const auto& p : c.parameter_names()) in.push_back(p);
    CompiledExpr prog(E.E, in);

    const std::size_t N = solution.size();
    const int nodes = std::max(2, opts.nodes);
    double worst = 0.0;
    std::vector<double> vals(in.size());
    for (int k = 0; k < nodes; ++k) {
        std::size_t idx = (N - 1) * static_cast<std::size_t>(k) / static_cast<std::size_t>(nodes - 1);
        const auto& st = solution.states()[idx];
        const auto& dv = solution.derivs()[idx];
        Bindings pt;
        pt[c.base_names()[0]] = solution.times()[idx];
        for (const auto& p : c.parameter_names()) {
            auto it = opts.params.find(p);
            if (it == opts.params.end()) throw Error(ErrorKind::UnboundSymbol, p);
            pt[p] = it->second;
        }
        for (int i = 0; i < n; ++i) {
            pt[c.jet_name(i, {0})] = st[i];
            pt[c.jet_name(i, {1})] = st[n + i];
            pt[c.jet_name(i, {2})] = dv[n + i];
        }
        Bindings moved = flow.flow(pt, s, opts.h, opts.chart_bound);
        for (std::size_t q = 0; q < in.size(); ++q) vals[q] = moved.at(in[q]);
        for (double r : prog.run(std::span<const double>(vals))) {
            if (!std::isfinite(r)) throw Error(ErrorKind::FlowLeftChart, "non-finite residual on the dragged curve");
            worst = std::max(worst, std::fabs(r));
        }
    }
    return worst;
}

std::optional<double> conjugate_point_scan(const MetricChart& g, const Trajectory& geodesic,
                                           const std::vector<double>& v0, const ConjugateOptions& opts)
{
    if (g.dim() != 2) throw Error(ErrorKind::InvalidArgument, "conjugate point scan needs a two-dimensional metric");
    if (!v0.empty() && (v0.size() != 2 || (v0[0] == 0.0 && v0[1] == 0.0)))
        throw Error(ErrorKind::InvalidArgument, "initial Jacobi velocity must be a nonzero 2-vector");
    const int n = 2;
    // State: x, u, X, V = dX/dt, e.
    std::vector<std::string> names;
    for (const auto& c : g.coords()) names.push_back(c);
    for (const auto& c : g.coords()) names.push_back("u_" + c);
    for (const auto& c : g.coords()) names.push_back("X_" + c);
    for (const auto& c : g.coords()) names.push_back("V_" + c);
    for (const auto& c : g.coords()) names.push_back("e_" + c);
    auto S = [&](int block, int i) { return Expr::symbol(names[block * n + i]); };
    CurvatureData cd = riemann(g);
    const auto& G = cd.gamma;
    std::vector<Expr> u{S(1, 0), S(1, 1)}, X{S(2, 0), S(2, 1)}, V{S(3, 0), S(3, 1)}, e{S(4, 0), S(4, 1)};
    std::vector<Expr> acc = geodesic_acceleration(g, G, u);

    // Geodesic Jacobi equation solved for X_tt, on shell, with jets mapped to state.
    GeodesicJacobi gj = geodesic_jacobi_equation(g);
    const JetChart& jc = gj.chart;
    SubstitutionMap to_state = geodesic_shell(g, G, jc);
    for (int i = 0; i < n; ++i) {
        to_state[jc.jet_name(i, {1})] = u[i];
        to_state[jc.jet_name(n + i, {1})] = V[i];
        to_state[jc.jet_name(n + i, {0})] = X[i];
    }
    std::vector<Expr> rhs;
    for (int i = 0; i < n; ++i) rhs.push_back(u[i]);
    for (int i = 0; i < n; ++i) rhs.push_back(acc[i]);
    for (int i = 0; i < n; ++i) rhs.push_back(V[i]);
    for (int r = 0; r < n; ++r) {
        SubstitutionMap m = to_state;
        for (int i = 0; i < n; ++i) m[jc.jet_name(n + i, {2})] = Expr(0);
        // Shell values mention u through the jet names; substitute twice.
        rhs.push_back(-substitute(substitute(gj.equations[r], m), to_state));
    }
    for (int r = 0; r < n; ++r) {
        std::vector<Expr> t;
        for (int m = 0; m < n; ++m)
            for (int k = 0; k < n; ++k) t.push_back(G[r][m][k] * u[m] * e[k]);
        rhs.push_back(-add(std::move(t)));
    }
    OdeSystem sys = OdeSystem::from_exprs(rhs, jc.base_names()[0], names);

    const auto& s0 = geodesic.states().front();
    std::vector<double> x0{s0[0], s0[1]}, u0{s0[2], s0[3]};
    Bindings b0{{g.coords()[0], x0[0]}, {g.coords()[1], x0[1]}};
    std::vector<std::vector<double>> gm(2, std::vector<double>(2));
    for (int a = 0; a < 2; ++a)
        for (int c = 0; c < 2; ++c) gm[a][c] = evaluate(g.g()[a][c], b0);
    ExprMatrix K = curvature_block(cd, {Expr::symbol("__u0"), Expr::symbol("__u1")});
    Bindings bu = b0;
    bu["__u0"] = u0[0];
    bu["__u1"] = u0[1];
    std::vector<std::vector<double>> Km(2, std::vector<double>(2));
    for (int a = 0; a < 2; ++a)
        for (int c = 0; c < 2; ++c) Km[a][c] = evaluate(K[a][c], bu);
    // Negative mode of K v = l g v through g = L L^T: M = L^-1 K L^-T, v = L^-T w.
    double l00 = std::sqrt(gm[0][0]), l10 = gm[1][0] / l00, l11 = std::sqrt(gm[1][1] - l10 * l10);
    auto solve_lower = [&](double a, double b) { return std::vector<double>{a / l00, (b - l10 * a / l00) / l11}; };
    std::vector<double> c0 = solve_lower(Km[0][0], Km[1][0]), c1 = solve_lower(Km[0][1], Km[1][1]);
    // c = L^-1 K (columns); M = c L^-T, i.e. rows of c solved again.
    std::vector<double> r0 = solve_lower(c0[0], c1[0]), r1 = solve_lower(c0[1], c1[1]);
    double off = 0.5 * (r0[1] + r1[0]);
    Eigen2 eig = eigen2x2_symmetric({{r0[0], off}, {off, r1[1]}});
    // v = L^-T w
    double v1 = eig.v2[1] / l11, v0e = (eig.v2[0] - l10 * v1) / l00;
    std::vector<double> e0{v0e, v1};
    double norm = std::sqrt(gm[0][0] * e0[0] * e0[0] + 2 * gm[0][1] * e0[0] * e0[1] + gm[1][1] * e0[1] * e0[1]);
    e0[0] /= norm;
    e0[1] /= norm;
    // DX(t0) = v0 with X(t0) = 0 means dX/dt(t0) = v0.
    std::vector<double> v = v0.empty() ? e0 : v0;
    std::vector<double> y{x0[0], x0[1], u0[0], u0[1], 0.0, 0.0, v[0], v[1], e0[0], e0[1]};

    std::vector<std::string> gnames = g.coords();
    std::vector<Expr> gflat{g.g()[0][0], g.g()[0][1], g.g()[1][1]};
    CompiledExpr gcomp(gflat, gnames);
    auto component = [&](const std::vector<double>& st) {
        double xy[2] = {st[0], st[1]};
        auto gv = gcomp.run(std::span<const double>(xy, 2));
        return gv[0] * st[4] * st[8] + gv[1] * (st[4] * st[9] + st[5] * st[8]) + gv[2] * st[5] * st[9];
    };

    const double t0 = geodesic.t0(), t1 = geodesic.t1();
    const int steps = std::max(1, static_cast<int>(std::ceil((t1 - t0) / opts.h - 1e-9)));
    const double h = (t1 - t0) / steps;
    double t = t0, prev = 0.0;
    for (int k = 0; k < steps; ++k) {
        std::vector<double> y_prev = y;
        rk4_step(sys, t, y, h);
        double tn = t0 + (k + 1) * h;
        double f = component(y);
        if (!std::isfinite(f)) throw Error(ErrorKind::NonfiniteState, "Jacobi field at t = " + std::to_string(tn));
        if (k > 0 && prev != 0.0 && (f == 0.0 || (f > 0) != (prev > 0))) {
            if (f == 0.0) return tn;
            double lo = t, hi = tn, flo = prev;
            while (hi - lo > opts.tol) {
                double mid = 0.5 * (lo + hi);
                std::vector<double> ym = y_prev;
                rk4_step(sys, t, ym, mid - t);
                double fm = component(ym);
                if (fm == 0.0) return mid;
                if ((fm > 0) == (flo > 0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            return 0.5 * (lo + hi);
        }
        prev = f;
        t = tn;
    }
    return std::nullopt;
}

std::vector<std::vector<double>> curvature_eigen_track(const MetricChart& g, const Trajectory& geodesic, int stride)
{
    if (g.dim() != 2) throw Error(ErrorKind::InvalidArgument, "eigen track needs a two-dimensional metric");
    CurvatureData cd = riemann(g);
    ExprMatrix K = curvature_block(cd, {Expr::symbol("u_" + g.coords()[0]), Expr::symbol("u_" + g.coords()[1])});
    std::vector<Expr> flat{K[0][0], K[0][1], K[1][0], K[1][1]};
    std::vector<std::string> in = g.coords();
    in.push_back("u_" + g.coords()[0]);
    in.push_back("u_" + g.coords()[1]);
    CompiledExpr prog(flat, in);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < geodesic.size(); i += static_cast<std::size_t>(std::max(1, stride))) {
        auto v = prog.run(std::span<const double>(geodesic.states()[i]));
        double off = 0.5 * (v[1] + v[2]);
        Eigen2 e = eigen2x2_symmetric({{v[0], off}, {off, v[3]}});
        rows.push_back({geodesic.times()[i], e.l1, e.l2});
    }
    return rows;
}

double fd_gradient_check(const Expr& e, std::vector<std::string> symbols, int samples, std::uint64_t seed)
{
    std::set<std::string> fs = free_symbols(e);
    std::vector<std::string> inputs(fs.begin(), fs.end());
    if (symbols.empty()) symbols = inputs;
    std::vector<Expr> roots{e};
    for (const auto& s : symbols) roots.push_back(partial(e, s));
    if (inputs.empty()) return 0.0;
    CompiledExpr prog(roots, inputs);
    std::vector<std::size_t> slot;
    for (const auto& s : symbols) {
        auto it = std::find(inputs.begin(), inputs.end(), s);
        slot.push_back(it == inputs.end() ? inputs.size() : static_cast<std::size_t>(it - inputs.begin()));
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<double> x(inputs.size()), out(roots.size()), op(roots.size()), om(roots.size());
    double worst = 0.0;
    for (int k = 0; k < samples; ++k) {
        bool ok = false;
        for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
            for (auto& v : x) v = u(rng);
            prog.run(x, out);
            ok = std::all_of(out.begin(), out.end(), [](double v) { return std::isfinite(v); });
        }
        if (!ok) throw Error(ErrorKind::Domain, "no finite sample point found");
        for (std::size_t q = 0; q < symbols.size(); ++q) {
            if (slot[q] == inputs.size()) {
                worst = std::max(worst, std::fabs(out[1 + q]));
                continue;
            }
            double& xv = x[slot[q]];
            double keep = xv, h = 1e-5 * std::max(1.0, std::fabs(keep));
            xv = keep + h;
            prog.run(x, op);
            xv = keep - h;
            prog.run(x, om);
            xv = keep;
            double fd = (op[0] - om[0]) / (2 * h);
            worst = std::max(worst, std::fabs(out[1 + q] - fd) / std::max(1.0, std::fabs(out[1 + q])));
        }
    }
    return worst;
}

} // namespace jetvar
