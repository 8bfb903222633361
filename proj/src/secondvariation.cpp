#include "jetvar/secondvariation.hpp"

#include <cmath>

#include "jetvar/error.hpp"
#include "jetvar/ode.hpp"

namespace jetvar {

const char* to_string(Verdict v)
{
    switch (v) {
    case Verdict::StableTrialwise: return "stable-trialwise";
    case Verdict::Marginal: return "marginal";
    case Verdict::Unstable: return "unstable";
    }
    return "?";
}

SecondVariation second_variation(const Lagrangian& L)
{
    if (L.order() != 1)
        throw Error(ErrorKind::UnsupportedOrder, "second variation is implemented for first-order Lagrangians");
    const JetChart& c = L.chart();
    const int n = c.n(), m = c.m();
    std::vector<std::string> first = c.perturbation_names(), second;
    for (const auto& p : first) second.push_back("X" + p);
    std::vector<std::string> fibers = c.fiber_names();
    fibers.insert(fibers.end(), first.begin(), first.end());
    fibers.insert(fibers.end(), second.begin(), second.end());
    JetChart sv(c.base_names(), fibers, 2, c.parameter_names());

    Momenta P = momenta(L);
    auto d1 = [&](int i) { return sv.fiber(n + i); };
    auto d1m = [&](int i, int mu) { return sv.jet(n + i, sv.unit(mu)); };
    auto d2 = [&](int i) { return sv.fiber(2 * n + i); };
    auto d2m = [&](int i, int mu) { return sv.jet(2 * n + i, sv.unit(mu)); };
    std::vector<Expr> terms;
    for (int i = 0; i < n; ++i) {
        terms.push_back(P.p[i] * d2(i));
        for (int mu = 0; mu < m; ++mu) terms.push_back(P.p_mu[i][mu] * d2m(i, mu));
    }
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            terms.push_back(partial(P.p[i], c.fiber_names()[k]) * d1(i) * d1(k));
            for (int a = 0; a < m; ++a) {
                terms.push_back(Expr(2) * partial(P.p_mu[k][a], c.fiber_names()[i]) * d1(i) * d1m(k, a));
                for (int mu = 0; mu < m; ++mu)
                    terms.push_back(partial(P.p_mu[i][mu], c.jet_name(k, c.unit(a))) * d1m(i, mu) * d1m(k, a));
            }
        }
    return {sv, add(std::move(terms)), first, second};
}

Expr SecondVariation::quadratic() const
{
    SubstitutionMap zero;
    for (const auto& s : chart.symbols())
        if (s.kind == SymbolKind::Fiber && s.component >= 2 * (chart.n() / 3)) zero[s.name] = Expr(0);
    return substitute(density, zero);
}

Expr SecondVariation::along_field(const std::vector<Expr>& X, const JetChart& original) const
{
    const int n = original.n(), m = original.m();
    if (static_cast<int>(X.size()) != n) throw Error(ErrorKind::InvalidArgument, "one field component per fiber");
    prolong_vertical_field(X, 0, original);  // validates the dependence of X
    JetChart work = original.order() < 2 ? original.with_order(2) : original;
    SubstitutionMap map;
    for (int i = 0; i < n; ++i) {
        std::vector<Expr> dd;
        for (int k = 0; k < n; ++k) dd.push_back(partial(X[i], original.fiber_names()[k]) * X[k]);
        Expr d2 = add(std::move(dd));
        map[chart.jet_name(n + i, MultiIndex(m, 0))] = X[i];
        map[chart.jet_name(2 * n + i, MultiIndex(m, 0))] = d2;
        for (int mu = 0; mu < m; ++mu) {
            map[chart.jet_name(n + i, chart.unit(mu))] = total_derivative(X[i], mu, work);
            map[chart.jet_name(2 * n + i, chart.unit(mu))] = total_derivative(d2, mu, work);
        }
    }
    return substitute(density, map);
}

HessianForm hessian(const Lagrangian& L)
{
    if (L.order() != 1) throw Error(ErrorKind::UnsupportedOrder, "Hessian form is implemented for first-order Lagrangians");
    const JetChart& c = L.chart();
    const int n = c.n(), m = c.m();
    Momenta P = momenta(L);
    HessianForm H;
    H.A.assign(n, std::vector<Expr>(n));
    H.B.assign(n, std::vector<std::vector<Expr>>(n, std::vector<Expr>(m)));
    H.C.assign(n, std::vector<std::vector<std::vector<Expr>>>(m, std::vector<std::vector<Expr>>(n, std::vector<Expr>(m))));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            H.A[k][i] = partial(P.p[i], c.fiber_names()[k]);
            for (int a = 0; a < m; ++a) {
                H.B[i][k][a] = partial(P.p_mu[k][a], c.fiber_names()[i]);
                for (int mu = 0; mu < m; ++mu) H.C[i][mu][k][a] = partial(P.p_mu[i][mu], c.jet_name(k, c.unit(a)));
            }
        }
    return H;
}

Expr HessianForm::quadratic(const JetChart& source) const
{
    JetChart d = source.doubled(std::max(1, source.order()));
    const int n = source.n(), m = source.m();
    auto X = [&](int i) { return d.fiber(n + i); };
    auto Xm = [&](int i, int mu) { return d.jet(n + i, d.unit(mu)); };
    std::vector<Expr> terms;
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            terms.push_back(A[k][i] * X(i) * X(k));
            for (int a = 0; a < m; ++a) {
                terms.push_back(Expr(2) * B[i][k][a] * X(i) * Xm(k, a));
                for (int mu = 0; mu < m; ++mu) terms.push_back(C[i][mu][k][a] * Xm(i, mu) * Xm(k, a));
            }
        }
    return add(std::move(terms));
}

Verdict classify(double integral, double length)
{
    if (std::fabs(integral) <= 1e-6 * std::fabs(length)) return Verdict::Marginal;
    return integral > 0 ? Verdict::StableTrialwise : Verdict::Unstable;
}

StabilityResult stability_integral(const Lagrangian& L, const SectionSamples& solution, const TrialDeformation& xi,
                                   const StabilityOptions& opts)
{
    const JetChart& c = L.chart();
    if (c.m() != 1) throw Error(ErrorKind::InvalidArgument, "stability integrals need a one-dimensional base");
    const int n = c.n();
    if (static_cast<int>(xi.components.size()) != n)
        throw Error(ErrorKind::InvalidArgument, "trial deformation needs one component per fiber");
    const std::string& t = c.base_names()[0];
    JetChart d = c.doubled(1);

    std::vector<Expr> trial = xi.components;
    for (int i = 0; i < n; ++i) trial.push_back(partial(xi.components[i], t));
    std::vector<std::string> tin{t};
    for (const auto& [k, v] : opts.params) tin.push_back(k);
    CompiledExpr trial_prog(trial, tin);
    auto trial_at = [&](double tv) {
        std::vector<double> in{tv};
        for (const auto& [k, v] : opts.params) in.push_back(v);
        return trial_prog.run(std::span<const double>(in));
    };
    for (double te : {xi.t_start, xi.t_end}) {
        auto v = trial_at(te);
        for (int i = 0; i < n; ++i)
            if (std::fabs(v[i]) > 1e-12)
                throw Error(ErrorKind::EndpointViolation, "trial deformation does not vanish at t = " + std::to_string(te));
    }

    StabilityResult out;
    if (opts.check_solution) {
        EulerLagrangeForm E = euler_lagrange(L);
        for (int k = 0; k <= 10; ++k) {
            double tk = xi.t_start + (xi.t_end - xi.t_start) * k / 10.0;
            for (double r : residual(E, solution, {tk}, opts.params))
                out.max_solution_residual = std::max(out.max_solution_residual, std::fabs(r));
        }
        if (out.max_solution_residual > opts.solution_tol)
            throw Error(ErrorKind::InvalidArgument, "candidate solution has residual " +
                                                        std::to_string(out.max_solution_residual));
    }

    Expr Q = hessian(L).quadratic(c);
    std::vector<std::string> qin;
    for (const auto* j : c.fiber_jets(1)) qin.push_back(j->name);
    qin.push_back(t);
    for (const auto& [k, v] : opts.params) qin.push_back(k);
    for (int i = 0; i < n; ++i) qin.push_back(d.fiber_names()[n + i]);
    for (int i = 0; i < n; ++i) qin.push_back(d.jet_name(n + i, {1}));
    CompiledExpr qprog(Q, qin);
    std::vector<double> in(qin.size());
    auto integrand = [&](double tv) {
        Bindings jb = numeric_jet(solution, c, {tv}, 1);
        std::size_t p = 0;
        for (const auto* j : c.fiber_jets(1)) in[p++] = jb.at(j->name);
        in[p++] = tv;
        for (const auto& [k, v] : opts.params) in[p++] = v;
        auto tr = trial_at(tv);
        for (double v : tr) in[p++] = v;
        return qprog.run(std::span<const double>(in))[0];
    };
    out.integral = simpson(integrand, xi.t_start, xi.t_end, opts.panels);
    out.verdict = classify(out.integral, xi.t_end - xi.t_start);
    return out;
}

ThirdOrder third_order_coefficients(const std::vector<Expr>& X, const JetChart& c)
{
    prolong_vertical_field(X, 0, c);
    const int n = c.n();
    const auto& y = c.fiber_names();
    ThirdOrder out;
    out.d1 = X;
    for (int i = 0; i < n; ++i) {
        std::vector<Expr> t;
        for (int k = 0; k < n; ++k) t.push_back(partial(X[i], y[k]) * X[k]);
        out.d2.push_back(add(std::move(t)));
    }
    for (int i = 0; i < n; ++i) {
        std::vector<Expr> t;
        for (int k = 0; k < n; ++k) {
            Expr Xk = partial(X[i], y[k]);
            t.push_back(Xk * out.d2[k]);
            for (int nn = 0; nn < n; ++nn) t.push_back(partial(Xk, y[nn]) * X[k] * X[nn]);
        }
        out.d3.push_back(add(std::move(t)));
    }
    return out;
}

} // namespace jetvar
