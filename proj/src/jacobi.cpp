#include "jetvar/jacobi.hpp"

#include "jetvar/error.hpp"

namespace jetvar {

namespace {

Expr fault_factor(const MultiIndex& I, const JacobiOptions& opts)
{
    if (total(I) != 1 || opts.momentum_fault == 0.0) return Expr(1);
    return Expr(1) + Expr::real(opts.momentum_fault);
}

} // namespace

JacobiLagrangian jacobi_lagrangian(const Lagrangian& L, const JacobiOptions& opts)
{
    JetChart c = composite_extend(L.chart());
    std::vector<Expr> terms;
    for (int i = 0; i < c.n(); ++i) {
        Expr Z = c.composite(i, MultiIndex(c.m(), 0), MultiIndex(c.n(), 0));
        for (int k = 0; k <= L.order(); ++k)
            for (const auto& I : multi_indices(c.m(), k)) {
                Expr p = partial(L.density(), c.jet_name(i, I));
                if (p.is_zero()) continue;
                terms.push_back(fault_factor(I, opts) * p * total_derivative(Z, I, c));
            }
    }
    return {c, add(std::move(terms))};
}

Expr homogeneity_defect(const JacobiLagrangian& J, const Number& lambda)
{
    SubstitutionMap scale;
    for (const auto* s : J.chart.composite_symbols()) scale[s->name] = Expr(lambda) * Expr::symbol(s->name);
    return substitute(J.density, scale) - Expr(lambda) * J.density;
}

JacobiEquations jacobi_equations(const Lagrangian& L, const JacobiOptions& opts)
{
    const JetChart& c = L.chart();
    JetChart d = c.doubled();
    std::vector<Expr> terms;
    for (int i = 0; i < c.n(); ++i)
        for (int k = 0; k <= L.order(); ++k)
            for (const auto& I : multi_indices(c.m(), k)) {
                Expr p = partial(L.density(), c.jet_name(i, I));
                if (p.is_zero()) continue;
                terms.push_back(fault_factor(I, opts) * p * d.jet(c.n() + i, I));
            }
    EulerLagrangeForm E = euler_lagrange(Lagrangian(d, add(std::move(terms)), L.order()));
    JacobiEquations out{E.chart, {}, {}};
    for (int k = 0; k < c.n(); ++k) out.perturbation_eq.push_back(E.E[k]);
    for (int i = 0; i < c.n(); ++i) out.base_eq.push_back(E.E[c.n() + i]);
    return out;
}

TangencyDefect tangency_defect(const Lagrangian& L, const JacobiOptions& opts)
{
    const JetChart& c = L.chart();
    JetChart comp = composite_extend(c);
    std::vector<Expr> Z;
    for (int i = 0; i < c.n(); ++i) Z.push_back(comp.composite(i, MultiIndex(c.m(), 0), MultiIndex(c.n(), 0)));
    SubstitutionMap prol = prolong_vertical_field(Z, 2 * L.order(), comp);

    JacobiEquations J = jacobi_equations(L, opts);
    EulerLagrangeForm E = euler_lagrange(L);
    TangencyDefect out{comp, {}};
    for (int k = 0; k < c.n(); ++k)
        out.defect.push_back(substitute(J.perturbation_eq[k], prol) - prolonged_action(E.E[k], prol, c));
    return out;
}

bool tangency_holds(const TangencyDefect& t, const ZeroTest& z)
{
    for (const auto& d : t.defect)
        if (!is_zero(d, z)) return false;
    return true;
}

std::vector<Expr> first_order_linearization(const Lagrangian& L)
{
    if (L.order() != 1)
        throw Error(ErrorKind::UnsupportedOrder, "first-order linearization is defined for first-order Lagrangians");
    const JetChart& c = L.chart();
    JetChart d = c.doubled();
    Momenta P = momenta(L);
    const int n = c.n(), m = c.m();
    auto X = [&](int i) { return d.fiber(n + i); };
    auto Xd = [&](int i, int mu) { return d.jet(n + i, d.unit(mu)); };
    std::vector<Expr> out;
    for (int k = 0; k < n; ++k) {
        std::vector<Expr> terms;
        for (int i = 0; i < n; ++i) {
            const std::string& yi = c.fiber_names()[i];
            terms.push_back(X(i) * partial(P.p[k], yi));
            for (int mu = 0; mu < m; ++mu) terms.push_back(Xd(i, mu) * partial(P.p[k], c.jet_name(i, c.unit(mu))));
        }
        for (int mu = 0; mu < m; ++mu) {
            std::vector<Expr> inner;
            for (int i = 0; i < n; ++i) {
                inner.push_back(X(i) * partial(P.p_mu[k][mu], c.fiber_names()[i]));
                for (int e = 0; e < m; ++e)
                    inner.push_back(Xd(i, e) * partial(P.p_mu[k][mu], c.jet_name(i, c.unit(e))));
            }
            terms.push_back(-total_derivative(add(std::move(inner)), mu, d));
        }
        out.push_back(add(std::move(terms)));
    }
    return out;
}

} // namespace jetvar
