#include "jetvar/variational.hpp"

#include <cmath>
#include <random>

#include "jetvar/error.hpp"

namespace jetvar {

Lagrangian::Lagrangian(const JetChart& chart, Expr density, int order)
    : chart_(chart), density_(std::move(density)), order_(order)
{
    if (order != 1 && order != 2)
        throw Error(ErrorKind::UnsupportedOrder,
                    "Lagrangians of order " + std::to_string(order) + " (supported: 1, 2)");
    if (chart.is_composite()) throw Error(ErrorKind::InvalidArgument, "Lagrangian chart must not be composite");
    chart_ = chart.with_order(2 * order);
    for (const auto& name : free_symbols(density_)) {
        const JetSymbol& s = chart_.lookup(name);
        if (s.kind == SymbolKind::Fiber && s.order() > order)
            throw Error(ErrorKind::OrderOverflow, "density uses '" + name + "' above the declared order");
    }
}

Momenta momenta(const Lagrangian& L)
{
    const JetChart& c = L.chart();
    const Expr& d = L.density();
    Momenta out;
    for (int i = 0; i < c.n(); ++i) {
        out.p.push_back(partial(d, c.fiber_names()[i]));
        std::vector<Expr> row;
        for (int mu = 0; mu < c.m(); ++mu) row.push_back(partial(d, c.jet_name(i, c.unit(mu))));
        out.p_mu.push_back(std::move(row));
        if (L.order() == 2) {
            std::vector<std::vector<Expr>> block(c.m(), std::vector<Expr>(c.m()));
            for (int mu = 0; mu < c.m(); ++mu)
                for (int nu = 0; nu < c.m(); ++nu) {
                    MultiIndex I = c.unit(mu);
                    ++I[nu];
                    block[mu][nu] = sym_partial(d, c.jet_name(i, I), c);
                }
            out.p_munu.push_back(std::move(block));
        }
    }
    return out;
}

EulerLagrangeForm euler_lagrange(const Lagrangian& L)
{
    const JetChart& c = L.chart();
    EulerLagrangeForm out{c, {}};
    for (int i = 0; i < c.n(); ++i) {
        std::vector<Expr> terms;
        for (int k = 0; k <= L.order(); ++k)
            for (const auto& I : multi_indices(c.m(), k)) {
                // Stored symbols with raw partials: the multiplicity of I
                // accounts for the ordered-index sum.
                Expr t = total_derivative(partial(L.density(), c.jet_name(i, I)), I, c);
                terms.push_back(k % 2 ? -t : t);
            }
        out.E.push_back(add(std::move(terms)));
    }
    return out;
}

FirstVariation first_variation(const Lagrangian& L, const std::vector<Expr>& X)
{
    const JetChart& c = L.chart();
    SubstitutionMap prol = prolong_vertical_field(X, L.order(), c);
    FirstVariation out;
    out.variation = prolonged_action(L.density(), prol, c);
    EulerLagrangeForm E = euler_lagrange(L);
    std::vector<Expr> inner;
    for (int i = 0; i < c.n(); ++i) inner.push_back(E.E[i] * X[i]);
    out.interior = add(std::move(inner));

    Momenta P = momenta(L);
    for (int mu = 0; mu < c.m(); ++mu) {
        std::vector<Expr> terms;
        for (int i = 0; i < c.n(); ++i) {
            Expr coeff = P.p_mu[i][mu];
            if (L.order() == 2) {
                for (int nu = 0; nu < c.m(); ++nu) {
                    coeff -= total_derivative(P.p_munu[i][mu][nu], nu, c);
                    terms.push_back(P.p_munu[i][mu][nu] * total_derivative(X[i], nu, c));
                }
            }
            terms.push_back(coeff * X[i]);
        }
        out.boundary.push_back(add(std::move(terms)));
    }
    return out;
}

std::vector<double> residual(const EulerLagrangeForm& E, const SectionSamples& s, const std::vector<double>& x,
                             const Bindings& params)
{
    Bindings b = numeric_jet(s, E.chart, x, E.chart.order());
    for (const auto& [k, v] : params) b[k] = v;
    std::vector<double> out;
    for (const auto& e : E.E) out.push_back(evaluate(e, b));
    return out;
}

ChartChangeReport chart_change_check(const Lagrangian& L, const FiberedDiffeo& f, int points, double tol,
                                     std::uint64_t seed)
{
    const JetChart& c = L.chart();
    const int m = c.m(), n = c.n();
    if (static_cast<int>(f.base_inverse.size()) != m || static_cast<int>(f.fiber_inverse.size()) != n)
        throw Error(ErrorKind::InvalidArgument, "diffeomorphism has the wrong number of components");
    for (const auto& e : f.base_inverse)
        for (const auto& s : free_symbols(e))
            if (c.lookup(s).kind == SymbolKind::Fiber)
                throw Error(ErrorKind::InvalidArgument, "base map must not depend on fiber coordinates");
    for (const auto& e : f.fiber_inverse)
        for (const auto& s : free_symbols(e))
            if (c.lookup(s).kind == SymbolKind::Fiber && c.lookup(s).order() > 0)
                throw Error(ErrorKind::JetDependence, "fiber map must not depend on jets");

    ExprMatrix Jx(m, std::vector<Expr>(m));
    for (int mu = 0; mu < m; ++mu)
        for (int a = 0; a < m; ++a) Jx[mu][a] = partial(f.base_inverse[mu], c.base_names()[a]);
    Expr detJ;
    ExprMatrix Jinv = inverse(Jx, &detJ);
    Expr Jbar = f.has_jacobian_density ? f.jacobian_density : detJ;
    ExprMatrix Jf = f.fiber_jacobian;
    if (Jf.empty()) {
        Jf.assign(n, std::vector<Expr>(n));
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i) Jf[k][i] = partial(f.fiber_inverse[k], c.fiber_names()[i]);
    }

    // Old jets in new coordinates through D_mu = (dx'^a/dx^mu) d'_a.
    auto D = [&](const Expr& e, int mu) {
        std::vector<Expr> terms;
        for (int a = 0; a < m; ++a) terms.push_back(Jinv[a][mu] * total_derivative(e, a, c));
        return add(std::move(terms));
    };
    SubstitutionMap low, full;
    for (int mu = 0; mu < m; ++mu) full[c.base_names()[mu]] = f.base_inverse[mu];
    std::map<std::pair<int, MultiIndex>, Expr> jets;
    for (int k = 0; k <= c.order(); ++k)
        for (const auto& I : multi_indices(m, k))
            for (int i = 0; i < n; ++i) {
                Expr v;
                if (k == 0) {
                    v = f.fiber_inverse[i];
                } else {
                    int mu = 0;
                    while (I[mu] == 0) ++mu;
                    MultiIndex parent = I;
                    --parent[mu];
                    v = D(jets.at({i, parent}), mu);
                }
                jets.emplace(std::make_pair(i, I), v);
                full[c.jet_name(i, I)] = v;
            }
    low = full;
    for (auto it = low.begin(); it != low.end();) {
        const JetSymbol& s = c.lookup(it->first);
        if (s.kind == SymbolKind::Fiber && s.order() > L.order())
            it = low.erase(it);
        else
            ++it;
    }

    Lagrangian Lp(c, Jbar * substitute(L.density(), low), L.order());
    EulerLagrangeForm Ep = euler_lagrange(Lp);
    EulerLagrangeForm E = euler_lagrange(L);
    std::vector<Expr> Esub;
    for (const auto& e : E.E) Esub.push_back(substitute(e, full));

    std::vector<Expr> roots;
    for (int i = 0; i < n; ++i) {
        std::vector<Expr> terms;
        for (int k = 0; k < n; ++k) terms.push_back(Esub[k] * Jf[k][i]);
        roots.push_back(Ep.E[i]);
        roots.push_back(Jbar * add(std::move(terms)));
    }
    roots.push_back(detJ);
    CompiledExpr prog(roots);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    std::vector<double> in(prog.inputs().size()), out(roots.size());
    ChartChangeReport rep;
    rep.ok = true;
    for (int p = 0; p < points; ++p) {
        bool finite = false;
        for (int attempt = 0; attempt < 100 && !finite; ++attempt) {
            for (auto& v : in) v = dist(rng);
            prog.run(in, out);
            finite = std::all_of(out.begin(), out.end(), [](double v) { return std::isfinite(v); });
        }
        if (!finite) throw Error(ErrorKind::Domain, "no finite sample point found");
        if (std::fabs(out.back()) < 1e-12)
            throw Error(ErrorKind::SingularJacobian, "base Jacobian is singular at a sample point");
        for (int i = 0; i < n; ++i) {
            double lhs = out[2 * i], rhs = out[2 * i + 1];
            double d = std::fabs(lhs - rhs) / (1 + std::fabs(lhs) + std::fabs(rhs));
            rep.max_defect = std::max(rep.max_defect, d);
            if (d > tol) rep.ok = false;
        }
        ++rep.points;
    }
    return rep;
}

} // namespace jetvar
