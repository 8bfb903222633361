#include "jetvar/riemann.hpp"

#include <cmath>
#include <random>

#include "jetvar/error.hpp"

namespace jetvar {

MetricChart::MetricChart(std::vector<std::string> coords, ExprMatrix g, std::optional<ExprMatrix> inv)
    : coords_(std::move(coords)), g_(std::move(g))
{
    const std::size_t n = coords_.size();
    if (n == 0 || g_.size() != n) throw Error(ErrorKind::InvalidArgument, "metric must be n x n over n coordinates");
    for (const auto& row : g_)
        if (row.size() != n) throw Error(ErrorKind::InvalidArgument, "metric must be square");
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            if (!(g_[a][b] == g_[b][a]) && !is_zero(g_[a][b] - g_[b][a]))
                throw Error(ErrorKind::AsymmetricInput, "metric components are not symmetric");
    for (const auto& row : g_)
        for (const auto& e : row)
            for (const auto& s : free_symbols(e))
                if (std::find(coords_.begin(), coords_.end(), s) == coords_.end())
                    throw Error(ErrorKind::UnknownSymbol, "metric uses '" + s + "' which is not a coordinate");

    Expr det = determinant(g_);
    CompiledExpr prog(det, coords_);
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<double> x(n);
    for (int k = 0; k < 20; ++k) {
        for (auto& v : x) v = u(rng);
        double d = prog.run(std::span<const double>(x))[0];
        if (!(std::fabs(d) >= 1e-12)) throw Error(ErrorKind::SingularMetric, "det g vanishes at a sample point");
    }
    if (inv) {
        ginv_ = std::move(*inv);
    } else {
        ginv_ = jetvar::inverse(g_);
    }
}

Christoffel christoffel(const MetricChart& g)
{
    const int n = g.dim();
    const auto& x = g.coords();
    // dg[r][a][b] = d_r g_ab
    std::vector<ExprMatrix> dg(n, ExprMatrix(n, std::vector<Expr>(n)));
    for (int r = 0; r < n; ++r)
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) dg[r][a][b] = partial(g.g()[a][b], x[r]);
    Christoffel G(n, std::vector<std::vector<Expr>>(n, std::vector<Expr>(n)));
    for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m)
            for (int k = m; k < n; ++k) {
                std::vector<Expr> t;
                for (int r = 0; r < n; ++r)
                    t.push_back(g.inverse()[l][r] * (dg[m][r][k] + dg[k][r][m] - dg[r][m][k]));
                G[l][m][k] = G[l][k][m] = Expr::rational(1, 2) * add(std::move(t));
            }
    return G;
}

CurvatureData riemann(const MetricChart& g)
{
    const int n = g.dim();
    const auto& x = g.coords();
    CurvatureData cd;
    cd.gamma = christoffel(g);
    const auto& G = cd.gamma;
    using R4 = std::vector<std::vector<std::vector<std::vector<Expr>>>>;
    cd.R = R4(n, std::vector<std::vector<std::vector<Expr>>>(n, std::vector<std::vector<Expr>>(n, std::vector<Expr>(n))));
    cd.Rlow = cd.R;
    for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s)
            for (int m = 0; m < n; ++m)
                for (int k = 0; k < n; ++k) {
                    if (m == k) {
                        cd.R[r][s][m][k] = Expr(0);
                        continue;
                    }
                    if (k < m) {
                        cd.R[r][s][m][k] = -cd.R[r][s][k][m];
                        continue;
                    }
                    std::vector<Expr> t{partial(G[r][k][s], x[m]), -partial(G[r][m][s], x[k])};
                    for (int l = 0; l < n; ++l) {
                        t.push_back(G[r][m][l] * G[l][k][s]);
                        t.push_back(-(G[r][k][l] * G[l][m][s]));
                    }
                    cd.R[r][s][m][k] = add(std::move(t));
                }
    for (int a = 0; a < n; ++a)
        for (int s = 0; s < n; ++s)
            for (int m = 0; m < n; ++m)
                for (int k = 0; k < n; ++k) {
                    std::vector<Expr> t;
                    for (int r = 0; r < n; ++r) t.push_back(g.g()[a][r] * cd.R[r][s][m][k]);
                    cd.Rlow[a][s][m][k] = add(std::move(t));
                }
    return cd;
}

ExprMatrix curvature_block(const CurvatureData& cd, const std::vector<Expr>& u)
{
    const int n = static_cast<int>(cd.Rlow.size());
    if (static_cast<int>(u.size()) != n) throw Error(ErrorKind::InvalidArgument, "velocity has wrong dimension");
    ExprMatrix K(n, std::vector<Expr>(n));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            std::vector<Expr> t;
            for (int m = 0; m < n; ++m)
                for (int k = 0; k < n; ++k) t.push_back(cd.Rlow[a][m][k][b] * u[m] * u[k]);
            K[a][b] = add(std::move(t));
        }
    return K;
}

Lagrangian geodesic_lagrangian(const MetricChart& g, const std::string& time)
{
    JetChart c({time}, g.coords(), 1);
    const int n = g.dim();
    std::vector<Expr> t;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) t.push_back(g.g()[a][b] * c.jet(a, {1}) * c.jet(b, {1}));
    return Lagrangian(c, Expr::rational(1, 2) * add(std::move(t)), 1);
}

GeodesicJacobi geodesic_jacobi_equation(const MetricChart& g, const std::string& time)
{
    const int n = g.dim();
    JetChart d = geodesic_lagrangian(g, time).chart().doubled(2);
    CurvatureData cd = riemann(g);
    const auto& G = cd.gamma;
    std::vector<Expr> u, X, DX;
    for (int a = 0; a < n; ++a) {
        u.push_back(d.jet(a, {1}));
        X.push_back(d.fiber(n + a));
    }
    for (int r = 0; r < n; ++r) {
        std::vector<Expr> t{d.jet(n + r, {1})};
        for (int m = 0; m < n; ++m)
            for (int k = 0; k < n; ++k) t.push_back(G[r][m][k] * u[m] * X[k]);
        DX.push_back(add(std::move(t)));
    }
    GeodesicJacobi out{d, {}};
    for (int r = 0; r < n; ++r) {
        std::vector<Expr> t{total_derivative(DX[r], 0, d)};
        for (int m = 0; m < n; ++m)
            for (int k = 0; k < n; ++k) {
                t.push_back(G[r][m][k] * u[m] * DX[k]);
                for (int s = 0; s < n; ++s) t.push_back(cd.R[r][s][m][k] * u[s] * X[m] * u[k]);
            }
        out.equations.push_back(add(std::move(t)));
    }
    return out;
}

SubstitutionMap geodesic_shell(const MetricChart& g, const Christoffel& G, const JetChart& c)
{
    const int n = g.dim();
    SubstitutionMap s;
    for (int r = 0; r < n; ++r) {
        std::vector<Expr> t;
        for (int m = 0; m < n; ++m)
            for (int k = 0; k < n; ++k) t.push_back(G[r][m][k] * c.jet(m, {1}) * c.jet(k, {1}));
        s[c.jet_name(r, {2})] = -add(std::move(t));
    }
    return s;
}

MetricChart sphere_stereographic(double radius, const std::string& x, const std::string& y)
{
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw Error(ErrorKind::InvalidArgument, "sphere radius must be positive");
    // Exact when the squared radius is a whole number, so symbolic output stays rational.
    double r2 = radius * radius;
    Expr R2 = r2 == std::floor(r2) && r2 < 1e9 ? Expr(static_cast<std::int64_t>(r2)) : Expr::real(r2);
    Expr X = Expr::symbol(x), Y = Expr::symbol(y);
    Expr phi = Expr(4) * R2 * R2 * pow(R2 + X * X + Y * Y, Number(-2));
    return MetricChart({x, y}, {{phi, Expr(0)}, {Expr(0), phi}},
                       ExprMatrix{{Expr(1) / phi, Expr(0)}, {Expr(0), Expr(1) / phi}});
}

MetricChart metric_from_catalog(const std::string& name)
{
    if (name == "flat2") return MetricChart({"x", "y"}, {{Expr(1), Expr(0)}, {Expr(0), Expr(1)}});
    if (name == "sphere1") return sphere_stereographic(1.0);
    throw Error(ErrorKind::InvalidArgument, "unknown metric '" + name + "' (known: flat2, sphere1)");
}

Eigen2 eigen2x2_symmetric(const std::vector<std::vector<double>>& m)
{
    if (m.size() != 2 || m[0].size() != 2 || m[1].size() != 2)
        throw Error(ErrorKind::InvalidArgument, "expected a 2x2 matrix");
    if (std::fabs(m[0][1] - m[1][0]) > 1e-12) throw Error(ErrorKind::AsymmetricInput, "matrix is not symmetric");
    double a = m[0][0], b = 0.5 * (m[0][1] + m[1][0]), d = m[1][1];
    double mean = 0.5 * (a + d), r = std::hypot(0.5 * (a - d), b);
    Eigen2 e{mean + r, mean - r, {}};
    // (M - l2) v = 0: take the larger of the two row-derived candidates.
    double v1x = -b, v1y = a - e.l2, v2x = d - e.l2, v2y = -b;
    double n1 = std::hypot(v1x, v1y), n2 = std::hypot(v2x, v2y);
    if (std::max(n1, n2) < 1e-300)
        e.v2 = {1.0, 0.0};
    else if (n1 >= n2)
        e.v2 = {v1x / n1, v1y / n1};
    else
        e.v2 = {v2x / n2, v2y / n2};
    return e;
}

} // namespace jetvar
