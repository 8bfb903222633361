#include "jetvar/matrix.hpp"

#include "jetvar/error.hpp"

namespace jetvar {

namespace {

ExprMatrix minor_of(const ExprMatrix& a, std::size_t row, std::size_t col)
{
    ExprMatrix m;
    for (std::size_t r = 0; r < a.size(); ++r) {
        if (r == row) continue;
        std::vector<Expr> line;
        for (std::size_t c = 0; c < a.size(); ++c)
            if (c != col) line.push_back(a[r][c]);
        m.push_back(std::move(line));
    }
    return m;
}

void check_square(const ExprMatrix& a)
{
    for (const auto& row : a)
        if (row.size() != a.size()) throw Error(ErrorKind::InvalidArgument, "matrix is not square");
}

} // namespace

Expr determinant(const ExprMatrix& a)
{
    check_square(a);
    if (a.empty()) return Expr(1);
    if (a.size() == 1) return a[0][0];
    if (a.size() == 2) return a[0][0] * a[1][1] - a[0][1] * a[1][0];
    std::vector<Expr> terms;
    for (std::size_t c = 0; c < a.size(); ++c) {
        if (a[0][c].is_zero()) continue;
        Expr t = a[0][c] * determinant(minor_of(a, 0, c));
        terms.push_back(c % 2 ? -t : t);
    }
    return add(std::move(terms));
}

ExprMatrix inverse(const ExprMatrix& a, Expr* det)
{
    check_square(a);
    Expr d = determinant(a);
    if (det) *det = d;
    if (d.is_zero()) throw Error(ErrorKind::SingularJacobian, "matrix is structurally singular");
    std::size_t n = a.size();
    Expr inv_d = pow(d, Number(-1));
    ExprMatrix out(n, std::vector<Expr>(n));
    if (n == 1) {
        out[0][0] = inv_d;
        return out;
    }
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
            Expr cof = determinant(minor_of(a, c, r));
            out[r][c] = ((r + c) % 2 ? -cof : cof) * inv_d;
        }
    return out;
}

ExprMatrix transpose(const ExprMatrix& a)
{
    ExprMatrix t(a.empty() ? 0 : a[0].size(), std::vector<Expr>(a.size()));
    for (std::size_t r = 0; r < a.size(); ++r)
        for (std::size_t c = 0; c < a[r].size(); ++c) t[c][r] = a[r][c];
    return t;
}

} // namespace jetvar
