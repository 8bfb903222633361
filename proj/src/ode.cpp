#include "jetvar/ode.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "jetvar/error.hpp"

namespace jetvar {

OdeSystem OdeSystem::from_exprs(const std::vector<Expr>& rhs, const std::string& time,
                                const std::vector<std::string>& state, const Bindings& constants)
{
    if (rhs.size() != state.size()) throw Error(ErrorKind::InvalidArgument, "one right-hand side per state variable");
    std::vector<std::string> inputs{time};
    inputs.insert(inputs.end(), state.begin(), state.end());
    std::vector<double> fixed;
    for (const auto& [k, v] : constants) {
        inputs.push_back(k);
        fixed.push_back(v);
    }
    auto prog = std::make_shared<CompiledExpr>(std::span<const Expr>(rhs), inputs);
    std::size_t n = state.size();
    return OdeSystem(n, [prog, fixed, n](double t, std::span<const double> y, std::span<double> dy) {
        thread_local std::vector<double> in;
        in.resize(1 + n + fixed.size());
        in[0] = t;
        for (std::size_t i = 0; i < n; ++i) in[1 + i] = y[i];
        for (std::size_t i = 0; i < fixed.size(); ++i) in[1 + n + i] = fixed[i];
        prog->run(in, dy);
    });
}

Trajectory::Trajectory(std::vector<double> times, std::vector<std::vector<double>> states,
                       std::vector<std::vector<double>> derivs)
    : times_(std::move(times)), states_(std::move(states)), derivs_(std::move(derivs))
{
    if (times_.size() < 2) throw Error(ErrorKind::InvalidArgument, "a trajectory needs at least two samples");
    if (states_.size() != times_.size() || derivs_.size() != times_.size())
        throw Error(ErrorKind::InvalidArgument, "trajectory arrays differ in length");
    for (std::size_t i = 1; i < times_.size(); ++i)
        if (!(times_[i] > times_[i - 1])) throw Error(ErrorKind::InvalidArgument, "trajectory grid must increase");
}

namespace {

struct Segment {
    std::size_t k;
    double s;
    double h;
};

Segment locate(const std::vector<double>& t, double x)
{
    if (x < t.front() || x > t.back()) throw Error(ErrorKind::Domain, "time outside the trajectory span");
    double h = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    auto k = static_cast<std::size_t>((x - t.front()) / h);
    if (k >= t.size() - 1) k = t.size() - 2;
    double hk = t[k + 1] - t[k];
    return {k, (x - t[k]) / hk, hk};
}

} // namespace

std::vector<double> Trajectory::at(double t) const
{
    auto [k, s, h] = locate(times_, t);
    double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    std::vector<double> out(states_[k].size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = h00 * states_[k][i] + h10 * h * derivs_[k][i] + h01 * states_[k + 1][i] + h11 * h * derivs_[k + 1][i];
    return out;
}

std::vector<double> Trajectory::deriv_at(double t) const
{
    auto [k, s, h] = locate(times_, t);
    double d00 = 6 * s * s - 6 * s, d10 = 3 * s * s - 4 * s + 1;
    double d01 = -6 * s * s + 6 * s, d11 = 3 * s * s - 2 * s;
    std::vector<double> out(states_[k].size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = (d00 * states_[k][i] + d01 * states_[k + 1][i]) / h + d10 * derivs_[k][i] + d11 * derivs_[k + 1][i];
    return out;
}

void Trajectory::write_csv(std::ostream& os, const std::vector<std::string>& names) const
{
    os << "t";
    for (const auto& n : names) os << ',' << n;
    os << '\n';
    char buf[40];
    for (std::size_t k = 0; k < times_.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", times_[k]);
        os << buf;
        for (double v : states_[k]) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            os << ',' << buf;
        }
        os << '\n';
    }
}

void rk4_step(const OdeSystem& sys, double t, std::vector<double>& y, double h)
{
    const std::size_t n = y.size();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    sys(t, y, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    sys(t + 0.5 * h, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    sys(t + 0.5 * h, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
    sys(t + h, tmp, k4);
    for (std::size_t i = 0; i < n; ++i) y[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
}

namespace {

std::size_t step_count(double t0, double t1, double h)
{
    if (!(h > 0)) throw Error(ErrorKind::InvalidArgument, "step must be positive");
    if (!(t1 != t0)) throw Error(ErrorKind::InvalidArgument, "empty integration span");
    return static_cast<std::size_t>(std::ceil(std::fabs(t1 - t0) / h - 1e-9));
}

void check_finite(const std::vector<double>& y, double t)
{
    for (double v : y)
        if (!std::isfinite(v)) throw Error(ErrorKind::NonfiniteState, "state became non-finite at t = " + std::to_string(t));
}

} // namespace

Trajectory rk4(const OdeSystem& sys, std::vector<double> y0, double t0, double t1, double h)
{
    if (y0.size() != sys.dim()) throw Error(ErrorKind::InvalidArgument, "initial state has the wrong dimension");
    if (!(t1 > t0)) throw Error(ErrorKind::InvalidArgument, "trajectory span must be increasing");
    std::size_t N = step_count(t0, t1, h);
    double step = (t1 - t0) / static_cast<double>(N);
    std::vector<double> times(N + 1);
    std::vector<std::vector<double>> states(N + 1), derivs(N + 1);
    std::vector<double> y = std::move(y0);
    check_finite(y, t0);
    for (std::size_t k = 0; k <= N; ++k) {
        double t = k == N ? t1 : t0 + static_cast<double>(k) * step;
        times[k] = t;
        states[k] = y;
        derivs[k].resize(y.size());
        sys(t, y, derivs[k]);
        check_finite(derivs[k], t);
        if (k < N) {
            rk4_step(sys, t, y, step);
            check_finite(y, t + step);
        }
    }
    return Trajectory(std::move(times), std::move(states), std::move(derivs));
}

std::vector<double> rk4_final(const OdeSystem& sys, std::vector<double> y, double t0, double t1, double h)
{
    if (y.size() != sys.dim()) throw Error(ErrorKind::InvalidArgument, "initial state has the wrong dimension");
    std::size_t N = step_count(t0, t1, h);
    double step = (t1 - t0) / static_cast<double>(N);
    for (std::size_t k = 0; k < N; ++k) {
        rk4_step(sys, t0 + static_cast<double>(k) * step, y, step);
        check_finite(y, t0 + static_cast<double>(k + 1) * step);
    }
    return y;
}

double simpson(const std::function<double(double)>& f, double a, double b, int n)
{
    if (n < 2 || n % 2 != 0) throw Error(ErrorKind::OddPanels, "Simpson needs an even panel count >= 2, got " + std::to_string(n));
    double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
    return s * h / 3.0;
}

} // namespace jetvar
