#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "jetvar/eval.hpp"

namespace jetvar {

/// dy/dt = f(t, y) with a fixed state dimension.
class OdeSystem {
public:
    using Rhs = std::function<void(double t, std::span<const double> y, std::span<double> dy)>;

    OdeSystem(std::size_t dim, Rhs f) : dim_(dim), f_(std::move(f)) {}

    /// Right-hand sides as expressions in `time` and `state` symbols; any other
    /// free symbol must be bound in `constants`.
    static OdeSystem from_exprs(const std::vector<Expr>& rhs, const std::string& time,
                                const std::vector<std::string>& state, const Bindings& constants = {});

    std::size_t dim() const { return dim_; }
    void operator()(double t, std::span<const double> y, std::span<double> dy) const { f_(t, y, dy); }

private:
    std::size_t dim_;
    Rhs f_;
};

/// Samples on a uniform grid with the right-hand side stored at each node,
/// so interpolation is cubic Hermite.
class Trajectory {
public:
    Trajectory(std::vector<double> times, std::vector<std::vector<double>> states,
               std::vector<std::vector<double>> derivs);

    const std::vector<double>& times() const { return times_; }
    const std::vector<std::vector<double>>& states() const { return states_; }
    const std::vector<std::vector<double>>& derivs() const { return derivs_; }
    std::size_t size() const { return times_.size(); }
    double t0() const { return times_.front(); }
    double t1() const { return times_.back(); }

    /// Hermite interpolation; throws domain-error outside [t0, t1].
    std::vector<double> at(double t) const;
    std::vector<double> deriv_at(double t) const;

    /// Header "t,<names...>" then one row per node, 17 significant digits.
    void write_csv(std::ostream& os, const std::vector<std::string>& names) const;

private:
    std::vector<double> times_;
    std::vector<std::vector<double>> states_;
    std::vector<std::vector<double>> derivs_;
};

/// One classical RK4 step from (t, y) with step h.
void rk4_step(const OdeSystem& sys, double t, std::vector<double>& y, double h);

/// Fixed-step RK4 over [t0, t1]. The step is shrunk so that it divides the
/// interval into a whole number of steps no larger than h. Throws
/// nonfinite-state with the time where the state stopped being finite.
Trajectory rk4(const OdeSystem& sys, std::vector<double> y0, double t0, double t1, double h);

/// Final state only, without storing the path.
std::vector<double> rk4_final(const OdeSystem& sys, std::vector<double> y0, double t0, double t1, double h);

/// Composite Simpson rule with n panels; n must be even and >= 2 (odd-panels).
double simpson(const std::function<double(double)>& f, double a, double b, int n);

} // namespace jetvar
