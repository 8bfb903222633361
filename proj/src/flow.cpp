#include "jetvar/flow.hpp"

#include <cmath>

#include "jetvar/error.hpp"
#include "jetvar/ode.hpp"

namespace jetvar {

JetFlow::JetFlow(const JetChart& c, const std::vector<Expr>& X, int order)
{
    JetChart work = c.order() < order ? c.with_order(order) : c;
    SubstitutionMap prol = prolong_vertical_field(X, order, work);
    JetChart names = JetChart(work.base_names(), work.fiber_names(), std::max(1, order), work.parameter_names(),
                              work.perturbation_names())
                         .doubled();
    std::vector<Expr> rhs;
    for (const auto* j : work.fiber_jets(order)) {
        state_.push_back(j->name);
        rhs.push_back(prol.at(names.jet_name(work.n() + j->component, j->base_counts)));
    }
    fixed_ = work.base_names();
    fixed_.insert(fixed_.end(), work.parameter_names().begin(), work.parameter_names().end());
    std::vector<std::string> inputs = state_;
    inputs.insert(inputs.end(), fixed_.begin(), fixed_.end());
    rhs_ = std::make_shared<CompiledExpr>(std::span<const Expr>(rhs), inputs);
}

Bindings JetFlow::flow(const Bindings& point, double s, double h, double chart_bound) const
{
    std::vector<double> y0, fixed;
    for (const auto& n : state_) {
        auto it = point.find(n);
        if (it == point.end()) throw Error(ErrorKind::UnboundSymbol, n);
        y0.push_back(it->second);
    }
    for (const auto& n : fixed_) {
        auto it = point.find(n);
        fixed.push_back(it == point.end() ? 0.0 : it->second);
    }
    Bindings out = point;
    if (s == 0.0) return out;
    const std::size_t ns = state_.size();
    auto prog = rhs_;
    OdeSystem sys(ns, [prog, fixed, ns](double, std::span<const double> y, std::span<double> dy) {
        std::vector<double> in(ns + fixed.size());
        for (std::size_t i = 0; i < ns; ++i) in[i] = y[i];
        for (std::size_t i = 0; i < fixed.size(); ++i) in[ns + i] = fixed[i];
        prog->run(in, dy);
    });
    std::vector<double> y;
    try {
        y = rk4_final(sys, y0, 0.0, s, h);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::NonfiniteState) throw Error(ErrorKind::FlowLeftChart, e.what());
        throw;
    }
    for (std::size_t i = 0; i < ns; ++i) {
        if (!std::isfinite(y[i]) || std::fabs(y[i]) > chart_bound)
            throw Error(ErrorKind::FlowLeftChart, "flow left the chart in '" + state_[i] + "'");
        out[state_[i]] = y[i];
    }
    return out;
}

} // namespace jetvar
