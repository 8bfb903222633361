#pragma once

#include <memory>
#include <string>
#include <vector>

#include "jetvar/eval.hpp"
#include "jetvar/jet.hpp"

namespace jetvar {

/// Flow of the prolongation J^kX of a vertical field X(x, y), acting on jet
/// points at fixed base point: ds y^i_I = d_I X^i. Transports a whole jet
/// exactly as dragging the section by the flow of X would.
class JetFlow {
public:
    JetFlow(const JetChart& c, const std::vector<Expr>& X, int order);

    /// Fiber-jet names carried by the flow, in state order.
    const std::vector<std::string>& state_names() const { return state_; }

    /// Flows the fiber jets in `point` (which also supplies base and parameter
    /// values) to parameter s with RK4 step h. Throws flow-left-chart when the
    /// state leaves |coordinate| <= chart_bound or stops being finite.
    Bindings flow(const Bindings& point, double s, double h, double chart_bound = 1e3) const;

private:
    std::vector<std::string> state_;
    std::vector<std::string> fixed_;
    std::shared_ptr<CompiledExpr> rhs_;
};

} // namespace jetvar
