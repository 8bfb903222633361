#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "jetvar/expr.hpp"

namespace jetvar {

/// Symbol name -> value.
using Bindings = std::map<std::string, double>;

/// Flattened evaluation program for one or more expressions. Shared subtrees
/// are evaluated once. Inputs are addressed by slot, in the order of `inputs()`.
class CompiledExpr {
public:
    CompiledExpr() = default;
    /// Free symbols of `roots` become inputs, sorted by name, unless `inputs`
    /// is given; then every free symbol must be listed there.
    explicit CompiledExpr(std::span<const Expr> roots, std::vector<std::string> inputs = {});
    explicit CompiledExpr(const Expr& root, std::vector<std::string> inputs = {});

    const std::vector<std::string>& inputs() const noexcept { return inputs_; }
    std::size_t outputs() const noexcept { return roots_.size(); }

    /// Writes one value per root into `out`. Non-finite values propagate silently.
    void run(std::span<const double> in, std::span<double> out) const;
    std::vector<double> run(std::span<const double> in) const;
    /// Looks each input up by name; throws unbound-symbol if one is missing.
    std::vector<double> run(const Bindings& b) const;

private:
    enum class Op : std::uint8_t { Const, Input, Add, Mul, Pow, PowInt, Sin, Cos, Exp, Log };
    struct Instr {
        Op op;
        std::uint32_t first;  // operand start in operands_, or input slot
        std::uint32_t count;
        double value;  // constant, or exponent for Pow
    };
    std::vector<std::string> inputs_;
    std::vector<Instr> code_;
    std::vector<std::uint32_t> operands_;
    std::vector<std::uint32_t> roots_;
    mutable std::vector<double> regs_;
};

/// Throws unbound-symbol or domain-error (non-finite result).
double evaluate(const Expr& e, const Bindings& b);

struct ZeroTest {
    int trials = 100;
    double tol = 1e-10;
    std::uint64_t seed = 0x5eed;
    double lo = -2.0;
    double hi = 2.0;
};

/// Probabilistic zero test: e vanishes at `trials` random points drawn
/// uniformly from [lo, hi] per free symbol, relative to the magnitude of its
/// top-level summands. Points where evaluation is non-finite are redrawn, at
/// most 100 times per trial; running out of redraws reports false.
bool is_zero(const Expr& e, const ZeroTest& opts = {});

/// Largest |e(p)| / (1 + sum |term(p)|) seen over the same sampling as is_zero.
double zero_test_residual(const Expr& e, const ZeroTest& opts = {});

} // namespace jetvar
