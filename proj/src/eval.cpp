#include "jetvar/eval.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

#include "jetvar/error.hpp"

namespace jetvar {

CompiledExpr::CompiledExpr(const Expr& root, std::vector<std::string> inputs)
    : CompiledExpr(std::span<const Expr>(&root, 1), std::move(inputs))
{
}

CompiledExpr::CompiledExpr(std::span<const Expr> roots, std::vector<std::string> inputs)
{
    std::unordered_map<std::string, std::uint32_t> slot;
    if (inputs.empty()) {
        std::set<std::string> all;
        for (const auto& r : roots) {
            auto s = free_symbols(r);
            all.insert(s.begin(), s.end());
        }
        inputs.assign(all.begin(), all.end());
    }
    inputs_ = std::move(inputs);
    for (std::uint32_t i = 0; i < inputs_.size(); ++i) slot.emplace(inputs_[i], i);

    std::unordered_map<const Node*, std::uint32_t> index;
    // Iterative post-order so deep expressions do not blow the stack.
    auto emit = [&](const Expr& root) -> std::uint32_t {
        std::vector<std::pair<Expr, bool>> stack{{root, false}};
        while (!stack.empty()) {
            auto [x, expanded] = stack.back();
            stack.pop_back();
            if (index.count(x.node())) continue;
            if (!expanded && !x.args().empty()) {
                stack.push_back({x, true});
                for (const auto& a : x.args())
                    if (!index.count(a.node())) stack.push_back({a, false});
                continue;
            }
            Instr in{Op::Const, 0, 0, 0.0};
            switch (x.kind()) {
            case Kind::Number: in.value = x.number().value(); break;
            case Kind::Symbol: {
                auto it = slot.find(x.name());
                if (it == slot.end()) throw Error(ErrorKind::UnboundSymbol, x.name());
                in.op = Op::Input;
                in.first = it->second;
                break;
            }
            case Kind::Func:
                switch (x.fn()) {
                case Fn::Sin: in.op = Op::Sin; break;
                case Fn::Cos: in.op = Op::Cos; break;
                case Fn::Exp: in.op = Op::Exp; break;
                case Fn::Log: in.op = Op::Log; break;
                }
                in.first = static_cast<std::uint32_t>(operands_.size());
                in.count = 1;
                operands_.push_back(index.at(x.args()[0].node()));
                break;
            case Kind::Pow: {
                const Number& k = x.args()[1].number();
                in.op = k.is_integer() ? Op::PowInt : Op::Pow;
                in.value = k.value();
                in.first = static_cast<std::uint32_t>(operands_.size());
                in.count = 1;
                operands_.push_back(index.at(x.args()[0].node()));
                break;
            }
            case Kind::Mul:
            case Kind::Add:
                in.op = x.kind() == Kind::Mul ? Op::Mul : Op::Add;
                in.first = static_cast<std::uint32_t>(operands_.size());
                in.count = static_cast<std::uint32_t>(x.args().size());
                for (const auto& a : x.args()) operands_.push_back(index.at(a.node()));
                break;
            }
            index.emplace(x.node(), static_cast<std::uint32_t>(code_.size()));
            code_.push_back(in);
        }
        return index.at(root.node());
    };
    for (const auto& r : roots) roots_.push_back(emit(r));
    regs_.resize(code_.size());
}

void CompiledExpr::run(std::span<const double> in, std::span<double> out) const
{
    if (in.size() < inputs_.size()) throw Error(ErrorKind::UnboundSymbol, "too few inputs");
    double* r = regs_.data();
    for (std::size_t i = 0; i < code_.size(); ++i) {
        const Instr& c = code_[i];
        const std::uint32_t* ops = operands_.data() + c.first;
        switch (c.op) {
        case Op::Const: r[i] = c.value; break;
        case Op::Input: r[i] = in[c.first]; break;
        case Op::Add: {
            double s = 0.0;
            for (std::uint32_t k = 0; k < c.count; ++k) s += r[ops[k]];
            r[i] = s;
            break;
        }
        case Op::Mul: {
            double p = 1.0;
            for (std::uint32_t k = 0; k < c.count; ++k) p *= r[ops[k]];
            r[i] = p;
            break;
        }
        case Op::PowInt: {
            double b = r[ops[0]];
            long n = static_cast<long>(c.value);
            if (n >= -4 && n <= 4) {
                double p = 1.0;
                for (long k = 0; k < std::labs(n); ++k) p *= b;
                r[i] = n < 0 ? 1.0 / p : p;
            } else {
                r[i] = std::pow(b, c.value);
            }
            break;
        }
        case Op::Pow: {
            double b = r[ops[0]];
            r[i] = b < 0.0 ? std::nan("") : std::pow(b, c.value);
            break;
        }
        case Op::Sin: r[i] = std::sin(r[ops[0]]); break;
        case Op::Cos: r[i] = std::cos(r[ops[0]]); break;
        case Op::Exp: r[i] = std::exp(r[ops[0]]); break;
        case Op::Log: {
            double a = r[ops[0]];
            r[i] = a <= 0.0 ? std::nan("") : std::log(a);
            break;
        }
        }
    }
    for (std::size_t k = 0; k < roots_.size(); ++k) out[k] = r[roots_[k]];
}

std::vector<double> CompiledExpr::run(std::span<const double> in) const
{
    std::vector<double> out(roots_.size());
    run(in, out);
    return out;
}

std::vector<double> CompiledExpr::run(const Bindings& b) const
{
    std::vector<double> in(inputs_.size());
    for (std::size_t i = 0; i < inputs_.size(); ++i) {
        auto it = b.find(inputs_[i]);
        if (it == b.end()) throw Error(ErrorKind::UnboundSymbol, inputs_[i]);
        in[i] = it->second;
    }
    return run(std::span<const double>(in));
}

double evaluate(const Expr& e, const Bindings& b)
{
    CompiledExpr c(e);
    double v = c.run(b)[0];
    if (!std::isfinite(v)) throw Error(ErrorKind::Domain, "non-finite value evaluating " + to_infix(e));
    return v;
}

namespace {

// Largest relative deviation seen; negative when some trial ran out of redraws.
double zero_scan(const Expr& e, const ZeroTest& opts, bool stop_early)
{
    if (opts.trials < 1) throw Error(ErrorKind::InvalidArgument, "trials must be >= 1");
    if (e.is_number()) {
        double v = std::fabs(e.number().value());
        return v;
    }
    std::vector<Expr> terms;
    if (e.kind() == Kind::Add)
        terms.assign(e.args().begin(), e.args().end());
    else
        terms.push_back(e);
    CompiledExpr prog(terms);
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> dist(opts.lo, opts.hi);
    std::vector<double> in(prog.inputs().size());
    std::vector<double> out(terms.size());
    double worst = 0.0;
    for (int t = 0; t < opts.trials; ++t) {
        bool ok = false;
        for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
            for (auto& v : in) v = dist(rng);
            prog.run(in, out);
            ok = std::all_of(out.begin(), out.end(), [](double v) { return std::isfinite(v); });
        }
        if (!ok) return -1.0;
        double sum = 0.0, mag = 0.0;
        for (double v : out) {
            sum += v;
            mag += std::fabs(v);
        }
        double rel = std::fabs(sum) / (1.0 + mag);
        worst = std::max(worst, rel);
        if (stop_early && rel > opts.tol) return worst;
    }
    return worst;
}

} // namespace

bool is_zero(const Expr& e, const ZeroTest& opts)
{
    double r = zero_scan(e, opts, true);
    return r >= 0.0 && r <= opts.tol;
}

double zero_test_residual(const Expr& e, const ZeroTest& opts) { return zero_scan(e, opts, false); }

} // namespace jetvar
