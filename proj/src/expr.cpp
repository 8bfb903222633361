#include "jetvar/expr.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "jetvar/error.hpp"

namespace jetvar {

struct Node {
    Kind kind = Kind::Number;
    Fn fn = Fn::Sin;
    Number num;
    std::string name;
    std::vector<Expr> args;
    std::size_t hash = 0;
    std::uint64_t mask = 0;
};

namespace {

constexpr std::size_t kMix = 0x9e3779b97f4a7c15ULL;

std::size_t mix(std::size_t h, std::size_t v)
{
    return (h ^ (v + kMix + (h << 6) + (h >> 2))) * 1000003ULL;
}

int rank(Kind k)
{
    switch (k) {
    case Kind::Number: return 0;
    case Kind::Symbol: return 1;
    case Kind::Func: return 2;
    case Kind::Pow: return 3;
    case Kind::Mul: return 4;
    case Kind::Add: return 5;
    }
    return 6;
}

// Positive integer powers of sums up to this degree are expanded.
constexpr std::int64_t kMaxExpandDegree = 8;

} // namespace

// Raw node factories; callers guarantee canonical children.
struct Build {
    static Expr wrap(Node&& n) { return Expr(std::make_shared<const Node>(std::move(n))); }

    static Expr number(const Number& v)
    {
        Node n;
        n.kind = Kind::Number;
        n.num = v;
        n.hash = mix(17, v.hash());
        return wrap(std::move(n));
    }

    static Expr symbol(std::string name)
    {
        Node n;
        n.kind = Kind::Symbol;
        n.hash = mix(29, std::hash<std::string>{}(name));
        n.mask = symbol_bit(name);
        n.name = std::move(name);
        return wrap(std::move(n));
    }

    static Expr compound(Kind kind, std::vector<Expr> args, Fn fn = Fn::Sin)
    {
        Node n;
        n.kind = kind;
        n.fn = fn;
        std::size_t h = mix(static_cast<std::size_t>(kind) + 101, static_cast<std::size_t>(fn));
        std::uint64_t m = 0;
        for (const auto& a : args) {
            h = mix(h, a.hash());
            m |= a.symbol_mask();
        }
        n.hash = h;
        n.mask = m;
        n.args = std::move(args);
        return wrap(std::move(n));
    }
};

namespace {

const Expr& zero_expr()
{
    static const Expr z = Build::number(Number(0));
    return z;
}

const Expr& one_expr()
{
    static const Expr o = Build::number(Number(1));
    return o;
}

} // namespace

const char* fn_name(Fn fn)
{
    switch (fn) {
    case Fn::Sin: return "sin";
    case Fn::Cos: return "cos";
    case Fn::Exp: return "exp";
    case Fn::Log: return "log";
    }
    return "?";
}

std::uint64_t symbol_bit(std::string_view name) noexcept
{
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return 1ULL << (h % 64);
}

Expr::Expr() : node_(zero_expr().node_) {}

Expr::Expr(const Number& n)
{
    if (n.exact() && n.den() == 1 && (n.num() == 0 || n.num() == 1))
        node_ = (n.num() == 0 ? zero_expr() : one_expr()).node_;
    else
        node_ = Build::number(n).node_;
}

Expr Expr::symbol(std::string name)
{
    if (name.empty()) throw Error(ErrorKind::InvalidArgument, "empty symbol name");
    return Build::symbol(std::move(name));
}

Kind Expr::kind() const noexcept { return node_->kind; }

bool Expr::is_zero() const noexcept { return node_->kind == Kind::Number && node_->num.is_zero(); }
bool Expr::is_one() const noexcept { return node_->kind == Kind::Number && node_->num.is_one(); }

const Number& Expr::number() const
{
    if (node_->kind != Kind::Number) throw Error(ErrorKind::InvalidArgument, "not a number");
    return node_->num;
}

const std::string& Expr::name() const
{
    if (node_->kind != Kind::Symbol) throw Error(ErrorKind::InvalidArgument, "not a symbol");
    return node_->name;
}

Fn Expr::fn() const
{
    if (node_->kind != Kind::Func) throw Error(ErrorKind::InvalidArgument, "not a function");
    return node_->fn;
}

std::span<const Expr> Expr::args() const { return node_->args; }
std::size_t Expr::hash() const noexcept { return node_->hash; }
std::uint64_t Expr::symbol_mask() const noexcept { return node_->mask; }

std::size_t Expr::node_count() const
{
    std::unordered_set<const Node*> seen;
    std::vector<const Node*> stack{node_.get()};
    while (!stack.empty()) {
        const Node* n = stack.back();
        stack.pop_back();
        if (!seen.insert(n).second) continue;
        for (const auto& a : n->args) stack.push_back(a.node());
    }
    return seen.size();
}

int compare(const Expr& a, const Expr& b)
{
    if (a.node() == b.node()) return 0;
    const Node& x = *a.node();
    const Node& y = *b.node();
    if (x.kind != y.kind) return rank(x.kind) < rank(y.kind) ? -1 : 1;
    switch (x.kind) {
    case Kind::Number: return x.num.compare(y.num);
    case Kind::Symbol: {
        int c = x.name.compare(y.name);
        return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case Kind::Func:
        if (x.fn != y.fn) return x.fn < y.fn ? -1 : 1;
        return compare(x.args[0], y.args[0]);
    default: break;
    }
    std::size_t n = std::min(x.args.size(), y.args.size());
    // Products and sums compare from the last (highest) child so that the
    // leading numeric coefficient only breaks ties.
    if (x.kind == Kind::Mul || x.kind == Kind::Add) {
        for (std::size_t i = 0; i < n; ++i) {
            int c = compare(x.args[x.args.size() - 1 - i], y.args[y.args.size() - 1 - i]);
            if (c != 0) return c;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            int c = compare(x.args[i], y.args[i]);
            if (c != 0) return c;
        }
    }
    if (x.args.size() != y.args.size()) return x.args.size() < y.args.size() ? -1 : 1;
    return 0;
}

bool operator==(const Expr& a, const Expr& b)
{
    if (a.node() == b.node()) return true;
    if (a.hash() != b.hash() || a.kind() != b.kind()) return false;
    return compare(a, b) == 0;
}

namespace {

bool negative_form(const Expr& a)
{
    switch (a.kind()) {
    case Kind::Number: return a.number().is_negative();
    case Kind::Mul: return a.args()[0].is_number() && a.args()[0].number().is_negative();
    case Kind::Add: return negative_form(a.args()[0]);
    default: return false;
    }
}

Expr product_node(const Number& coeff, std::vector<Expr> atoms)
{
    if (atoms.empty()) return Expr(coeff);
    if (coeff.is_one() && atoms.size() == 1) return atoms[0];
    std::sort(atoms.begin(), atoms.end(), ExprLess{});
    if (!coeff.is_one()) atoms.insert(atoms.begin(), Expr(coeff));
    return Build::compound(Kind::Mul, std::move(atoms));
}

// Non-coefficient part of a canonical term.
Expr term_rest(const Expr& t)
{
    auto a = t.args();
    if (a.size() == 2) return a[1];
    return Build::compound(Kind::Mul, std::vector<Expr>(a.begin() + 1, a.end()));
}

Expr scale(const Expr& rest, const Number& k)
{
    if (k.is_one()) return rest;
    std::vector<Expr> args;
    args.push_back(Expr(k));
    if (rest.kind() == Kind::Mul) {
        auto a = rest.args();
        args.insert(args.end(), a.begin(), a.end());
    } else {
        args.push_back(rest);
    }
    return Build::compound(Kind::Mul, std::move(args));
}

Expr distribute(const Expr& a, const Expr& b)
{
    auto terms_of = [](const Expr& e) {
        if (e.kind() == Kind::Add) return std::vector<Expr>(e.args().begin(), e.args().end());
        return std::vector<Expr>{e};
    };
    auto ta = terms_of(a);
    auto tb = terms_of(b);
    std::vector<Expr> out;
    out.reserve(ta.size() * tb.size());
    for (const auto& x : ta)
        for (const auto& y : tb) out.push_back(mul({x, y}));
    return add(std::move(out));
}

Expr pow_node(const Expr& base, const Number& e)
{
    return Build::compound(Kind::Pow, {base, Expr(e)});
}

} // namespace

Expr add(std::vector<Expr> terms)
{
    Number constant(0);
    std::unordered_map<Expr, Number, ExprHash> coeff;
    std::vector<Expr> order;
    std::function<void(const Expr&)> push = [&](const Expr& t) {
        Number k(1);
        Expr rest;
        switch (t.kind()) {
        case Kind::Number: constant += t.number(); return;
        case Kind::Add:
            for (const auto& a : t.args()) push(a);
            return;
        case Kind::Mul:
            if (t.args()[0].is_number()) {
                k = t.args()[0].number();
                rest = term_rest(t);
            } else {
                rest = t;
            }
            break;
        default: rest = t; break;
        }
        auto [it, inserted] = coeff.try_emplace(rest, k);
        if (inserted)
            order.push_back(rest);
        else
            it->second += k;
    };
    for (const auto& t : terms) push(t);

    std::vector<std::pair<Expr, Number>> kept;
    kept.reserve(order.size());
    for (const auto& r : order) {
        const Number& k = coeff.at(r);
        if (!k.is_zero()) kept.emplace_back(r, k);
    }
    std::sort(kept.begin(), kept.end(), [](const auto& x, const auto& y) { return compare(x.first, y.first) < 0; });

    std::vector<Expr> out;
    out.reserve(kept.size() + 1);
    if (!constant.is_zero()) out.push_back(Expr(constant));
    for (const auto& [r, k] : kept) out.push_back(scale(r, k));
    if (out.empty()) return Expr(constant.exact() ? Number(0) : constant);
    if (out.size() == 1) return out[0];
    return Build::compound(Kind::Add, std::move(out));
}

Expr mul(std::vector<Expr> factors)
{
    Number coeff(1);
    std::unordered_map<Expr, Number, ExprHash> exps;
    std::vector<Expr> order;
    std::function<void(const Expr&)> push = [&](const Expr& f) {
        switch (f.kind()) {
        case Kind::Number: coeff *= f.number(); return;
        case Kind::Mul:
            for (const auto& a : f.args()) push(a);
            return;
        default: break;
        }
        Expr base = f;
        Number e(1);
        if (f.kind() == Kind::Pow) {
            base = f.args()[0];
            e = f.args()[1].number();
        }
        auto [it, inserted] = exps.try_emplace(base, e);
        if (inserted)
            order.push_back(base);
        else
            it->second += e;
    };
    for (const auto& f : factors) push(f);
    if (coeff.is_zero()) return Expr(0);

    std::sort(order.begin(), order.end(), ExprLess{});
    std::vector<Expr> atoms;
    std::vector<Expr> sums;
    for (const auto& b : order) {
        const Number& e = exps.at(b);
        if (e.is_zero()) continue;
        Expr p = pow(b, e);
        switch (p.kind()) {
        case Kind::Number: coeff *= p.number(); break;
        case Kind::Add: sums.push_back(p); break;
        case Kind::Mul:
            for (const auto& a : p.args()) {
                if (a.is_number())
                    coeff *= a.number();
                else
                    atoms.push_back(a);
            }
            break;
        default: atoms.push_back(p); break;
        }
    }
    if (coeff.is_zero()) return Expr(0);
    Expr prod = product_node(coeff, std::move(atoms));
    for (const auto& s : sums) prod = distribute(prod, s);
    return prod;
}

Expr pow(const Expr& base, const Number& e)
{
    if (e.is_zero()) return Expr(1);
    if (e.is_one()) return base;
    switch (base.kind()) {
    case Kind::Number: {
        auto r = Number::pow(base.number(), e);
        if (r) return Expr(*r);
        return pow_node(base, e);
    }
    case Kind::Pow:
        if (e.is_integer()) return pow(base.args()[0], base.args()[1].number() * e);
        return pow_node(base, e);
    case Kind::Mul:
        if (e.is_integer()) {
            std::vector<Expr> fs;
            for (const auto& f : base.args()) fs.push_back(pow(f, e));
            return mul(std::move(fs));
        }
        return pow_node(base, e);
    case Kind::Add:
        if (e.is_integer() && e.num() > 1 && e.num() <= kMaxExpandDegree) {
            Expr acc = base;
            for (std::int64_t i = 1; i < e.num(); ++i) acc = distribute(acc, base);
            return acc;
        }
        return pow_node(base, e);
    default: return pow_node(base, e);
    }
}

Expr pow(const Expr& base, const Expr& exponent)
{
    if (!exponent.is_number()) throw Error(ErrorKind::InvalidArgument, "exponent must be a number");
    return pow(base, exponent.number());
}

Expr sin(const Expr& a)
{
    if (a.is_number()) {
        const Number& v = a.number();
        if (v.is_zero()) return Expr(0);
        if (!v.exact()) return Expr::real(std::sin(v.value()));
    }
    if (negative_form(a)) return -sin(-a);
    return Build::compound(Kind::Func, {a}, Fn::Sin);
}

Expr cos(const Expr& a)
{
    if (a.is_number()) {
        const Number& v = a.number();
        if (v.is_zero()) return Expr(1);
        if (!v.exact()) return Expr::real(std::cos(v.value()));
    }
    if (negative_form(a)) return cos(-a);
    return Build::compound(Kind::Func, {a}, Fn::Cos);
}

Expr exp(const Expr& a)
{
    if (a.is_number()) {
        const Number& v = a.number();
        if (v.is_zero()) return Expr(1);
        if (!v.exact()) return Expr::real(std::exp(v.value()));
    }
    return Build::compound(Kind::Func, {a}, Fn::Exp);
}

Expr log(const Expr& a)
{
    if (a.is_number()) {
        const Number& v = a.number();
        if (v.is_one()) return Expr(0);
        if (!v.exact() && v.value() > 0.0) return Expr::real(std::log(v.value()));
    }
    return Build::compound(Kind::Func, {a}, Fn::Log);
}

Expr sqrt(const Expr& a) { return pow(a, Number::rational(1, 2)); }

Expr operator+(const Expr& a, const Expr& b) { return add({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return add({a, mul({Expr(-1), b})}); }
Expr operator-(const Expr& a) { return mul({Expr(-1), a}); }
Expr operator*(const Expr& a, const Expr& b) { return mul({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return mul({a, pow(b, Number(-1))}); }

namespace {

template <class F>
Expr rebuild(const Expr& e, F&& child)
{
    switch (e.kind()) {
    case Kind::Number:
    case Kind::Symbol: return e;
    case Kind::Func: {
        Expr a = child(e.args()[0]);
        switch (e.fn()) {
        case Fn::Sin: return sin(a);
        case Fn::Cos: return cos(a);
        case Fn::Exp: return exp(a);
        case Fn::Log: return log(a);
        }
        return e;
    }
    case Kind::Pow: return pow(child(e.args()[0]), e.args()[1].number());
    case Kind::Mul:
    case Kind::Add: {
        std::vector<Expr> xs;
        xs.reserve(e.args().size());
        for (const auto& a : e.args()) xs.push_back(child(a));
        return e.kind() == Kind::Mul ? mul(std::move(xs)) : add(std::move(xs));
    }
    }
    return e;
}

} // namespace

Expr simplify(const Expr& e)
{
    std::unordered_map<const Node*, Expr> memo;
    std::function<Expr(const Expr&)> go = [&](const Expr& x) -> Expr {
        if (auto it = memo.find(x.node()); it != memo.end()) return it->second;
        Expr r = rebuild(x, go);
        memo.emplace(x.node(), r);
        return r;
    };
    return go(e);
}

Expr partial(const Expr& e, const std::string& symbol)
{
    const std::uint64_t bit = symbol_bit(symbol);
    std::unordered_map<const Node*, Expr> memo;
    std::function<Expr(const Expr&)> d = [&](const Expr& x) -> Expr {
        if ((x.symbol_mask() & bit) == 0) return Expr(0);
        if (auto it = memo.find(x.node()); it != memo.end()) return it->second;
        Expr r;
        switch (x.kind()) {
        case Kind::Number: r = Expr(0); break;
        case Kind::Symbol: r = Expr(x.name() == symbol ? 1 : 0); break;
        case Kind::Add: {
            std::vector<Expr> ts;
            for (const auto& a : x.args()) ts.push_back(d(a));
            r = add(std::move(ts));
            break;
        }
        case Kind::Mul: {
            auto fs = x.args();
            std::vector<Expr> ts;
            for (std::size_t i = 0; i < fs.size(); ++i) {
                Expr di = d(fs[i]);
                if (di.is_zero()) continue;
                std::vector<Expr> p(fs.begin(), fs.end());
                p[i] = di;
                ts.push_back(mul(std::move(p)));
            }
            r = add(std::move(ts));
            break;
        }
        case Kind::Pow: {
            Expr db = d(x.args()[0]);
            const Number& k = x.args()[1].number();
            r = db.is_zero() ? Expr(0) : mul({Expr(k), pow(x.args()[0], k - Number(1)), db});
            break;
        }
        case Kind::Func: {
            const Expr& a = x.args()[0];
            Expr da = d(a);
            if (da.is_zero()) {
                r = Expr(0);
                break;
            }
            switch (x.fn()) {
            case Fn::Sin: r = mul({cos(a), da}); break;
            case Fn::Cos: r = mul({Expr(-1), sin(a), da}); break;
            case Fn::Exp: r = mul({x, da}); break;
            case Fn::Log: r = mul({pow(a, Number(-1)), da}); break;
            }
            break;
        }
        }
        memo.emplace(x.node(), r);
        return r;
    };
    return d(e);
}

Expr substitute(const Expr& e, const SubstitutionMap& map)
{
    if (map.empty()) return e;
    std::uint64_t keys = 0;
    for (const auto& [k, v] : map) keys |= symbol_bit(k);
    std::unordered_map<const Node*, Expr> memo;
    std::function<Expr(const Expr&)> go = [&](const Expr& x) -> Expr {
        if ((x.symbol_mask() & keys) == 0) return x;
        if (auto it = memo.find(x.node()); it != memo.end()) return it->second;
        Expr r;
        if (x.is_symbol()) {
            auto it = map.find(x.name());
            r = it == map.end() ? x : it->second;
        } else {
            r = rebuild(x, go);
        }
        memo.emplace(x.node(), r);
        return r;
    };
    return go(e);
}

std::set<std::string> free_symbols(const Expr& e)
{
    std::set<std::string> out;
    std::unordered_set<const Node*> seen;
    std::vector<Expr> stack{e};
    while (!stack.empty()) {
        Expr x = stack.back();
        stack.pop_back();
        if (x.symbol_mask() == 0 || !seen.insert(x.node()).second) continue;
        if (x.is_symbol()) {
            out.insert(x.name());
            continue;
        }
        for (const auto& a : x.args()) stack.push_back(a);
    }
    return out;
}

bool depends_on(const Expr& e, const std::string& symbol)
{
    if ((e.symbol_mask() & symbol_bit(symbol)) == 0) return false;
    return free_symbols(e).count(symbol) > 0;
}

} // namespace jetvar
