#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "jetvar/error.hpp"
#include "jetvar/expr.hpp"

namespace jetvar {

std::string to_sexpr(const Expr& e)
{
    switch (e.kind()) {
    case Kind::Number: return e.number().str();
    case Kind::Symbol: return e.name();
    case Kind::Func: return std::string("(") + fn_name(e.fn()) + " " + to_sexpr(e.args()[0]) + ")";
    default: break;
    }
    std::string out = e.kind() == Kind::Pow ? "(^" : (e.kind() == Kind::Mul ? "(*" : "(+");
    for (const auto& a : e.args()) {
        out += ' ';
        out += to_sexpr(a);
    }
    out += ')';
    return out;
}

namespace {

std::optional<Number> parse_number_token(std::string_view tok)
{
    if (tok.empty()) return std::nullopt;
    char c0 = tok[0];
    if (!(std::isdigit(static_cast<unsigned char>(c0)) || ((c0 == '-' || c0 == '+' || c0 == '.') && tok.size() > 1)))
        return std::nullopt;
    if (auto slash = tok.find('/'); slash != std::string_view::npos) {
        std::int64_t n = 0, d = 0;
        auto r1 = std::from_chars(tok.data(), tok.data() + slash, n);
        auto r2 = std::from_chars(tok.data() + slash + 1, tok.data() + tok.size(), d);
        if (r1.ec != std::errc() || r1.ptr != tok.data() + slash || r2.ec != std::errc() ||
            r2.ptr != tok.data() + tok.size() || d == 0)
            return std::nullopt;
        return Number::rational(n, d);
    }
    if (tok.find_first_of(".eEni") == std::string_view::npos) {
        std::int64_t n = 0;
        auto r = std::from_chars(tok.data(), tok.data() + tok.size(), n);
        if (r.ec != std::errc() || r.ptr != tok.data() + tok.size()) return std::nullopt;
        return Number(n);
    }
    std::string s(tok);
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) return std::nullopt;
    return Number::real(v);
}

struct SexprReader {
    std::string_view text;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(1, static_cast<int>(pos) + 1, msg); }

    void skip()
    {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    std::string_view atom()
    {
        std::size_t start = pos;
        while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) && text[pos] != '(' &&
               text[pos] != ')')
            ++pos;
        if (pos == start) fail("expected atom");
        return text.substr(start, pos - start);
    }

    Expr read()
    {
        skip();
        if (pos >= text.size()) fail("unexpected end of input");
        if (text[pos] == ')') fail("unexpected ')'");
        if (text[pos] != '(') {
            auto tok = atom();
            if (auto n = parse_number_token(tok)) return Expr(*n);
            return Expr::symbol(std::string(tok));
        }
        ++pos;
        skip();
        std::string op(atom());
        std::vector<Expr> args;
        for (;;) {
            skip();
            if (pos >= text.size()) fail("missing ')'");
            if (text[pos] == ')') {
                ++pos;
                break;
            }
            args.push_back(read());
        }
        if (op == "+") return add(std::move(args));
        if (op == "*") return mul(std::move(args));
        if (op == "^") {
            if (args.size() != 2) fail("'^' takes two arguments");
            return pow(args[0], args[1]);
        }
        if (args.size() != 1) fail("'" + op + "' takes one argument");
        if (op == "sin") return sin(args[0]);
        if (op == "cos") return cos(args[0]);
        if (op == "exp") return exp(args[0]);
        if (op == "log") return log(args[0]);
        if (op == "sqrt") return sqrt(args[0]);
        fail("unknown operator '" + op + "'");
    }
};

// ---- infix rendering ----

enum Prec { kSum = 1, kProduct = 2, kPower = 3, kAtom = 4 };

std::string render(const Expr& e, int ctx);

std::string paren(const std::string& s, bool wrap) { return wrap ? "(" + s + ")" : s; }

std::string render_number(const Number& n, int ctx)
{
    std::string s = n.str();
    bool compound = n.is_negative() || (n.exact() && n.den() != 1);
    return paren(s, compound && ctx > kSum);
}

// Renders |term| and reports its sign separately so sums print as a - b.
std::string render_magnitude(const Expr& t, bool& negative)
{
    negative = false;
    if (t.is_number() && t.number().is_negative()) {
        negative = true;
        return render_number(-t.number(), kSum);
    }
    if (t.kind() == Kind::Mul && t.args()[0].is_number() && t.args()[0].number().is_negative()) {
        negative = true;
        std::vector<Expr> fs(t.args().begin(), t.args().end());
        Number k = -fs[0].number();
        if (k.is_one())
            fs.erase(fs.begin());
        else
            fs[0] = Expr(k);
        if (fs.size() == 1) return render(fs[0], kSum);
        return render(mul(std::move(fs)), kSum);
    }
    return render(t, kSum);
}

std::string render(const Expr& e, int ctx)
{
    switch (e.kind()) {
    case Kind::Number: return render_number(e.number(), ctx);
    case Kind::Symbol: return e.name();
    case Kind::Func: return std::string(fn_name(e.fn())) + "(" + render(e.args()[0], 0) + ")";
    case Kind::Pow: {
        const Number& k = e.args()[1].number();
        if (k.exact() && k.num() == 1 && k.den() == 2) return "sqrt(" + render(e.args()[0], 0) + ")";
        std::string b = render(e.args()[0], kAtom);
        std::string x = (k.is_negative() || !k.is_integer()) ? "(" + k.str() + ")" : k.str();
        return paren(b + "^" + x, ctx > kPower);
    }
    case Kind::Mul: {
        std::vector<std::string> numer, denom;
        Number coeff(1);
        for (const auto& f : e.args()) {
            if (f.is_number()) {
                coeff = f.number();
                continue;
            }
            // Only powers that reparse to the same node go below the line:
            // sum^3 would be expanded by the parser, so sum^(-3) stays put.
            const bool sum_base = f.kind() == Kind::Pow && f.args()[0].kind() == Kind::Add;
            const Number k = f.kind() == Kind::Pow ? f.args()[1].number() : Number(1);
            if (f.kind() == Kind::Pow && k.is_negative() && (!sum_base || (-k).is_one())) {
                Expr inv = pow(f.args()[0], -k);
                denom.push_back(render(inv, kPower));
            } else {
                numer.push_back(render(f, kProduct));
            }
        }
        std::string s;
        bool neg = coeff.is_negative();
        Number mag = neg ? -coeff : coeff;
        if (mag.exact() && mag.den() != 1) {
            denom.insert(denom.begin(), std::to_string(mag.den()));
            mag = Number(mag.num());
        }
        if (!mag.is_one() || numer.empty()) numer.insert(numer.begin(), mag.str());
        for (std::size_t i = 0; i < numer.size(); ++i) s += (i ? "*" : "") + numer[i];
        if (!denom.empty()) {
            std::string d;
            for (std::size_t i = 0; i < denom.size(); ++i) d += (i ? "*" : "") + denom[i];
            s += "/" + paren(d, denom.size() > 1);
        }
        if (neg) return paren("-" + s, ctx > kSum);
        return paren(s, ctx > kProduct);
    }
    case Kind::Add: {
        std::string s;
        bool first = true;
        for (const auto& t : e.args()) {
            bool negative = false;
            std::string m = render_magnitude(t, negative);
            if (first)
                s += negative ? "-" + m : m;
            else
                s += negative ? " - " + m : " + " + m;
            first = false;
        }
        return paren(s, ctx > kSum);
    }
    }
    return "?";
}

// ---- infix parsing ----

struct InfixParser {
    std::string_view text;
    int line;
    int column_base;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& msg, std::size_t at) const
    {
        throw ParseError(line, column_base + static_cast<int>(at), msg);
    }

    void skip()
    {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool eat(char c)
    {
        skip();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    Expr parse_all()
    {
        Expr e = sum();
        skip();
        if (pos != text.size()) fail(std::string("unexpected '") + text[pos] + "'", pos);
        return e;
    }

    Expr sum()
    {
        Expr acc = product();
        for (;;) {
            if (eat('+'))
                acc = acc + product();
            else if (eat('-'))
                acc = acc - product();
            else
                return acc;
        }
    }

    Expr product()
    {
        Expr acc = unary();
        for (;;) {
            skip();
            std::size_t at = pos;
            if (eat('*')) {
                acc = acc * unary();
            } else if (eat('/')) {
                Expr d = unary();
                if (d.is_zero()) fail("division by zero", at);
                acc = acc / d;
            } else {
                return acc;
            }
        }
    }

    Expr unary()
    {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return power();
    }

    Expr power()
    {
        Expr base = primary();
        skip();
        std::size_t at = pos;
        if (eat('^')) {
            Expr e = unary();
            if (!e.is_number()) fail("exponent must be a number", at + 1);
            if (base.is_zero() && e.number().is_negative()) fail("division by zero", at);
            return pow(base, e.number());
        }
        return base;
    }

    Expr number()
    {
        std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        std::size_t dot = std::string_view::npos;
        if (pos < text.size() && text[pos] == '.') {
            dot = pos++;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        }
        bool has_exp = false;
        if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
            std::size_t save = pos++;
            if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
            if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
                has_exp = true;
                while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
            } else {
                pos = save;
            }
        }
        std::string tok(text.substr(start, pos - start));
        if (tok == ".") fail("malformed number", start);
        if (has_exp) return Expr::real(std::strtod(tok.c_str(), nullptr));
        std::string digits = tok;
        std::int64_t den = 1;
        if (dot != std::string_view::npos) {
            std::size_t frac = pos - dot - 1;
            digits.erase(dot - start, 1);
            if (frac > 17 || digits.size() > 18) return Expr::real(std::strtod(tok.c_str(), nullptr));
            for (std::size_t i = 0; i < frac; ++i) den *= 10;
        }
        if (digits.size() > 18) return Expr::real(std::strtod(tok.c_str(), nullptr));
        std::int64_t n = digits.empty() ? 0 : std::stoll(digits);
        return Expr(Number::rational(n, den));
    }

    Expr primary()
    {
        skip();
        if (pos >= text.size()) fail("unexpected end of expression", pos);
        char c = text[pos];
        if (c == '(') {
            ++pos;
            Expr e = sum();
            if (!eat(')')) fail("expected ')'", pos);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos;
            while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
                ++pos;
            std::string id(text.substr(start, pos - start));
            skip();
            if (pos < text.size() && text[pos] == '(') {
                ++pos;
                Expr a = sum();
                if (!eat(')')) fail("expected ')'", pos);
                if (id == "sin") return sin(a);
                if (id == "cos") return cos(a);
                if (id == "exp") return exp(a);
                if (id == "log") return log(a);
                if (id == "sqrt") return sqrt(a);
                fail("unknown function '" + id + "'", start);
            }
            if (id == "pi") return Expr::real(std::numbers::pi);
            return Expr::symbol(id);
        }
        fail(std::string("unexpected '") + c + "'", pos);
    }
};

} // namespace

Expr from_sexpr(std::string_view text)
{
    SexprReader r{text};
    Expr e = r.read();
    r.skip();
    if (r.pos != text.size()) r.fail("trailing input");
    return e;
}

std::string to_infix(const Expr& e) { return render(e, 0); }

Expr parse_infix(std::string_view text, int line, int column_base)
{
    InfixParser p{text, line, column_base};
    return p.parse_all();
}

} // namespace jetvar
