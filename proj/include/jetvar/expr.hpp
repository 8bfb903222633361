#pragma once

// Immutable symbolic expressions in canonical form.
//
// Every constructor canonicalizes: sums and products are flattened, like terms
// and like bases are collected, numeric constants are folded, products are
// distributed over sums and positive integer powers of sums are expanded.
// Powers of sums with negative or fractional exponent stay atomic, so rational
// functions are not brought to a common denominator; use is_zero() for
// identities that need that.

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jetvar/number.hpp"

namespace jetvar {

enum class Kind : std::uint8_t { Number, Symbol, Func, Pow, Mul, Add };
enum class Fn : std::uint8_t { Sin, Cos, Exp, Log };

const char* fn_name(Fn fn);

struct Node;

class Expr {
public:
    Expr();
    Expr(const Number& n);
    Expr(int n) : Expr(Number(n)) {}
    Expr(std::int64_t n) : Expr(Number(n)) {}

    static Expr symbol(std::string name);
    static Expr real(double v) { return Expr(Number::real(v)); }
    static Expr rational(std::int64_t num, std::int64_t den) { return Expr(Number::rational(num, den)); }

    Kind kind() const noexcept;
    bool is_number() const noexcept { return kind() == Kind::Number; }
    bool is_symbol() const noexcept { return kind() == Kind::Symbol; }
    bool is_zero() const noexcept;
    bool is_one() const noexcept;

    const Number& number() const;
    const std::string& name() const;
    Fn fn() const;
    /// Children: Func(arg), Pow(base, exponent), Mul(factors...), Add(terms...).
    std::span<const Expr> args() const;

    std::size_t hash() const noexcept;
    /// 64-bit bloom filter over the free symbols; zero bit means "symbol absent".
    std::uint64_t symbol_mask() const noexcept;
    std::size_t node_count() const;

    const Node* node() const noexcept { return node_.get(); }

    friend bool operator==(const Expr& a, const Expr& b);
    friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

private:
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;

    friend struct Build;
};

struct ExprHash {
    std::size_t operator()(const Expr& e) const noexcept { return e.hash(); }
};

/// Total order on canonical expressions; used to sort commutative children.
int compare(const Expr& a, const Expr& b);

struct ExprLess {
    bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

std::uint64_t symbol_bit(std::string_view name) noexcept;

// Canonical constructors.
Expr add(std::vector<Expr> terms);
Expr mul(std::vector<Expr> factors);
Expr pow(const Expr& base, const Number& exponent);
/// Exponent must reduce to a number.
Expr pow(const Expr& base, const Expr& exponent);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sqrt(const Expr& a);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
inline Expr& operator+=(Expr& a, const Expr& b) { return a = a + b; }
inline Expr& operator-=(Expr& a, const Expr& b) { return a = a - b; }
inline Expr& operator*=(Expr& a, const Expr& b) { return a = a * b; }

/// Rebuilds through the canonical constructors. Identity on anything built by
/// this library; idempotent by construction.
Expr simplify(const Expr& e);

/// Raw partial derivative with respect to a symbol name.
Expr partial(const Expr& e, const std::string& symbol);

using SubstitutionMap = std::map<std::string, Expr>;

/// Simultaneous substitution followed by canonicalization.
Expr substitute(const Expr& e, const SubstitutionMap& map);

std::set<std::string> free_symbols(const Expr& e);
bool depends_on(const Expr& e, const std::string& symbol);

/// Deterministic prefix serialization: (+ a b), (* 2 x), (^ x -1), (sin x).
std::string to_sexpr(const Expr& e);
Expr from_sexpr(std::string_view text);

/// Human-readable infix rendering; accepted back by parse_infix, though
/// floating constants with short decimal forms come back as exact rationals.
std::string to_infix(const Expr& e);

/// Infix grammar: + - * / ^, unary minus, parentheses, numbers (decimals are
/// read as exact rationals), identifiers, calls sin/cos/exp/log/sqrt, constant pi.
/// Throws ParseError with the column (offset by `column_base`) on failure.
Expr parse_infix(std::string_view text, int line = 1, int column_base = 1);

} // namespace jetvar
