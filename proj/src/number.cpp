#include "jetvar/number.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>

#include "jetvar/error.hpp"

namespace jetvar {

namespace {

using i128 = __int128;

constexpr i128 kMax = std::numeric_limits<std::int64_t>::max();
constexpr i128 kMin = std::numeric_limits<std::int64_t>::min();

i128 gcd128(i128 a, i128 b)
{
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

Number from128(i128 num, i128 den)
{
    if (den < 0) {
        num = -num;
        den = -den;
    }
    i128 g = gcd128(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    if (num > kMax || num <= kMin || den > kMax)
        return Number::real(static_cast<double>(num) / static_cast<double>(den));
    return Number::rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

// Integer k-th root if exact.
std::optional<std::int64_t> exact_root(std::int64_t v, std::int64_t k)
{
    if (v < 0) return std::nullopt;
    if (v < 2) return v;
    auto r = static_cast<std::int64_t>(std::llround(std::pow(static_cast<double>(v), 1.0 / static_cast<double>(k))));
    for (std::int64_t c = std::max<std::int64_t>(0, r - 1); c <= r + 1; ++c) {
        i128 p = 1;
        bool over = false;
        for (std::int64_t j = 0; j < k; ++j) {
            p *= c;
            if (p > kMax) {
                over = true;
                break;
            }
        }
        if (!over && p == v) return c;
    }
    return std::nullopt;
}

} // namespace

const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::UnknownSymbol: return "unknown-symbol";
    case ErrorKind::UnboundSymbol: return "unbound-symbol";
    case ErrorKind::Domain: return "domain-error";
    case ErrorKind::UnsupportedOrder: return "unsupported-order";
    case ErrorKind::OrderOverflow: return "order-overflow";
    case ErrorKind::AlreadyComposite: return "already-composite";
    case ErrorKind::JetDependence: return "dependence-on-jets";
    case ErrorKind::SingularJacobian: return "singular-jacobian";
    case ErrorKind::SingularMetric: return "singular-metric";
    case ErrorKind::AsymmetricInput: return "asymmetric-input";
    case ErrorKind::EndpointViolation: return "endpoint-violation";
    case ErrorKind::NonfiniteState: return "nonfinite-state";
    case ErrorKind::FlowLeftChart: return "flow-left-chart";
    case ErrorKind::OddPanels: return "odd-n";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::Parse: return "parse-error";
    }
    return "error";
}

Number Number::rational(std::int64_t num, std::int64_t den)
{
    if (den == 0) throw Error(ErrorKind::Domain, "zero denominator");
    Number r;
    if (den < 0) {
        if (num == std::numeric_limits<std::int64_t>::min() || den == std::numeric_limits<std::int64_t>::min())
            return real(static_cast<double>(num) / static_cast<double>(den));
        num = -num;
        den = -den;
    }
    std::int64_t g = std::gcd(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    r.num_ = num;
    r.den_ = den;
    return r;
}

Number Number::real(double v)
{
    Number r;
    r.exact_ = false;
    r.real_ = v;
    r.num_ = 0;
    r.den_ = 1;
    return r;
}

double Number::value() const noexcept
{
    return exact_ ? static_cast<double>(num_) / static_cast<double>(den_) : real_;
}

bool Number::is_zero() const noexcept { return exact_ ? num_ == 0 : real_ == 0.0; }
bool Number::is_one() const noexcept { return exact_ ? (num_ == 1 && den_ == 1) : real_ == 1.0; }
bool Number::is_negative() const noexcept { return exact_ ? num_ < 0 : real_ < 0.0; }

Number Number::operator-() const
{
    if (!exact_) return real(-real_);
    return from128(-static_cast<i128>(num_), den_);
}

Number operator+(const Number& a, const Number& b)
{
    if (!a.exact_ || !b.exact_) return Number::real(a.value() + b.value());
    return from128(static_cast<i128>(a.num_) * b.den_ + static_cast<i128>(b.num_) * a.den_,
                   static_cast<i128>(a.den_) * b.den_);
}

Number operator-(const Number& a, const Number& b) { return a + (-b); }

Number operator*(const Number& a, const Number& b)
{
    if (!a.exact_ || !b.exact_) return Number::real(a.value() * b.value());
    return from128(static_cast<i128>(a.num_) * b.num_, static_cast<i128>(a.den_) * b.den_);
}

Number operator/(const Number& a, const Number& b)
{
    if (b.is_zero()) throw Error(ErrorKind::Domain, "division by zero");
    if (!a.exact_ || !b.exact_) return Number::real(a.value() / b.value());
    return from128(static_cast<i128>(a.num_) * b.den_, static_cast<i128>(a.den_) * b.num_);
}

std::optional<Number> Number::pow(const Number& base, const Number& exponent)
{
    if (exponent.is_zero()) return Number(1);
    if (!base.exact_ || !exponent.exact_) {
        double v = std::pow(base.value(), exponent.value());
        if (!std::isfinite(v)) return std::nullopt;
        return real(v);
    }
    if (base.is_zero()) {
        if (exponent.is_negative()) return std::nullopt;
        return Number(0);
    }
    std::int64_t p = exponent.num_;
    std::int64_t q = exponent.den_;
    Number b = base;
    if (q != 1) {
        if (base.is_negative()) return std::nullopt;
        auto rn = exact_root(base.num_, q);
        auto rd = exact_root(base.den_, q);
        if (!rn || !rd) return std::nullopt;
        b = rational(*rn, *rd);
    }
    bool invert = p < 0;
    std::uint64_t e = invert ? static_cast<std::uint64_t>(-(p + 1)) + 1 : static_cast<std::uint64_t>(p);
    if (e > 4096) return real(std::pow(b.value(), static_cast<double>(p)));
    Number acc(1);
    Number sq = b;
    while (e > 0) {
        if (e & 1) acc = acc * sq;
        e >>= 1;
        if (e > 0) sq = sq * sq;
    }
    if (invert) return Number(1) / acc;
    return acc;
}

int Number::compare(const Number& o) const noexcept
{
    if (exact_ != o.exact_) return exact_ ? -1 : 1;
    if (exact_) {
        i128 l = static_cast<i128>(num_) * o.den_;
        i128 r = static_cast<i128>(o.num_) * den_;
        return l < r ? -1 : (l > r ? 1 : 0);
    }
    if (real_ < o.real_) return -1;
    if (real_ > o.real_) return 1;
    return 0;
}

std::size_t Number::hash() const noexcept
{
    if (!exact_) return std::hash<double>{}(real_) ^ 0x9e3779b97f4a7c15ULL;
    return std::hash<std::int64_t>{}(num_) * 31 + std::hash<std::int64_t>{}(den_);
}

std::string Number::str() const
{
    if (exact_) {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", real_);
    std::string s = buf;
    if (s.find_first_of(".eni") == std::string::npos) s += ".0";
    return s;
}

} // namespace jetvar
