#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

namespace jetvar {

/// Scalar constant. Kept as an exact rational while numerator and denominator
/// fit in 64 bits; anything that overflows or touches a double becomes a double.
class Number {
public:
    Number() = default;
    Number(std::int64_t n) : num_(n) {}
    Number(int n) : num_(n) {}

    static Number rational(std::int64_t num, std::int64_t den);
    static Number real(double v);

    bool exact() const noexcept { return exact_; }
    std::int64_t num() const noexcept { return num_; }
    std::int64_t den() const noexcept { return den_; }
    double value() const noexcept;

    bool is_zero() const noexcept;
    bool is_one() const noexcept;
    bool is_integer() const noexcept { return exact_ && den_ == 1; }
    bool is_negative() const noexcept;

    Number operator-() const;
    friend Number operator+(const Number& a, const Number& b);
    friend Number operator-(const Number& a, const Number& b);
    friend Number operator*(const Number& a, const Number& b);
    friend Number operator/(const Number& a, const Number& b);
    Number& operator+=(const Number& o) { return *this = *this + o; }
    Number& operator*=(const Number& o) { return *this = *this * o; }

    /// base^exponent when it folds to a constant; nullopt when it must stay symbolic
    /// (irrational roots, division by zero, negative base with fractional exponent).
    static std::optional<Number> pow(const Number& base, const Number& exponent);

    /// Total order: exact before inexact, then by value.
    int compare(const Number& o) const noexcept;
    friend bool operator==(const Number& a, const Number& b) noexcept { return a.compare(b) == 0; }

    std::size_t hash() const noexcept;
    std::string str() const;

private:
    bool exact_ = true;
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
    double real_ = 0.0;
};

} // namespace jetvar
