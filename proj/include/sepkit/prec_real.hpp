#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "sepkit/rational.hpp"

namespace sepkit {

using Real = mp::number<mp::mpfr_float_backend<0>, mp::et_off>;

/// Extra decimal digits carried internally on top of a requested precision.
inline constexpr int kGuardDigits = 15;

/// Sets the MPFR working precision (decimal digits) for the enclosing scope.
/// Every Real created inside the scope gets this precision. The setting is
/// process-wide, so precision changes must not race across threads.
class WorkingPrecision {
public:
    explicit WorkingPrecision(int digits10) : saved_(Real::default_precision())
    {
        Real::default_precision(static_cast<unsigned>(std::max(digits10, 20)));
    }
    ~WorkingPrecision() { Real::default_precision(saved_); }
    WorkingPrecision(const WorkingPrecision&) = delete;
    WorkingPrecision& operator=(const WorkingPrecision&) = delete;

private:
    unsigned saved_;
};

inline Real to_real(const BigRational& q) { return Real(q.backend()); }
inline Real to_real(const BigInt& z) { return Real(z); }

/// log10|x| without a full-precision logarithm; -inf for zero.
inline double log10_abs(const Real& x)
{
    if (x == 0) {
        return -std::numeric_limits<double>::infinity();
    }
    long e = 0;
    double m = mpfr_get_d_2exp(&e, x.backend().data(), MPFR_RNDN);
    return std::log10(std::abs(m)) + static_cast<double>(e) * std::log10(2.0);
}

/// Exact binary value of x as a rational.
inline BigRational exact_rational(const Real& x)
{
    BigInt mant;
    mpfr_exp_t e = mpfr_get_z_2exp(mant.backend().data(), x.backend().data());
    BigRational out(mant);
    if (e >= 0) {
        out *= BigRational(mp::pow(BigInt(2), static_cast<unsigned>(e)));
    } else {
        out /= BigRational(mp::pow(BigInt(2), static_cast<unsigned>(-e)));
    }
    return out;
}

/// A real number together with the working precision it was computed at and
/// a lower bound on its correct significant digits.
///
/// `certified_digits == c` means |value - truth| <= 0.5 * 10^(E - c) where
/// E = floor(log10|value|) + 1, i.e. the value is correct to c significant
/// digits. For a zero value the bound is read as 0.5 * 10^(-c).
struct PrecReal {
    Real value;
    int precision = 0;
    std::optional<int> certified_digits;
    /// log10 of the tracked absolute error bound when known; finer than the
    /// integer digit count, so chains of operations do not lose a digit per step.
    std::optional<double> error_log10;

    /// log10 of the absolute error bound; +inf when unknown.
    double abs_error_log10() const
    {
        if (error_log10) {
            return *error_log10;
        }
        if (!certified_digits) {
            return std::numeric_limits<double>::infinity();
        }
        double mag = value == 0 ? 0.0 : std::floor(log10_abs(value)) + 1.0;
        return mag - *certified_digits + std::log10(0.5);
    }
};

/// Certified digits implied by an absolute error bound 10^err_log10.
inline int digits_from_error(const Real& value, double err_log10, int precision)
{
    if (err_log10 == -std::numeric_limits<double>::infinity()) {
        return precision;
    }
    double mag = value == 0 ? 0.0 : std::floor(log10_abs(value)) + 1.0;
    double c = std::floor(mag - err_log10 + std::log10(0.5));
    return static_cast<int>(std::clamp(c, 0.0, static_cast<double>(precision)));
}

inline PrecReal make_prec(Real value, int precision, double err_log10)
{
    int c = digits_from_error(value, err_log10, precision);
    return PrecReal{std::move(value), precision, c, err_log10};
}

/// An exactly known value: only the final rounding to the working precision
/// contributes error.
inline PrecReal exact_prec(const BigRational& q, int precision)
{
    WorkingPrecision wp(precision + kGuardDigits);
    Real v = to_real(q);
    double err = v == 0 ? -std::numeric_limits<double>::infinity() : log10_abs(v) + 1.0 - (precision + kGuardDigits);
    return make_prec(std::move(v), precision, err);
}

namespace detail {
inline double log10_sum(double a, double b)
{
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    double hi = std::max(a, b), lo = std::min(a, b);
    return hi + std::log10(1.0 + std::pow(10.0, lo - hi));
}
inline std::optional<int> combine_known(const PrecReal& a, const PrecReal& b)
{
    if (!a.certified_digits || !b.certified_digits) return std::nullopt;
    return 0;
}
} // namespace detail

inline PrecReal operator+(const PrecReal& a, const PrecReal& b)
{
    int prec = std::min(a.precision, b.precision);
    WorkingPrecision wp(prec + kGuardDigits);
    Real v = a.value + b.value;
    if (!detail::combine_known(a, b)) {
        return PrecReal{v, prec, std::nullopt};
    }
    double rounding = std::floor(log10_abs(v)) + 1.0 - (prec + kGuardDigits);
    double err = detail::log10_sum(detail::log10_sum(a.abs_error_log10(), b.abs_error_log10()), rounding);
    return make_prec(std::move(v), prec, err);
}

inline PrecReal operator-(const PrecReal& a)
{
    return PrecReal{Real(-a.value), a.precision, a.certified_digits, a.error_log10};
}

inline PrecReal operator-(const PrecReal& a, const PrecReal& b) { return a + (-b); }

inline PrecReal operator*(const PrecReal& a, const PrecReal& b)
{
    int prec = std::min(a.precision, b.precision);
    WorkingPrecision wp(prec + kGuardDigits);
    Real v = a.value * b.value;
    if (!detail::combine_known(a, b)) {
        return PrecReal{v, prec, std::nullopt};
    }
    double ea = a.abs_error_log10(), eb = b.abs_error_log10();
    double err = detail::log10_sum(log10_abs(a.value) + eb, log10_abs(b.value) + ea);
    err = detail::log10_sum(err, ea + eb);
    err = detail::log10_sum(err, std::floor(log10_abs(v)) + 1.0 - (prec + kGuardDigits));
    return make_prec(std::move(v), prec, err);
}

inline PrecReal operator/(const PrecReal& a, const PrecReal& b)
{
    if (b.value == 0) {
        throw DomainError("division by zero");
    }
    int prec = std::min(a.precision, b.precision);
    WorkingPrecision wp(prec + kGuardDigits);
    Real v = a.value / b.value;
    if (!detail::combine_known(a, b)) {
        return PrecReal{v, prec, std::nullopt};
    }
    // relative errors add to first order; keep a factor 2 for the second order
    double rel_a = a.abs_error_log10() - log10_abs(a.value);
    double rel_b = b.abs_error_log10() - log10_abs(b.value);
    if (a.value == 0) rel_a = a.abs_error_log10();
    if (rel_b > -1.0) {
        return PrecReal{v, prec, 0};
    }
    double rel = detail::log10_sum(rel_a, rel_b) + std::log10(2.0);
    double err = rel + log10_abs(v);
    err = detail::log10_sum(err, std::floor(log10_abs(v)) + 1.0 - (prec + kGuardDigits));
    return make_prec(std::move(v), prec, err);
}

/// Decimal rendering with `digits` significant digits.
inline std::string to_decimal(const Real& x, int digits)
{
    return x.str(static_cast<std::streamsize>(std::max(digits, 1)), std::ios_base::fmtflags(0));
}

/// Renders the certified part only (at least one digit).
inline std::string to_decimal(const PrecReal& x)
{
    int digits = x.certified_digits.value_or(x.precision);
    return to_decimal(x.value, std::max(digits, 1));
}

} // namespace sepkit
