#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "sepkit/prec_real.hpp"
#include "sepkit/rational.hpp"

namespace sepkit {

/// Rising factorial x(x+1)...(x+n-1); 1 for n = 0.
inline BigRational pochhammer(const BigRational& x, unsigned long n)
{
    BigRational out(1);
    BigRational term = x;
    for (unsigned long i = 0; i < n; ++i) {
        out *= term;
        term += 1;
    }
    return out;
}

inline BigInt factorial(unsigned long n)
{
    BigInt out;
    mpz_fac_ui(out.backend().data(), n);
    return out;
}

inline BigInt binomial(unsigned long n, unsigned long k)
{
    BigInt out;
    mpz_bin_uiui(out.backend().data(), n, k);
    return out;
}

namespace detail {

inline void check_not_pole(const Real& x, const char* what)
{
    if (x <= 0 && x == mp::floor(x)) {
        throw PoleError(std::string(what) + ": gamma pole at nonpositive integer " + to_decimal(x, 20));
    }
}

inline bool is_integer_real(const Real& x) { return x == mp::floor(x); }

// propagated absolute error of f(x) given |f'(x)| and the input error bound
inline double propagate(double log10_deriv, const PrecReal& x)
{
    return log10_deriv + x.abs_error_log10();
}

} // namespace detail

/// Rising factorial with a real argument and nonnegative integer order.
inline PrecReal pochhammer(const PrecReal& x, unsigned long n)
{
    WorkingPrecision wp(x.precision + kGuardDigits);
    Real out = 1;
    Real term = x.value;
    // relative error of each factor, summed
    double rel = -std::numeric_limits<double>::infinity();
    bool known = x.certified_digits.has_value();
    for (unsigned long i = 0; i < n; ++i) {
        if (term == 0) {
            return PrecReal{Real(0), x.precision, x.precision, -std::numeric_limits<double>::infinity()};
        }
        out *= term;
        if (known) {
            rel = detail::log10_sum(rel, x.abs_error_log10() - log10_abs(term));
        }
        term += 1;
    }
    if (!known) {
        return PrecReal{out, x.precision, std::nullopt};
    }
    // (1+e)^n - 1 <= 2*n*e for n*e small
    double err = rel + std::log10(2.0) + log10_abs(out);
    err = detail::log10_sum(err, log10_abs(out) + 1.0 - (x.precision + kGuardDigits) + std::log10(static_cast<double>(n) + 1.0));
    if (rel > -1.0) {
        return PrecReal{out, x.precision, 0};
    }
    return make_prec(out, x.precision, err);
}

/// Gamma function through MPFR (correctly rounded at the working precision).
inline PrecReal gamma(const PrecReal& x)
{
    WorkingPrecision wp(x.precision + kGuardDigits);
    detail::check_not_pole(x.value, "gamma");
    Real g = mp::tgamma(x.value);
    double err = log10_abs(g) + 1.0 - (x.precision + kGuardDigits);
    if (!x.certified_digits) {
        return PrecReal{g, x.precision, std::nullopt};
    }
    if (x.abs_error_log10() > -std::numeric_limits<double>::infinity()) {
        Real psi;
        mpfr_digamma(psi.backend().data(), x.value.backend().data(), MPFR_RNDN);
        err = detail::log10_sum(err, log10_abs(g) + log10_abs(psi) + x.abs_error_log10() + std::log10(2.0));
    }
    return make_prec(g, x.precision, err);
}

inline PrecReal log_gamma(const PrecReal& x)
{
    WorkingPrecision wp(x.precision + kGuardDigits);
    if (x.value <= 0) {
        throw DomainError("log_gamma requires x > 0, got " + to_decimal(x.value, 20));
    }
    Real lg = mp::lgamma(x.value);
    double err = (lg == 0 ? 0.0 : log10_abs(lg) + 1.0) - (x.precision + kGuardDigits);
    if (!x.certified_digits) {
        return PrecReal{lg, x.precision, std::nullopt};
    }
    if (x.abs_error_log10() > -std::numeric_limits<double>::infinity()) {
        Real psi;
        mpfr_digamma(psi.backend().data(), x.value.backend().data(), MPFR_RNDN);
        err = detail::log10_sum(err, log10_abs(psi) + x.abs_error_log10() + std::log10(2.0));
    }
    return make_prec(lg, x.precision, err);
}

/// Gamma(x + order)/Gamma(x) for real order.
inline PrecReal pochhammer_real(const PrecReal& x, const PrecReal& order)
{
    int prec = std::min(x.precision, order.precision);
    WorkingPrecision wp(prec + kGuardDigits);
    Real top = x.value + order.value;
    detail::check_not_pole(x.value, "pochhammer_real");
    detail::check_not_pole(top, "pochhammer_real");
    if (order.value >= 0 && detail::is_integer_real(order.value) && order.value < 100000
        && order.certified_digits && *order.certified_digits >= prec) {
        PrecReal xs{x.value, prec, x.certified_digits};
        return pochhammer(xs, order.value.convert_to<unsigned long>());
    }
    PrecReal num = gamma(PrecReal{top, prec, detail::combine_known(x, order) ? std::optional<int>(prec) : std::nullopt});
    if (num.certified_digits) {
        // input error of x + order
        double in = detail::log10_sum(x.abs_error_log10(), order.abs_error_log10());
        if (in > -std::numeric_limits<double>::infinity()) {
            num = gamma(PrecReal{top, prec, digits_from_error(top, in, prec)});
        }
    }
    return num / gamma(PrecReal{x.value, prec, x.certified_digits});
}

/// Exact real value of a rational at the given precision.
inline PrecReal real_of(const BigRational& q, int precision) { return exact_prec(q, precision); }

/// pi at the working precision.
inline PrecReal pi_value(int precision)
{
    WorkingPrecision wp(precision + kGuardDigits);
    Real p;
    mpfr_const_pi(p.backend().data(), MPFR_RNDN);
    double err = log10_abs(p) + 1.0 - (precision + kGuardDigits);
    return make_prec(p, precision, err);
}

} // namespace sepkit
