#pragma once

#include <climits>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "sepkit/prec_real.hpp"
#include "sepkit/rational.hpp"

namespace sepkit {

/// pFq(upper; lower; argument).
struct HypergeometricSpec {
    std::vector<BigRational> upper;
    std::vector<BigRational> lower;
    BigRational argument{1};
};

namespace detail {

inline bool fits_long(const BigInt& z) { return z >= LONG_MIN && z <= LONG_MAX; }

/// x *= q, using single-limb MPFR operations when q has small parts.
inline void scale_by(Real& x, const BigRational& q)
{
    const BigInt num = numerator_of(q);
    const BigInt den = denominator_of(q);
    if (fits_long(num) && fits_long(den)) {
        mpfr_mul_si(x.backend().data(), x.backend().data(), num.convert_to<long>(), MPFR_RNDN);
        mpfr_div_si(x.backend().data(), x.backend().data(), den.convert_to<long>(), MPFR_RNDN);
    } else {
        x *= to_real(q);
    }
}
inline void scale_by(BigRational& x, const BigRational& q) { x *= q; }

inline void divide_by(Real& x, const BigRational& q)
{
    const BigInt num = numerator_of(q);
    const BigInt den = denominator_of(q);
    if (fits_long(num) && fits_long(den)) {
        mpfr_mul_si(x.backend().data(), x.backend().data(), den.convert_to<long>(), MPFR_RNDN);
        mpfr_div_si(x.backend().data(), x.backend().data(), num.convert_to<long>(), MPFR_RNDN);
    } else {
        x /= to_real(q);
    }
}
inline void divide_by(BigRational& x, const BigRational& q) { x /= q; }

template <class T>
T from_rational(const BigRational& q)
{
    if constexpr (std::is_same_v<T, BigRational>) {
        return q;
    } else {
        return to_real(q);
    }
}

/// Index of the first upper parameter that is a nonpositive integer, i.e. the
/// number of nonzero terms of a terminating series; -1 when none.
inline long termination_index(const std::vector<BigRational>& upper)
{
    long best = -1;
    for (const auto& a : upper) {
        if (is_nonpositive_integer(a)) {
            long n = (-a).convert_to<long>();
            if (best < 0 || n < best) {
                best = n;
            }
        }
    }
    return best;
}

} // namespace detail

/// Sum of a terminating series, exactly (BigRational) or at the current MPFR
/// working precision (Real). Term ratios are formed from the rational
/// parameters, so the Real path never rounds a parameter.
template <class T>
T terminating_sum(const HypergeometricSpec& spec)
{
    const long last = detail::termination_index(spec.upper);
    if (last < 0) {
        throw DomainError("series does not terminate");
    }
    T sum(1), term(1);
    for (long j = 0; j < last; ++j) {
        const BigRational bj(j);
        BigRational den(j + 1);
        for (const auto& b : spec.lower) {
            const BigRational f = b + bj;
            if (f == 0) {
                throw PoleError("lower parameter " + to_string(b) + " reaches zero at term " + std::to_string(j + 1)
                                + " before termination");
            }
            den *= f;
        }
        BigRational num = spec.argument;
        for (const auto& a : spec.upper) {
            num *= a + bj;
        }
        detail::scale_by(term, num / den);
        sum += term;
    }
    return sum;
}

/// Generalized hypergeometric series with a certified truncation bound.
///
/// Once every parameter shifted by n is positive, the ratio of later terms is
/// majorized by R(n) = |z| * prod max(1, (a_i+n)/(b_i+n)) with the extra upper
/// parameter paired with the factorial's (n+1). When R(n) < (1+|z|)/2 the
/// remaining tail is at most |t_n| R/(1-R).
inline PrecReal pfq_evaluate(const HypergeometricSpec& spec, int precision, long max_terms = 2000000)
{
    for (const auto& b : spec.lower) {
        if (is_nonpositive_integer(b)) {
            long last = detail::termination_index(spec.upper);
            long pole = (-b).convert_to<long>();
            if (last < 0 || pole < last) {
                throw PoleError("lower parameter " + to_string(b) + " is a pole of the series");
            }
        }
    }
    WorkingPrecision wp(precision + kGuardDigits);
    const long last = detail::termination_index(spec.upper);
    if (last >= 0) {
        Real sum = 1, term = 1, abs_sum = 1;
        for (long j = 0; j < last; ++j) {
            const BigRational bj(j);
            BigRational num = spec.argument;
            BigRational den(j + 1);
            for (const auto& a : spec.upper) num *= a + bj;
            for (const auto& b : spec.lower) den *= b + bj;
            detail::scale_by(term, num / den);
            sum += term;
            abs_sum += abs(term);
        }
        // cancellation is covered by bounding against the sum of |terms|
        double rounding = log10_abs(abs_sum) - (precision + kGuardDigits)
                          + std::log10(4.0 * (last + 1) * (spec.upper.size() + spec.lower.size() + 2));
        return make_prec(sum, precision, rounding);
    }
    const BigRational z = spec.argument;
    if (mp::abs(z) >= 1 && spec.upper.size() >= spec.lower.size() + 1) {
        throw ConvergenceError("non-terminating pFq with |argument| >= 1 does not converge");
    }
    if (spec.upper.size() > spec.lower.size() + 1) {
        throw ConvergenceError("non-terminating pFq with p > q+1 diverges");
    }
    const BigRational r0 = (1 + mp::abs(z)) / 2;
    const double target = -(precision + kGuardDigits) - 1.0;
    Real sum = 1, term = 1, abs_sum = 1;
    for (long n = 0; n < max_terms; ++n) {
        const BigRational bn(n);
        // majorant for ratios t_{m+1}/t_m, m >= n
        bool positive = true;
        BigRational R = mp::abs(z);
        std::size_t pair_with_factorial = spec.upper.size() > spec.lower.size() ? 1 : 0;
        for (std::size_t i = 0; i < spec.upper.size(); ++i) {
            const BigRational a = spec.upper[i] + bn;
            BigRational b;
            if (i < spec.lower.size()) {
                b = spec.lower[i] + bn;
            } else if (pair_with_factorial) {
                b = bn + 1;
            } else {
                b = 1;
            }
            if (a <= 0 || b <= 0) {
                positive = false;
                break;
            }
            if (a > b) {
                R *= a / b;
            }
        }
        if (positive && R < r0 && term != 0) {
            Real Rr = to_real(R);
            Real tail = abs(term) * Rr / (1 - Rr);
            double tail_log = log10_abs(tail);
            if (tail == 0 || tail_log - (sum == 0 ? 0.0 : log10_abs(sum)) < target) {
                double rounding = log10_abs(abs_sum) - (precision + kGuardDigits)
                                  + std::log10(4.0 * (n + 1) * (spec.upper.size() + spec.lower.size() + 2));
                return make_prec(sum, precision, detail::log10_sum(tail_log, rounding));
            }
        }
        BigRational num = z;
        BigRational den(n + 1);
        for (const auto& a : spec.upper) num *= a + bn;
        for (const auto& b : spec.lower) den *= b + bn;
        detail::scale_by(term, num / den);
        sum += term;
        abs_sum += abs(term);
    }
    throw ConvergenceError("pFq did not reach the requested precision within the term cap");
}

} // namespace sepkit
