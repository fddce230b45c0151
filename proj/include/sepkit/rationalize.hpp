#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

#include "sepkit/prec_real.hpp"
#include "sepkit/rational.hpp"

namespace sepkit {

/// Simplest rational (smallest denominator, then smallest |numerator|) in the
/// closed interval [lo, hi]. This is the continued-fraction construction: the
/// expansions of both endpoints are followed while they agree.
inline BigRational simplest_between(BigRational lo, BigRational hi)
{
    if (lo > hi) {
        std::swap(lo, hi);
    }
    if (lo <= 0 && hi >= 0) {
        return BigRational(0);
    }
    if (hi < 0) {
        return -simplest_between(-hi, -lo);
    }
    BigInt fl = floor(lo);
    if (BigRational(fl) == lo) {
        return lo;
    }
    if (BigRational(fl + 1) <= hi) {
        return BigRational(fl + 1);
    }
    BigRational f(fl);
    return f + 1 / simplest_between(1 / (hi - f), 1 / (lo - f));
}

/// Farey neighbours of p/q among fractions with denominator <= max_den.
inline std::pair<BigRational, BigRational> farey_neighbours(const BigRational& x, const BigInt& max_den)
{
    BigInt p = numerator_of(x);
    BigInt q = denominator_of(x);
    BigInt inv;
    if (q == 1) {
        inv = 0;
    } else {
        BigInt pm = ((p % q) + q) % q;
        mpz_invert(inv.backend().data(), pm.backend().data(), q.backend().data());
    }
    // left: p*b - q*a = 1 with b = inv (mod q), largest b <= max_den
    BigInt b = inv + ((max_den - inv) / q) * q;
    BigInt a = (p * b - 1) / q;
    BigInt d0 = (q - inv) % q;
    BigInt d = d0 + ((max_den - d0) / q) * q;
    BigInt c = (p * d + 1) / q;
    return {BigRational(a, b), BigRational(c, d)};
}

/// The unique rational with denominator <= max_den inside the certified error
/// ball of v (the tracked error bound when present, else the digit count), or
/// nullopt when there is none. Throws AmbiguityError when more than one such
/// rational fits.
inline std::optional<BigRational> rationalize(const PrecReal& v, const BigInt& max_den)
{
    if (!v.certified_digits) {
        throw DomainError("rationalize needs a value with known certified digits");
    }
    if (max_den < 1) {
        throw DomainError("max_denominator must be positive");
    }
    BigRational center = exact_rational(v.value);
    const int mag = v.value == 0 ? 0 : static_cast<int>(std::floor(log10_abs(v.value))) + 1;
    const int e = mag - *v.certified_digits;
    const BigInt ten_pow = mp::pow(BigInt(10), static_cast<unsigned>(e >= 0 ? e : -e));
    BigRational radius = e >= 0 ? BigRational(ten_pow) / 2 : BigRational(BigInt(1), 2 * ten_pow);
    if (v.error_log10 && std::isfinite(*v.error_log10)) {
        // the tracked bound is finer than the digit count; round it up by 1%
        WorkingPrecision wp(30);
        const BigRational tracked = exact_rational(Real(pow(Real(10), Real(*v.error_log10)) * Real(1.01)));
        radius = std::min(radius, tracked);
    }
    BigRational lo = center - radius;
    BigRational hi = center + radius;
    BigRational cand = simplest_between(lo, hi);
    if (denominator_of(cand) > max_den) {
        return std::nullopt;
    }
    auto [left, right] = farey_neighbours(cand, max_den);
    if (left >= lo || right <= hi) {
        throw AmbiguityError("error ball [" + to_decimal(to_real(lo), 20) + ", " + to_decimal(to_real(hi), 20)
                             + "] holds more than one rational with denominator <= " + max_den.str()
                             + " (e.g. " + to_string(cand) + " and " + to_string(left >= lo ? left : right) + ")");
    }
    return cand;
}

inline std::optional<BigRational> rationalize(const PrecReal& v, long long max_den)
{
    return rationalize(v, BigInt(max_den));
}

} // namespace sepkit
