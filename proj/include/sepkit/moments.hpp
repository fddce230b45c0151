#pragma once

#include <climits>
#include <string>
#include <vector>

#include "sepkit/exact_linalg.hpp"
#include "sepkit/hypergeometric.hpp"
#include "sepkit/rational.hpp"

namespace sepkit {

struct MomentSequence {
    int k = 0;
    BigRational alpha{1};
    std::vector<BigRational> values; // values[n] = <D^n>, n = 0..N
};

namespace detail {

inline void check_moment_args(int k, const BigRational& alpha)
{
    if (k < -1) {
        throw DomainError("k must be >= -1, got " + std::to_string(k));
    }
    if (alpha <= 0) {
        throw DomainError("alpha must be positive, got " + to_string(alpha));
    }
}

} // namespace detail

/// <|ρ|^k (|ρ^PT| - |ρ|)^n> / <|ρ|^k> as a terminating 4F3 at unit argument.
/// T is BigRational (exact) or Real (current working precision).
template <class T>
T d_moment_as(int k, const BigRational& alpha, unsigned n)
{
    detail::check_moment_args(k, alpha);
    if (n == 0) {
        return T(1);
    }
    const BigRational half(1, 2);
    const BigRational bk(k);
    const BigRational bn(n);
    const BigRational c = bn + 2 * bk + 2 + 5 * alpha;
    const BigRational d = bk + 3 * alpha + BigRational(3, 2);
    const BigRational e = 2 * bk + 6 * alpha + BigRational(5, 2);
    T pre(n % 2 == 0 ? 1 : -1);
    for (unsigned i = 0; i < n; ++i) {
        const BigRational bi(i);
        BigRational f = (alpha + bi) * (alpha + half + bi) * (c + bi);
        f /= 16 * (d + bi) * (e + 2 * bi) * (e + 2 * bi + 1);
        detail::scale_by(pre, f);
    }
    HypergeometricSpec spec{{-bn / 2, (1 - bn) / 2, bk + 1 + alpha, bk + 1 + 2 * alpha},
                            {1 - bn - alpha, half - bn - alpha, c},
                            BigRational(1)};
    T series;
    try {
        series = terminating_sum<T>(spec);
    } catch (const PoleError& err) {
        throw PoleError("d_moment(k=" + std::to_string(k) + ", alpha=" + to_string(alpha) + ", n=" + std::to_string(n)
                        + "): " + err.what());
    }
    return pre * series;
}

inline BigRational d_moment(int k, const BigRational& alpha, unsigned n) { return d_moment_as<BigRational>(k, alpha, n); }

/// <|ρ^PT|^n> under the Hilbert-Schmidt measure; n = 0 is 1 by definition.
template <class T>
T pt_moment_hs_as(const BigRational& alpha, unsigned n)
{
    detail::check_moment_args(0, alpha);
    if (n == 0) {
        return T(1);
    }
    const BigRational half(1, 2);
    const BigRational bn(n);
    const BigRational d = 3 * alpha + BigRational(3, 2);
    const BigRational e = 6 * alpha + BigRational(5, 2);
    T first(1);
    T second(1);
    const BigRational g = -2 * bn - 1 - 5 * alpha;
    for (unsigned i = 0; i < n; ++i) {
        const BigRational bi(i);
        const BigRational common = d + bi;
        const BigRational lower_e = (e + 2 * bi) * (e + 2 * bi + 1);
        detail::scale_by(first, (bi + 1) * (alpha + 1 + bi) * (2 * alpha + 1 + bi) / (64 * common * lower_e));
        detail::scale_by(second, (g + bi) * (alpha + bi) * (alpha + half + bi) / (16 * common * lower_e));
    }
    HypergeometricSpec spec{{-(bn - 2) / 2, -(bn - 1) / 2, -bn, alpha + 1, 2 * alpha + 1},
                            {1 - bn, bn + 2 + 5 * alpha, 1 - bn - alpha, half - bn - alpha},
                            BigRational(1)};
    T series;
    try {
        series = terminating_sum<T>(spec);
    } catch (const PoleError& err) {
        throw PoleError("pt_moment_hs(alpha=" + to_string(alpha) + ", n=" + std::to_string(n) + "): " + err.what());
    }
    return first + second * series;
}

inline BigRational pt_moment_hs(const BigRational& alpha, unsigned n) { return pt_moment_hs_as<BigRational>(alpha, n); }

/// Moments <D^n>, n = 0..N, each computed independently.
inline MomentSequence moment_sequence(int k, const BigRational& alpha, unsigned N)
{
    MomentSequence out{k, alpha, {}};
    out.values.reserve(N + 1);
    for (unsigned n = 0; n <= N; ++n) {
        out.values.push_back(d_moment(k, alpha, n));
    }
    return out;
}

namespace detail {

/// x *= (n1*n2)/(d1*d2) with single-limb MPFR operations; factor pairs are
/// multiplied in 128 bits and split again only when they overflow a long.
inline void mul_ratio(Real& x, __int128 n1, __int128 n2, __int128 d1, __int128 d2)
{
    auto apply = [&x](__int128 a, __int128 b, bool divide) {
        const __int128 prod = a * b;
        const __int128 lim = static_cast<__int128>(LONG_MAX);
        auto one = [&x, divide](__int128 v) {
            if (v > static_cast<__int128>(LONG_MAX) || v < -static_cast<__int128>(LONG_MAX)) {
                throw RangeError("moment kernel factor exceeds machine range");
            }
            if (divide) {
                mpfr_div_si(x.backend().data(), x.backend().data(), static_cast<long>(v), MPFR_RNDN);
            } else {
                mpfr_mul_si(x.backend().data(), x.backend().data(), static_cast<long>(v), MPFR_RNDN);
            }
        };
        if (prod <= lim && prod >= -lim) {
            one(prod);
        } else {
            one(a);
            one(b);
        }
    };
    apply(n1, n2, false);
    apply(d1, d2, true);
}

} // namespace detail

/// Same moments at the current MPFR working precision. With α = p/q every
/// parameter is an integer over D = 2q, so the prefactor is advanced from n
/// to n+1 and the series terms are formed with machine-integer factors.
inline std::vector<Real> moment_sequence_real(int k, const BigRational& alpha, unsigned N)
{
    detail::check_moment_args(k, alpha);
    const BigInt pz = numerator_of(alpha), qz = denominator_of(alpha);
    if (!detail::fits_long(pz) || !detail::fits_long(qz) || qz > 100000 || pz > 100000000) {
        std::vector<Real> out;
        for (unsigned n = 0; n <= N; ++n) {
            out.push_back(d_moment_as<Real>(k, alpha, n));
        }
        return out;
    }
    using i128 = __int128;
    const i128 p = pz.convert_to<long>(), q = qz.convert_to<long>();
    const i128 D = 2 * q;
    const i128 K = k;
    const i128 C0 = D * (2 * K + 2) + 10 * p; // D*(2k+2+5α)
    const i128 Dd = 2 * q * K + 6 * p + 3 * q;  // D*(k+3α+3/2)
    const i128 De = 4 * q * K + 12 * p + 5 * q; // D*(2k+6α+5/2)
    std::vector<Real> out;
    out.reserve(N + 1);
    out.emplace_back(1);
    Real pre = 1;
    for (unsigned un = 0; un < N; ++un) {
        const i128 n = un;
        // pre(n+1)/pre(n) = -(α+n)(α+1/2+n)(c0+2n)(c0+2n+1) / (16 (d+n)(c0+n)(e+2n)(e+2n+1))
        detail::mul_ratio(pre, -(2 * p + D * n), 2 * p + q + D * n, 16 * (Dd + D * n), C0 + D * n);
        detail::mul_ratio(pre, C0 + 2 * D * n, C0 + D + 2 * D * n, De + 2 * D * n, De + D + 2 * D * n);
        const i128 m = n + 1;
        // 4F3 terms, parameters scaled by D
        const i128 a1 = -q * m, a2 = q * (1 - m), a3 = D * (K + 1) + 2 * p, a4 = D * (K + 1) + 4 * p;
        const i128 b1 = D * (1 - m) - 2 * p, b2 = q - D * m - 2 * p, b3 = D * (m + 2 * K + 2) + 10 * p;
        Real sum = 1, term = 1;
        for (i128 j = 0;; ++j) {
            const i128 u1 = a1 + D * j, u2 = a2 + D * j;
            if (u1 == 0 || u2 == 0) {
                break;
            }
            const i128 l1 = b1 + D * j, l2 = b2 + D * j, l3 = b3 + D * j;
            if (l1 == 0 || l2 == 0 || l3 == 0) {
                throw PoleError("d_moment(k=" + std::to_string(k) + ", alpha=" + to_string(alpha)
                                + ", n=" + std::to_string(un + 1) + "): lower parameter reaches zero");
            }
            detail::mul_ratio(term, u1 * u2, (a3 + D * j) * (a4 + D * j), l1 * l2, l3 * D * (j + 1));
            sum += term;
        }
        out.push_back(pre * sum);
    }
    return out;
}

/// Hankel matrix [mu_{i+j}], i, j = 0..floor(N/2), of a moment list.
inline RationalMatrix hankel_matrix(const std::vector<BigRational>& mu)
{
    const std::size_t m = (mu.size() - 1) / 2 + 1;
    RationalMatrix h(m, std::vector<BigRational>(m));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            h[i][j] = mu[i + j];
        }
    }
    return h;
}

inline bool hankel_positive(const MomentSequence& seq) { return is_positive_semidefinite(hankel_matrix(seq.values)); }

} // namespace sepkit
