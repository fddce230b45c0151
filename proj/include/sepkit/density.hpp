#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sepkit/hypergeometric.hpp"
#include "sepkit/moments.hpp"
#include "sepkit/prec_real.hpp"

namespace sepkit {

struct SupportInterval {
    BigRational a{-1, 16};
    BigRational b{1, 432};

    /// T = scale*X + shift maps [a, b] onto [-1, 1].
    BigRational scale() const { return 2 / (b - a); }
    BigRational shift() const { return -(a + b) / (b - a); }
};

inline void validate(const SupportInterval& s)
{
    if (!(s.a < s.b)) {
        throw DomainError("support requires a < b");
    }
}

enum class DensityMode { exact, floating };

/// Legendre expansion f(t) = sum_j lambda_j P_j(t) of the law of T on [-1, 1].
struct DensityModel {
    SupportInterval support;
    unsigned degree = 0;
    DensityMode mode = DensityMode::exact;
    int precision = 0; // requested digits (floating mode)
    int working_digits = 0;
    std::vector<BigRational> lambda_exact;
    std::vector<Real> lambda_real;
};

struct ProbabilityEstimate {
    PrecReal value;
    unsigned degree = 0;
    PrecReal half_degree_value;
    double tail_indicator = 0; // |lambda_N| * ||P_N||_2
    std::vector<std::string> warnings;
};

/// Binomial transform of raw moments to moments of T = s*X + t, through the
/// recurrence E[T^{m+1} X^i] = s E[T^m X^{i+1}] + t E[T^m X^i].
namespace detail {

/// out = (a*x + b*y)/d for Real with small integer coefficients.
inline void lincomb(Real& out, const Real& x, long a, const Real& y, long b, long d, Real& scratch)
{
    mpfr_mul_si(scratch.backend().data(), x.backend().data(), a, MPFR_RNDN);
    mpfr_mul_si(out.backend().data(), y.backend().data(), b, MPFR_RNDN);
    mpfr_add(out.backend().data(), out.backend().data(), scratch.backend().data(), MPFR_RNDN);
    mpfr_div_si(out.backend().data(), out.backend().data(), d, MPFR_RNDN);
}

inline bool small_ratio_pair(const BigRational& s, const BigRational& t, long& a, long& b, long& d)
{
    const BigInt dd = denominator_of(s) * denominator_of(t) / mp::gcd(denominator_of(s), denominator_of(t));
    const BigInt aa = numerator_of(s) * (dd / denominator_of(s));
    const BigInt bb = numerator_of(t) * (dd / denominator_of(t));
    const BigInt lim(1000000000L);
    if (mp::abs(aa) > lim || mp::abs(bb) > lim || dd > lim) {
        return false;
    }
    a = aa.convert_to<long>();
    b = bb.convert_to<long>();
    d = dd.convert_to<long>();
    return true;
}

} // namespace detail

template <class T>
std::vector<T> shifted_moments_as(const std::vector<T>& mu, const SupportInterval& support)
{
    validate(support);
    if (mu.empty() || mu[0] != 1) {
        throw DomainError("moment sequence must start with 1");
    }
    const BigRational s = support.scale();
    const BigRational t = support.shift();
    std::vector<T> cur = mu;
    std::vector<T> out;
    out.reserve(mu.size());
    out.push_back(cur[0]);
    long ia = 0, ib = 0, id = 1;
    bool fast = false;
    T scratch{};
    if constexpr (std::is_same_v<T, Real>) {
        fast = detail::small_ratio_pair(s, t, ia, ib, id);
    }
    for (std::size_t m = 1; m < mu.size(); ++m) {
        for (std::size_t i = 0; i + m < mu.size(); ++i) {
            if constexpr (std::is_same_v<T, Real>) {
                if (fast) {
                    detail::lincomb(cur[i], cur[i + 1], ia, cur[i], ib, id, scratch);
                    continue;
                }
            }
            T a = cur[i + 1];
            detail::scale_by(a, s);
            T b = cur[i];
            detail::scale_by(b, t);
            cur[i] = a + b;
        }
        out.push_back(cur[0]);
    }
    return out;
}

inline std::vector<BigRational> shifted_moments(const MomentSequence& mu, const SupportInterval& support)
{
    return shifted_moments_as(mu.values, support);
}

/// lambda_j = (2j+1)/2 * E[P_j(T)], with E[P_j(T) T^i] from the Legendre
/// three-term recurrence applied to the moment functional.
template <class T>
std::vector<T> legendre_lambdas(const std::vector<T>& tau)
{
    if (tau.empty() || tau[0] != 1) {
        throw DomainError("T-moments must start with 1");
    }
    const std::size_t N = tau.size() - 1;
    std::vector<T> lam;
    lam.reserve(N + 1);
    std::vector<T> prev = tau;                            // L_0(i) = E[T^i]
    std::vector<T> cur(tau.begin() + (N > 0 ? 1 : 0), tau.end()); // L_1(i) = E[T^{i+1}]
    lam.push_back(tau[0]);
    detail::scale_by(lam[0], BigRational(1, 2));
    if (N == 0) {
        return lam;
    }
    {
        T l1 = cur[0];
        detail::scale_by(l1, BigRational(3, 2));
        lam.push_back(l1);
    }
    T scratch{};
    for (std::size_t j = 1; j < N; ++j) {
        // L_{j+1}(i) = ((2j+1) L_j(i+1) - j L_{j-1}(i)) / (j+1), i <= N-j-1,
        // written over L_{j-1} in place
        const std::size_t len = N - j;
        for (std::size_t i = 0; i < len; ++i) {
            if constexpr (std::is_same_v<T, Real>) {
                detail::lincomb(prev[i], cur[i + 1], static_cast<long>(2 * j + 1), prev[i], -static_cast<long>(j),
                                static_cast<long>(j + 1), scratch);
            } else {
                prev[i] = (BigRational(2 * j + 1) * cur[i + 1] - BigRational(j) * prev[i]) / BigRational(j + 1);
            }
        }
        prev.resize(len);
        std::swap(prev, cur);
        T l = cur[0];
        detail::scale_by(l, BigRational(2 * (j + 1) + 1, 2));
        lam.push_back(l);
    }
    return lam;
}

inline DensityModel legendre_coefficients(const std::vector<BigRational>& t_moments, const SupportInterval& support = {})
{
    DensityModel m;
    m.support = support;
    m.degree = static_cast<unsigned>(t_moments.size() - 1);
    m.mode = DensityMode::exact;
    m.lambda_exact = legendre_lambdas(t_moments);
    return m;
}

namespace detail {

/// P(T > t0) from the first `degree`+1 coefficients, through
/// int_{t0}^1 P_j = (P_{j-1}(t0) - P_{j+1}(t0)) / (2j+1).
template <class T>
T legendre_tail(const std::vector<T>& lam, unsigned degree, const BigRational& t0_in)
{
    BigRational t0 = t0_in;
    if (t0 < -1) t0 = -1;
    if (t0 > 1) t0 = 1;
    const T x = from_rational<T>(t0);
    T total = lam[0] * (T(1) - x);
    T p_prev(1), p_cur = x; // P_{j-1}, P_j
    for (unsigned j = 1; j <= degree; ++j) {
        T p_next = p_cur * x;
        detail::scale_by(p_next, BigRational(2 * j + 1, j + 1));
        T back = p_prev;
        detail::scale_by(back, BigRational(j, j + 1));
        p_next -= back; // P_{j+1}
        T piece = lam[j] * (p_prev - p_next);
        detail::scale_by(piece, BigRational(1, 2 * j + 1));
        total += piece;
        p_prev = std::move(p_cur);
        p_cur = std::move(p_next);
    }
    return total;
}

} // namespace detail

/// Exact-mode P(X > c) as a rational.
inline BigRational tail_probability_exact(const DensityModel& model, const BigRational& c,
                                          std::optional<unsigned> degree = std::nullopt)
{
    if (model.mode != DensityMode::exact) {
        throw DomainError("tail_probability_exact needs an exact-mode model");
    }
    const unsigned deg = degree.value_or(model.degree);
    if (deg > model.degree) {
        throw RangeError("requested degree exceeds the model degree");
    }
    const BigRational t0 = model.support.scale() * c + model.support.shift();
    return detail::legendre_tail(model.lambda_exact, deg, t0);
}

/// P(X > c) under the model (c in or left of the support).
inline PrecReal tail_probability(const DensityModel& model, const BigRational& c, std::optional<unsigned> degree = std::nullopt)
{
    const unsigned deg = degree.value_or(model.degree);
    if (deg > model.degree) {
        throw RangeError("requested degree exceeds the model degree");
    }
    if (model.mode == DensityMode::exact) {
        return exact_prec(tail_probability_exact(model, c, deg), std::max(model.precision, 30));
    }
    const BigRational t0 = model.support.scale() * c + model.support.shift();
    WorkingPrecision wp(model.working_digits);
    Real v = detail::legendre_tail(model.lambda_real, deg, t0);
    return PrecReal{v, model.precision, std::nullopt};
}

/// Extra digits carried in floating mode: the Legendre transform of raw
/// moments loses about 0.71 digits per degree at the default
/// support; 0.8 leaves a margin.
inline int density_guard_digits(unsigned N) { return static_cast<int>(std::ceil(0.8 * N)) + 25; }

inline DensityModel build_density_model(int k, const BigRational& alpha, unsigned N, const SupportInterval& support,
                                        int precision, DensityMode mode)
{
    validate(support);
    DensityModel model;
    model.support = support;
    model.degree = N;
    model.mode = mode;
    model.precision = precision;
    if (mode == DensityMode::exact) {
        auto mu = moment_sequence(k, alpha, N);
        model.lambda_exact = legendre_lambdas(shifted_moments(mu, support));
        model.working_digits = precision;
        return model;
    }
    model.working_digits = precision + density_guard_digits(N);
    WorkingPrecision wp(model.working_digits);
    std::vector<Real> mu = moment_sequence_real(k, alpha, N);
    model.lambda_real = legendre_lambdas(shifted_moments_as(mu, support));
    return model;
}

/// Moments -> T-moments -> Legendre coefficients -> tail integral.
///
/// The reported certified digits come from the convergence diagnostic
/// |P_N - P_{N/2}| (the expansion's truncation error has no a-priori bound),
/// combined with the arithmetic error of the chosen mode.
inline ProbabilityEstimate estimate_probability(int k, const BigRational& alpha, unsigned N,
                                                const SupportInterval& support = {}, int precision = 30,
                                                const BigRational& c = BigRational(0),
                                                DensityMode mode = DensityMode::floating)
{
    if (N < 2) {
        throw DomainError("estimate_probability needs N >= 2");
    }
    detail::check_moment_args(k, alpha);
    DensityModel model = build_density_model(k, alpha, N, support, precision, mode);
    ProbabilityEstimate est;
    est.degree = N;
    PrecReal full = tail_probability(model, c);
    PrecReal half = tail_probability(model, c, N / 2);
    {
        WorkingPrecision wp(precision + kGuardDigits);
        Real diff = abs(full.value - half.value);
        double err = diff == 0 ? -(precision + 0.0) : log10_abs(diff);
        est.value = make_prec(Real(full.value), precision, err);
        est.half_degree_value = PrecReal{Real(half.value), precision, std::nullopt};
        Real lamN = mode == DensityMode::exact ? to_real(model.lambda_exact[N]) : Real(model.lambda_real[N]);
        est.tail_indicator = static_cast<double>(log10_abs(lamN)) == -std::numeric_limits<double>::infinity()
                                 ? 0.0
                                 : std::pow(10.0, log10_abs(lamN)) * std::sqrt(2.0 / (2.0 * N + 1.0));
    }
    if (est.value.certified_digits && *est.value.certified_digits < precision) {
        est.warnings.push_back("convergence diagnostic supports only " + std::to_string(*est.value.certified_digits)
                               + " of " + std::to_string(precision) + " requested digits");
    }
    return est;
}

} // namespace sepkit
