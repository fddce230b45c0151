#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sepkit/hypergeometric.hpp"
#include "sepkit/polynomial.hpp"
#include "sepkit/prec_real.hpp"
#include "sepkit/rational.hpp"
#include "sepkit/special.hpp"

namespace sepkit {

/// Argument shared by every series in the family: (3/4)^3.
inline BigRational family_argument() { return BigRational(27, 64); }

struct ParameterSet {
    int k = 0;
    std::array<AffineParam, 6> lower;
    std::array<AffineParam, 6> upper;
    BigRational fixed_upper{2};
};

inline std::array<AffineParam, 6> lower_params(int k)
{
    if (k < -1) {
        throw DomainError("k must be >= -1");
    }
    const BigRational c = BigRational(2 * k, 5);
    return {AffineParam{1, c + BigRational(23, 10)}, AffineParam{1, c + BigRational(5, 2)},
            AffineParam{1, c + BigRational(27, 10)}, AffineParam{1, c + BigRational(29, 10)},
            AffineParam{1, c + BigRational(31, 10)}, AffineParam{1, BigRational(k + 3)}};
}

inline std::array<AffineParam, 6> upper_params(int k)
{
    if (k < -1) {
        throw DomainError("k must be >= -1");
    }
    const long long t0 = floor_div(k, 3), t1 = floor_div(k + 1, 3);
    const long long A = floor_div(k - 4, 5), B = floor_div(k - 3, 5), C = floor_div(k - 2, 5), D = floor_div(k - 1, 5);
    return {AffineParam{1, make_rational(4 * t0 + 2 * t1 + 11, 6)},
            AffineParam{1, make_rational(2 * t0 + 4 * t1 + 13, 6)},
            AffineParam{1, make_rational(3 * A + 2 * B + 2 * C + 3 * D + 16, 5)},
            AffineParam{1, make_rational(3 * A + 2 * B + C + 4 * D + 17, 5)},
            AffineParam{1, make_rational(2 * A + 3 * B + C + 4 * D + 18, 5)},
            AffineParam{1, make_rational(2 * A + 3 * B + C + 4 * D + 19, 5)}};
}

inline ParameterSet parameter_set(int k) { return ParameterSet{k, lower_params(k), upper_params(k), BigRational(2)}; }

inline int m_count(int k)
{
    static constexpr std::array<int, 11> table{3, 5, 5, 6, 6, 7, 9, 8, 10, 10, 10};
    if (k < -1 || k > 9) {
        throw RangeError("m_count is tabulated for -1 <= k <= 9, got " + std::to_string(k));
    }
    return table[static_cast<std::size_t>(k + 1)];
}

/// Series whose parameters are affine in α.
struct HypergeometricTemplate {
    std::string label;
    std::vector<AffineParam> upper;
    std::vector<AffineParam> lower;
    BigRational argument{27, 64};

    HypergeometricSpec at(const BigRational& alpha) const
    {
        HypergeometricSpec s;
        s.argument = argument;
        for (const auto& u : upper) s.upper.push_back(u(alpha));
        for (const auto& b : lower) s.lower.push_back(b(alpha));
        return s;
    }
};

/// Distinguished 7F6, its every-parameter-minus-one companion, then the
/// (7+j)F(6+j) with j extra upper 2's and lower 1's, j = 1..m_count(k).
inline std::vector<HypergeometricTemplate> pfq_family(int k)
{
    const int m = m_count(k);
    const ParameterSet ps = parameter_set(k);
    const AffineParam two{0, 2}, one{0, 1};
    std::vector<HypergeometricTemplate> out;
    HypergeometricTemplate base{"7F6", {two}, {}, family_argument()};
    for (const auto& u : ps.upper) base.upper.push_back(u);
    for (const auto& b : ps.lower) base.lower.push_back(b);
    out.push_back(base);
    HypergeometricTemplate minus{"7F6 minus one", {}, {}, family_argument()};
    for (const auto& u : base.upper) minus.upper.push_back(u.shifted(-1));
    for (const auto& b : base.lower) minus.lower.push_back(b.shifted(-1));
    out.push_back(minus);
    for (int j = 1; j <= m; ++j) {
        HypergeometricTemplate t = base;
        t.label = std::to_string(7 + j) + "F" + std::to_string(6 + j);
        for (int i = 0; i < j; ++i) {
            t.upper.insert(t.upper.begin(), two);
            t.lower.push_back(one);
        }
        out.push_back(std::move(t));
    }
    return out;
}

/// G1 step ratio G1(α+1)/G1(α) = (27/64) Π(u_i(α) - 1) / Π b_i(α).
inline BigRational g1_step(int k, const BigRational& alpha)
{
    const auto u = upper_params(k);
    const auto b = lower_params(k);
    BigRational r = family_argument();
    for (const auto& x : u) r *= x(alpha) - 1;
    for (const auto& x : b) r /= x(alpha);
    return r;
}

/// Exact G1 at integer α >= 1.
inline BigRational g1(int k, long alpha)
{
    if (alpha < 1) {
        throw DomainError("exact g1 needs integer alpha >= 1");
    }
    BigRational out(1);
    for (long a = 1; a < alpha; ++a) {
        out *= g1_step(k, BigRational(a));
    }
    return out;
}

/// G1 = (27/64)^(α-1) Π (u_i(0))_{α-1} / Π (b_i(1))_{α-1} for rational α > 0.
inline PrecReal g1(int k, const BigRational& alpha, int precision)
{
    if (alpha <= 0) {
        throw DomainError("g1 needs alpha > 0");
    }
    if (is_integer(alpha)) {
        return exact_prec(g1(k, alpha.convert_to<long>()), precision);
    }
    const auto u = upper_params(k);
    const auto b = lower_params(k);
    const PrecReal order = exact_prec(alpha - 1, precision);
    PrecReal out = exact_prec(BigRational(1), precision);
    for (const auto& x : u) out = out * pochhammer_real(exact_prec(x(BigRational(0)), precision), order);
    for (const auto& x : b) out = out / pochhammer_real(exact_prec(x(BigRational(1)), precision), order);
    WorkingPrecision wp(precision + kGuardDigits);
    Real z = pow(to_real(family_argument()), to_real(alpha - 1));
    return out * make_prec(z, precision, log10_abs(z) - (precision + kGuardDigits));
}

struct WeightedTerm {
    Polynomial weight;
    HypergeometricTemplate spec;
};

struct WeightedHypergeometricSum {
    std::vector<WeightedTerm> terms;
};

/// Family term selected by the number of extra upper 2's (0 = distinguished
/// 7F6); `minus_one` picks the companion with every parameter reduced by 1.
inline HypergeometricTemplate family_member(int k, int extra_upper_twos, bool minus_one)
{
    auto fam = pfq_family(k);
    if (minus_one) {
        if (extra_upper_twos != 0) {
            throw DomainError("the minus-one series has no extra upper 2's");
        }
        return fam[1];
    }
    if (extra_upper_twos < 0 || extra_upper_twos > m_count(k)) {
        throw RangeError("extra_upper_twos must lie in [0, " + std::to_string(m_count(k)) + "]");
    }
    return extra_upper_twos == 0 ? fam[0] : fam[static_cast<std::size_t>(extra_upper_twos) + 1];
}

inline PrecReal g2_weighted_sum(const WeightedHypergeometricSum& ws, const BigRational& alpha, int precision)
{
    PrecReal total = exact_prec(BigRational(0), precision);
    for (const auto& t : ws.terms) {
        const BigRational w = t.weight(alpha);
        if (w == 0) {
            continue;
        }
        total = total + exact_prec(w, precision) * pfq_evaluate(t.spec.at(alpha), precision);
    }
    return total;
}

struct QPolynomial {
    Polynomial poly;
    std::optional<Polynomial> extra_factor;
};

/// Irreducible factors of the inhomogeneous coefficients, k = -1..4.
inline QPolynomial q_polynomial(int k)
{
    switch (k) {
    case -1:
        return {Polynomial{54, 938, 5645, 12625, 9250}, std::nullopt};
    case 0:
        return {Polynomial{63000, 410694, 1042015, 1289125, 779750, 185000}, std::nullopt};
    case 1:
        return {Polynomial{246960, 1284280, 2724024, 3013197, 1830820, 578300, 74000}, std::nullopt};
    case 2:
        return {Polynomial{22004136, 100092606, 192332891, 202090226, 125164535, 45576950, 9002000, 740000},
                std::nullopt};
    case 3:
        return {Polynomial{134548128, 471120306, 698007782, 566336789, 271168745, 76382750, 11666000, 740000},
                std::nullopt};
    case 4:
        return {Polynomial{175452420, 522054355, 656629192, 451645197, 182972656, 43492140, 5584000, 296000},
                Polynomial{9, 4}};
    default:
        throw RangeError("q_polynomial is available for -1 <= k <= 4, got " + std::to_string(k));
    }
}

/// Q(k, 1) = G2(1) for k = -1..9.
inline BigRational q_initial(int k)
{
    static const std::array<const char*, 11> table{"1/14",           "4/33",           "45/286",
                                                   "1553/8398",      "3073/14858",     "8348/37145",
                                                   "188373/785726",  "1096583/4342170", "6050627/22951470",
                                                   "160298199/586426690", "13988600951/49611697974"};
    if (k < -1 || k > 9) {
        throw RangeError("Q(k,1) is tabulated for -1 <= k <= 9, got " + std::to_string(k));
    }
    return parse_rational(table[static_cast<std::size_t>(k + 1)]);
}

namespace detail {

inline void check_concise_k(int k)
{
    if (k != 0 && k != 1) {
        throw RangeError("concise formulas exist for k = 0 and k = 1 only");
    }
}

inline BigRational pow2(long e)
{
    BigInt p = mp::pow(BigInt(2), static_cast<unsigned>(e >= 0 ? e : -e));
    return e >= 0 ? BigRational(p) : BigRational(BigInt(1), p);
}

} // namespace detail

/// Exact f(α) = Q(k,α) - Q(k,α+1) where the gamma ratios are rational:
/// half-integer α for k = 0, integer α for k = 1.
inline std::optional<BigRational> concise_term_exact(int k, const BigRational& alpha)
{
    detail::check_concise_k(k);
    if (alpha <= 0) {
        throw DomainError("concise_term needs alpha > 0");
    }
    if (k == 0) {
        if (!is_integer(2 * alpha)) {
            return std::nullopt;
        }
        // Γ(5α+2)/Γ(α+1) = (α+1)_{4α+1}, Γ(2α+3) = (2α+2)!, Γ(3α+5/2)/Γ(5α+13/2) = 1/(3α+5/2)_{2α+4}
        const long four_a = (4 * alpha).convert_to<long>();
        const long two_a = (2 * alpha).convert_to<long>();
        BigRational v = q_polynomial(0).poly(alpha) * detail::pow2(-four_a - 6);
        v *= pochhammer(alpha + 1, static_cast<unsigned long>(four_a + 1));
        v /= 6 * BigRational(factorial(static_cast<unsigned long>(two_a + 2)));
        v /= pochhammer(3 * alpha + BigRational(5, 2), static_cast<unsigned long>(two_a + 4));
        return v;
    }
    if (!is_integer(alpha)) {
        return std::nullopt;
    }
    // Γ(5/6)Γ(7/6) = π/3 and Γ(17/10)Γ(19/10)Γ(21/10)Γ(23/10) = 27027·4π²/10^6
    const long n = alpha.convert_to<long>();
    const unsigned long un = static_cast<unsigned long>(n);
    BigRational v = BigRational(9, 1000000) * (5 * alpha + 1) * (5 * alpha + 2) * (5 * alpha + 3) * q_polynomial(1).poly(alpha);
    v *= BigRational(mp::pow(BigInt(27), static_cast<unsigned>(n)), mp::pow(BigInt(50000), static_cast<unsigned>(n)));
    v *= BigRational(factorial(5 * un - 1), factorial(un - 1) * factorial(2 * un + 4));
    v *= pochhammer(BigRational(5, 6), un) * pochhammer(BigRational(7, 6), un);
    v /= pochhammer(BigRational(17, 10), un) * pochhammer(BigRational(19, 10), un) * pochhammer(BigRational(21, 10), un)
         * pochhammer(BigRational(23, 10), un);
    v *= BigRational(1000000, 12 * 27027);
    return v;
}

/// f(α) for any rational α > 0 (exact fast path when available).
inline PrecReal concise_term(int k, const BigRational& alpha, int precision)
{
    if (auto ex = concise_term_exact(k, alpha)) {
        return exact_prec(*ex, precision);
    }
    auto G = [precision](const BigRational& x) { return gamma(exact_prec(x, precision)); };
    auto R = [precision](const BigRational& x) { return exact_prec(x, precision); };
    if (k == 0) {
        PrecReal two_pow;
        {
            WorkingPrecision wp(precision + kGuardDigits);
            Real p = pow(Real(2), to_real(-4 * alpha - 6));
            two_pow = make_prec(p, precision, log10_abs(p) - (precision + kGuardDigits));
        }
        PrecReal num = R(q_polynomial(0).poly(alpha)) * two_pow * G(3 * alpha + BigRational(5, 2)) * G(5 * alpha + 2);
        PrecReal den = R(BigRational(6)) * G(alpha + 1) * G(2 * alpha + 3) * G(5 * alpha + BigRational(13, 2));
        return num / den;
    }
    PrecReal ratio_pow;
    {
        WorkingPrecision wp(precision + kGuardDigits);
        Real p = pow(to_real(BigRational(27, 50000)), to_real(alpha));
        ratio_pow = make_prec(p, precision, log10_abs(p) - (precision + kGuardDigits));
    }
    PrecReal q = pi_value(precision) * R(BigRational(9, 1000000) * (5 * alpha + 1) * (5 * alpha + 2) * (5 * alpha + 3)
                                          * q_polynomial(1).poly(alpha));
    PrecReal num = q * ratio_pow * G(5 * alpha) * G(alpha + BigRational(5, 6)) * G(alpha + BigRational(7, 6));
    PrecReal den = G(alpha) * G(alpha + BigRational(17, 10)) * G(alpha + BigRational(19, 10))
                   * G(alpha + BigRational(21, 10)) * G(alpha + BigRational(23, 10)) * G(2 * alpha + 5);
    return num / den;
}

/// Q(k, α) = Σ_{i>=0} f(α+i) with a geometric tail bound: once the observed
/// term ratio drops below r0 = (27/64 + 1)/2 the remainder is taken to be at
/// most t·r0/(1-r0).
inline PrecReal concise_Q(int k, const BigRational& alpha, int precision, long max_terms = 100000)
{
    detail::check_concise_k(k);
    const int inner = precision + 10;
    const double r0 = (27.0 / 64.0 + 1.0) / 2.0;
    PrecReal sum = exact_prec(BigRational(0), inner);
    PrecReal prev_term;
    bool have_prev = false;
    for (long i = 0; i < max_terms; ++i) {
        PrecReal t = concise_term(k, alpha + i, inner);
        sum = sum + t;
        if (have_prev && prev_term.value != 0) {
            double ratio = std::pow(10.0, log10_abs(t.value) - log10_abs(prev_term.value));
            if (ratio < r0) {
                double tail = log10_abs(t.value) + std::log10(r0 / (1 - r0));
                if (tail - log10_abs(sum.value) < -(inner + 1)) {
                    double err = detail::log10_sum(sum.abs_error_log10(), tail);
                    WorkingPrecision wp(precision + kGuardDigits);
                    return make_prec(Real(sum.value), precision, err);
                }
            }
        }
        prev_term = t;
        have_prev = true;
    }
    throw ConvergenceError("concise_Q: tail bound not reached within " + std::to_string(max_terms) + " terms");
}

/// Exact backward route Q(k, α) = Q(k, 1) - Σ_{i=1}^{α-1} f(i) for integer α.
inline BigRational concise_Q_exact(int k, long alpha)
{
    detail::check_concise_k(k);
    if (alpha < 1) {
        throw DomainError("exact concise_Q needs integer alpha >= 1");
    }
    BigRational q = q_initial(k);
    for (long i = 1; i < alpha; ++i) {
        q -= *concise_term_exact(k, BigRational(i));
    }
    return q;
}

/// 1 - 4^(k+1) (8k+15) Γ(k+2) Γ(2k+9/2) / (√π Γ(3k+7)), with
/// Γ(2k+9/2)/√π = (1/2)_{2k+4}.
inline BigRational rebit_total_prob(int k)
{
    if (k < 0) {
        throw DomainError("rebit_total_prob needs k >= 0");
    }
    const unsigned long uk = static_cast<unsigned long>(k);
    BigRational sub = BigRational(mp::pow(BigInt(4), static_cast<unsigned>(k + 1)) * (8 * k + 15) * factorial(uk + 1));
    sub *= pochhammer(BigRational(1, 2), 2 * uk + 4);
    sub /= BigRational(factorial(3 * uk + 6));
    return 1 - sub;
}

/// Additive term linking the zero-seeded k = -1 recurrence to the 1/14-seeded one.
inline PrecReal kminus1_correction(const BigRational& alpha, int precision)
{
    if (alpha <= 0) {
        throw DomainError("kminus1_correction needs alpha > 0");
    }
    auto R = [precision](const BigRational& x) { return exact_prec(x, precision); };
    auto G = [precision](const BigRational& x) { return gamma(exact_prec(x, precision)); };
    const PrecReal order = R(alpha + 1);
    PrecReal powers;
    {
        WorkingPrecision wp(precision + kGuardDigits);
        Real a = to_real(alpha);
        Real p = pow(Real(3), -3 * a - 5) * pow(Real(4), 3 * a + 2) * pow(Real(5), 5 * a + 3);
        powers = make_prec(p, precision, log10_abs(p) + 1.0 - (precision + kGuardDigits));
    }
    PrecReal num = pi_value(precision) * powers;
    for (const auto& x : {BigRational(9, 10), BigRational(11, 10), BigRational(13, 10), BigRational(3, 2), BigRational(17, 10)}) {
        num = num * pochhammer_real(R(x), order);
    }
    num = num * G(alpha) * G(alpha + 2);
    PrecReal den = R(BigRational(52055003)) * G(5 * alpha) * G(alpha + BigRational(1, 6)) * G(alpha + BigRational(5, 6));
    return num / den;
}

/// Exact value of the correction at integer α, using
/// Γ(α+1/6)Γ(α+5/6) = 2π (1/6)_α (5/6)_α.
inline BigRational kminus1_correction_exact(long alpha)
{
    if (alpha < 1) {
        throw DomainError("exact kminus1_correction needs integer alpha >= 1");
    }
    const unsigned long a = static_cast<unsigned long>(alpha);
    BigRational v = BigRational(mp::pow(BigInt(4), static_cast<unsigned>(3 * a + 2)) * mp::pow(BigInt(5), static_cast<unsigned>(5 * a + 3)));
    v /= BigRational(mp::pow(BigInt(3), static_cast<unsigned>(3 * a + 5)));
    for (const auto& x : {BigRational(9, 10), BigRational(11, 10), BigRational(13, 10), BigRational(3, 2), BigRational(17, 10)}) {
        v *= pochhammer(x, a + 1);
    }
    v *= BigRational(factorial(a - 1) * factorial(a + 1));
    v /= BigRational(52055003) * BigRational(factorial(5 * a - 1)) * 2 * pochhammer(BigRational(1, 6), a)
         * pochhammer(BigRational(5, 6), a);
    return v;
}

} // namespace sepkit
