#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sepkit/closedforms.hpp"
#include "sepkit/exact_linalg.hpp"
#include "sepkit/polynomial.hpp"
#include "sepkit/rationalize.hpp"

namespace sepkit {

/// p0(α) + p1(α) s(α) + p2(α) s(α+1) = 0 with seed s(seed_alpha) = seed_value.
struct DifferenceEquation {
    int k = 0;
    Polynomial p0, p1, p2;
    BigRational seed_alpha{1};
    BigRational seed_value{0};
};

/// Integer coefficients, joint content 1, leading coefficient of p2 positive.
inline void normalize(DifferenceEquation& eq)
{
    BigInt l = 1;
    for (const Polynomial* p : {&eq.p0, &eq.p1, &eq.p2}) {
        for (const auto& c : p->coeffs()) l = mp::lcm(l, denominator_of(c));
    }
    BigInt g = 0;
    for (const Polynomial* p : {&eq.p0, &eq.p1, &eq.p2}) {
        for (const auto& c : p->coeffs()) g = mp::gcd(g, numerator_of(c * BigRational(l)));
    }
    if (g == 0) {
        return;
    }
    BigRational scale = BigRational(l) / BigRational(g);
    const Polynomial& lead = eq.p2.is_zero() ? eq.p1 : eq.p2;
    if (lead.leading() < 0) {
        scale = -scale;
    }
    eq.p0 = scale * eq.p0;
    eq.p1 = scale * eq.p1;
    eq.p2 = scale * eq.p2;
}

/// True when a and b agree up to a nonzero scalar.
inline bool same_up_to_scale(DifferenceEquation a, DifferenceEquation b)
{
    normalize(a);
    normalize(b);
    return a.p0 == b.p0 && a.p1 == b.p1 && a.p2 == b.p2;
}

/// s(α0 + j), j = 0..steps.
inline std::vector<BigRational> iterate(const DifferenceEquation& eq, long steps)
{
    std::vector<BigRational> out;
    out.reserve(static_cast<std::size_t>(steps) + 1);
    BigRational a = eq.seed_alpha;
    BigRational s = eq.seed_value;
    out.push_back(s);
    for (long j = 0; j < steps; ++j) {
        const BigRational d = eq.p2(a);
        if (d == 0) {
            throw DomainError("p2 vanishes at alpha = " + to_string(a));
        }
        s = -(eq.p0(a) + eq.p1(a) * s) / d;
        a += 1;
        out.push_back(s);
    }
    return out;
}

namespace detail {

inline std::vector<BigRational> powers(const BigRational& x, int d)
{
    std::vector<BigRational> out(static_cast<std::size_t>(d) + 1);
    out[0] = 1;
    for (int i = 1; i <= d; ++i) out[i] = out[i - 1] * x;
    return out;
}

inline DifferenceEquation equation_from_vector(const std::vector<BigInt>& v, int d, bool homogeneous)
{
    const std::size_t w = static_cast<std::size_t>(d) + 1;
    std::vector<BigRational> c0, c1, c2;
    std::size_t off = 0;
    if (!homogeneous) {
        for (std::size_t i = 0; i < w; ++i) c0.emplace_back(v[i]);
        off = w;
    }
    for (std::size_t i = 0; i < w; ++i) c1.emplace_back(v[off + i]);
    for (std::size_t i = 0; i < w; ++i) c2.emplace_back(v[off + w + i]);
    DifferenceEquation eq;
    eq.p0 = Polynomial(c0);
    eq.p1 = Polynomial(c1);
    eq.p2 = Polynomial(c2);
    return eq;
}

inline bool satisfies(const DifferenceEquation& eq, const BigRational& a, const BigRational& s, const BigRational& s_next)
{
    return eq.p0(a) + eq.p1(a) * s + eq.p2(a) * s_next == 0;
}

} // namespace detail

/// Minimal-degree first-order recurrence through exact data at consecutive
/// integer α. Coefficients come from the exact nullspace of the linear system
/// in the 3(d+1) unknowns; a candidate is accepted only if it also holds on at
/// least five held-out transitions.
inline std::optional<DifferenceEquation> guess_first_order(const std::vector<std::pair<BigRational, BigRational>>& values,
                                                           int max_degree)
{
    if (max_degree < 0) {
        throw DomainError("max_degree must be >= 0");
    }
    const std::size_t need = 3 * (static_cast<std::size_t>(max_degree) + 1) + 5;
    if (values.size() < need) {
        throw DomainError("guess_first_order needs at least " + std::to_string(need) + " values for max_degree "
                          + std::to_string(max_degree));
    }
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        if (values[i + 1].first != values[i].first + 1) {
            throw DomainError("guess_first_order needs consecutive alpha values");
        }
    }
    const std::size_t transitions = values.size() - 1;
    constexpr std::size_t holdout = 5;
    for (int d = 0; d <= max_degree; ++d) {
        const std::size_t w = static_cast<std::size_t>(d) + 1;
        for (bool homogeneous : {false, true}) {
            const std::size_t unknowns = (homogeneous ? 2 : 3) * w;
            const std::size_t fit = std::min(transitions - holdout, unknowns + 3);
            RationalMatrix rows;
            for (std::size_t i = 0; i < fit; ++i) {
                const auto pw = detail::powers(values[i].first, d);
                std::vector<BigRational> row;
                if (!homogeneous) row.insert(row.end(), pw.begin(), pw.end());
                for (const auto& x : pw) row.push_back(x * values[i].second);
                for (const auto& x : pw) row.push_back(x * values[i + 1].second);
                rows.push_back(std::move(row));
            }
            const auto ns = nullspace(rows, unknowns);
            if (ns.size() != 1) {
                if (ns.size() > 1 && fit >= unknowns && homogeneous) {
                    throw AmbiguityError("nullspace of dimension " + std::to_string(ns.size()) + " at degree "
                                         + std::to_string(d));
                }
                continue; // an inhomogeneous tie is retried with p0 = 0
            }
            DifferenceEquation eq = detail::equation_from_vector(ns[0], d, homogeneous);
            if (eq.p2.is_zero()) {
                continue;
            }
            bool ok = true;
            for (std::size_t i = fit; i < transitions && ok; ++i) {
                ok = detail::satisfies(eq, values[i].first, values[i].second, values[i + 1].second);
            }
            if (!ok) {
                continue;
            }
            eq.seed_alpha = values.front().first;
            eq.seed_value = values.front().second;
            normalize(eq);
            return eq;
        }
    }
    return std::nullopt;
}

/// Structural polynomials of the ansatz: p2 ∝ Π(u_i - 1), p1 ∝ Π b_i,
/// p0 ∝ Π b_i(b_i - 1) · q_k, with the extra factors (1+5α) for k = 0 and
/// (9+4α) for k = 4.
struct AnsatzPolynomials {
    Polynomial P0, P1, P2;
    std::vector<std::string> exception_flags;
};

inline AnsatzPolynomials ansatz_polynomials(int k)
{
    const auto qp = q_polynomial(k);
    AnsatzPolynomials a;
    a.P0 = qp.poly;
    a.P1 = Polynomial{1};
    a.P2 = Polynomial{1};
    for (const auto& b : lower_params(k)) {
        const Polynomial pb = Polynomial::from(b);
        a.P1 = a.P1 * pb;
        a.P0 = a.P0 * pb * Polynomial::from(b.shifted(-1));
    }
    for (const auto& u : upper_params(k)) {
        a.P2 = a.P2 * Polynomial::from(u.shifted(-1));
    }
    if (qp.extra_factor) {
        a.P0 = a.P0 * *qp.extra_factor;
        a.exception_flags.push_back("(9+4α) extra factor");
    }
    if (k == 0) {
        a.P0 = a.P0 * Polynomial{1, 5};
        a.exception_flags.push_back("(1+5α) replaces (6+5α)");
    }
    return a;
}

struct AnsatzFit {
    int k = 0;
    BigRational c0, c1, c2;
    std::vector<std::string> exception_flags;
    DifferenceEquation equation;
};

/// Fits (c0 : c1 : c2) from the first three consecutive G2 points and checks
/// the resulting equation exactly on every remaining point.
inline AnsatzFit fit_ansatz(int k, const std::vector<std::pair<BigRational, BigRational>>& points,
                            const std::vector<std::pair<BigRational, BigRational>>& holdout)
{
    if (points.size() < 3) {
        throw DomainError("fit_ansatz needs at least three points");
    }
    if (holdout.size() < 2) {
        throw DomainError("fit_ansatz needs at least two held-out points");
    }
    const AnsatzPolynomials ap = ansatz_polynomials(k);
    RationalMatrix rows;
    for (std::size_t i = 0; i + 1 < 3; ++i) {
        const auto& [a, s] = points[i];
        if (points[i + 1].first != a + 1) {
            throw DomainError("fit_ansatz needs consecutive alpha values");
        }
        rows.push_back({ap.P0(a), ap.P1(a) * s, ap.P2(a) * points[i + 1].second});
    }
    const auto ns = nullspace(rows, 3);
    if (ns.size() != 1) {
        throw InconsistencyError("ansatz for k = " + std::to_string(k) + " has a " + std::to_string(ns.size())
                                 + "-dimensional solution space on the fitting points");
    }
    AnsatzFit fit;
    fit.k = k;
    fit.c0 = BigRational(ns[0][0]);
    fit.c1 = BigRational(ns[0][1]);
    fit.c2 = BigRational(ns[0][2]);
    fit.exception_flags = ap.exception_flags;
    DifferenceEquation eq{k, fit.c0 * ap.P0, fit.c1 * ap.P1, fit.c2 * ap.P2, points[0].first, points[0].second};
    normalize(eq);
    std::vector<std::pair<BigRational, BigRational>> checks(points.begin() + 1, points.end());
    checks.insert(checks.end(), holdout.begin(), holdout.end());
    for (const auto& [a, s] : checks) {
        const BigRational steps = a - eq.seed_alpha;
        if (!is_integer(steps) || steps < 1) {
            throw DomainError("check point alpha = " + to_string(a) + " is not reachable from the seed");
        }
        const auto seq = iterate(eq, steps.convert_to<long>());
        if (seq.back() != s) {
            throw InconsistencyError("ansatz for k = " + std::to_string(k) + " fails at alpha = " + to_string(a)
                                     + ": predicted " + to_string(seq.back()) + ", given " + to_string(s));
        }
    }
    fit.equation = eq;
    return fit;
}

/// Exact Q(k, α), α = 1..count, for the inputs of the ansatz fit.
///
/// k = 0, 1: the concise telescoping formulas (exact backward route).
/// Other k: the ansatz fixes Q(α) - Q(α+1) = c·h(α) with
/// h = G1·Π(b_i - 1)·q_k up to the scalar c; c follows from Q(k,1) and
/// Q(k,∞) = 0. The values are evaluated at `precision` digits and
/// rationalized; a failed rationalization raises InconsistencyError.
inline std::vector<BigRational> anchor_q_values(int k, int count, int precision = 160)
{
    std::vector<BigRational> out;
    if (k == 0 || k == 1) {
        for (int a = 1; a <= count; ++a) out.push_back(concise_Q_exact(k, a));
        return out;
    }
    const auto qp = q_polynomial(k);
    const auto b = lower_params(k);
    auto h_factor = [&](const BigRational& a) {
        BigRational v = qp.poly(a);
        if (qp.extra_factor) v *= (*qp.extra_factor)(a);
        for (const auto& x : b) v *= x(a) - 1;
        return v;
    };
    WorkingPrecision wp(precision + kGuardDigits);
    std::vector<Real> h;
    BigRational g1v(1); // exact for the first `count` steps
    Real g1r = 1;
    Real total = 0;
    const double r0 = (27.0 / 64.0 + 1.0) / 2.0;
    for (long a = 1;; ++a) {
        Real t = g1r * to_real(h_factor(BigRational(a)));
        total += t;
        h.push_back(t);
        if (a > 2) {
            const double ratio = std::pow(10.0, log10_abs(t) - log10_abs(h[h.size() - 2]));
            if (ratio < r0 && log10_abs(t) + std::log10(r0 / (1 - r0)) - log10_abs(total) < -(precision + 5)) {
                break;
            }
        }
        if (a > 100000) {
            throw ConvergenceError("decay normalization did not converge");
        }
        detail::scale_by(g1r, g1_step(k, BigRational(a)));
    }
    const BigRational q1 = q_initial(k);
    const Real c = to_real(q1) / total;
    Real partial = 0;
    out.push_back(q1);
    for (int a = 1; a < count; ++a) {
        partial += h[static_cast<std::size_t>(a - 1)];
        Real v = to_real(q1) - c * partial;
        PrecReal pv = make_prec(v, precision, log10_abs(v) - (precision - 10));
        BigInt max_den = mp::pow(BigInt(10), static_cast<unsigned>(precision / 3));
        auto r = rationalize(pv, max_den);
        if (!r) {
            throw InconsistencyError("decay-normalized Q(" + std::to_string(k) + "," + std::to_string(a + 1)
                                     + ") does not rationalize");
        }
        out.push_back(*r);
    }
    return out;
}

/// G2 = Q/G1 at α = 1..count.
inline std::vector<std::pair<BigRational, BigRational>> anchor_g2_points(int k, int count)
{
    const auto q = anchor_q_values(k, count);
    std::vector<std::pair<BigRational, BigRational>> out;
    for (int a = 1; a <= count; ++a) {
        out.emplace_back(BigRational(a), q[static_cast<std::size_t>(a - 1)] / g1(k, static_cast<long>(a)));
    }
    return out;
}

/// Ansatz equation for G2 fitted on α = 1, 2, 3 and checked on α = 4, 5.
inline AnsatzFit fitted_ansatz(int k)
{
    if (k < -1 || k > 4) {
        throw RangeError("difference equations are available for -1 <= k <= 4, got " + std::to_string(k));
    }
    auto pts = anchor_g2_points(k, 5);
    std::vector<std::pair<BigRational, BigRational>> fit(pts.begin(), pts.begin() + 3);
    std::vector<std::pair<BigRational, BigRational>> hold(pts.begin() + 3, pts.end());
    return fit_ansatz(k, fit, hold);
}

/// Q(k, α) = G1(k, α) · G2(α) for integer α >= 1.
inline BigRational q_from_recurrence(int k, long alpha, const DifferenceEquation& eq)
{
    if (alpha < 1) {
        throw DomainError("q_from_recurrence needs integer alpha >= 1");
    }
    return g1(k, alpha) * iterate(eq, alpha - 1).back();
}

inline BigRational q_from_recurrence(int k, long alpha) { return q_from_recurrence(k, alpha, fitted_ansatz(k).equation); }

/// Q(k, α) for α = 1..alpha_max from one iteration run.
inline std::vector<BigRational> q_sequence(int k, long alpha_max)
{
    const DifferenceEquation eq = fitted_ansatz(k).equation;
    const auto g2 = iterate(eq, alpha_max - 1);
    std::vector<BigRational> out;
    BigRational g(1);
    for (long a = 1; a <= alpha_max; ++a) {
        out.push_back(g * g2[static_cast<std::size_t>(a - 1)]);
        g *= g1_step(k, BigRational(a));
    }
    return out;
}

} // namespace sepkit
