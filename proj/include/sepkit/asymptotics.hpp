#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sepkit/closedforms.hpp"
#include "sepkit/density.hpp"
#include "sepkit/linear_fit.hpp"
#include "sepkit/montecarlo.hpp"
#include "sepkit/recurrence.hpp"

namespace sepkit {

struct StudyResult {
    std::string name;
    std::vector<std::pair<PrecReal, PrecReal>> table;
    std::optional<LinearFit> fit;
    std::string reference_label;
    std::optional<PrecReal> reference;
    std::optional<PrecReal> deviation; // quantity of interest minus reference
    std::vector<std::string> findings;
};

namespace detail {

inline PrecReal real_log(const PrecReal& x)
{
    WorkingPrecision wp(x.precision + kGuardDigits);
    Real v = log(x.value);
    // d log x = dx / x
    double err = x.abs_error_log10() - log10_abs(x.value);
    err = log10_sum(err, (v == 0 ? 0.0 : log10_abs(v)) - (x.precision + kGuardDigits) + 1.0);
    return make_prec(std::move(v), x.precision, err);
}

inline PrecReal index_value(long x, int precision) { return exact_prec(BigRational(x), precision); }

// P^rebit_k at enough digits that log P keeps `precision` digits when P is
// close to 1.
inline PrecReal rebit_point(int k, int precision)
{
    const BigRational p = rebit_total_prob(k);
    const double gap = BigRational(1 - p).convert_to<double>();
    const int lost = gap > 0 ? static_cast<int>(std::ceil(-std::log10(gap))) : 0;
    return exact_prec(p, precision + 10 + lost);
}

inline void finish_fit(StudyResult& r)
{
    if (r.table.size() >= 2) {
        r.fit = linear_fit(r.table);
    }
}

} // namespace detail

/// Q(k, α+1)/Q(k, α) for α = 1..alpha_max−1 from the exact difference equation,
/// compared with the limit 27/64.
inline StudyResult ratio_study_alpha(int k, long alpha_max, int precision = 30)
{
    if (alpha_max < 10) {
        throw DomainError("ratio_study_alpha needs alpha_max >= 10");
    }
    const auto q = q_sequence(k, alpha_max);
    StudyResult r;
    r.name = "ratio_alpha";
    for (long a = 1; a < alpha_max; ++a) {
        const BigRational ratio = q[static_cast<std::size_t>(a)] / q[static_cast<std::size_t>(a - 1)];
        r.table.emplace_back(detail::index_value(a, precision), exact_prec(ratio, precision));
    }
    std::size_t rising = 0;
    for (std::size_t i = 1; i < r.table.size(); ++i) {
        rising += !(r.table[i].second.value < r.table[i - 1].second.value);
    }
    if (rising > 0) {
        r.findings.push_back("ratio is not strictly decreasing in alpha: " + std::to_string(rising) + " of "
                             + std::to_string(r.table.size() - 1) + " steps do not decrease");
    }
    r.reference_label = "27/64";
    r.reference = exact_prec(family_argument(), precision);
    r.deviation = r.table.back().second - *r.reference;
    return r;
}

inline BigRational terminal_ratio(const StudyResult& ratio_study)
{
    return exact_rational(ratio_study.table.back().second.value);
}

/// log(−log P^rebit_k) against k for k = 1..k_max with a least-squares line;
/// the slope is compared with log(16/27).
inline StudyResult rebit_loglog_study(int k_max, int precision = 50)
{
    if (k_max < 10) {
        throw DomainError("rebit_loglog_study needs k_max >= 10");
    }
    StudyResult r;
    r.name = "rebit_loglog";
    for (int k = 1; k <= k_max; ++k) {
        const PrecReal p = detail::rebit_point(k, precision);
        PrecReal y = detail::real_log(-detail::real_log(p));
        y.precision = precision;
        y.certified_digits = digits_from_error(y.value, y.abs_error_log10(), precision);
        r.table.emplace_back(detail::index_value(k, precision), y);
    }
    detail::finish_fit(r);
    r.reference_label = "log(16/27)";
    r.reference = detail::real_log(exact_prec(BigRational(16, 27), precision));
    r.deviation = r.fit->slope - *r.reference;
    return r;
}

/// log P^rebit_{k+1} / log P^rebit_k for k = 1..k_max, approaching 16/27.
inline StudyResult log_ratio_study(int k_max, int precision = 50)
{
    if (k_max < 10) {
        throw DomainError("log_ratio_study needs k_max >= 10");
    }
    StudyResult r;
    r.name = "log_ratio";
    PrecReal prev = detail::real_log(detail::rebit_point(1, precision));
    for (int k = 1; k <= k_max; ++k) {
        PrecReal next = detail::real_log(detail::rebit_point(k + 1, precision));
        PrecReal ratio = next / prev;
        ratio.precision = precision;
        ratio.certified_digits = digits_from_error(ratio.value, ratio.abs_error_log10(), precision);
        r.table.emplace_back(detail::index_value(k, precision), ratio);
        prev = std::move(next);
    }
    r.reference_label = "16/27";
    r.reference = exact_prec(BigRational(16, 27), precision);
    r.deviation = r.table.back().second - *r.reference;
    return r;
}

enum class UnitSlopeMethod { table, recurrence, density, monte_carlo };

inline UnitSlopeMethod parse_unit_slope_method(const std::string& s)
{
    if (s == "table") return UnitSlopeMethod::table;
    if (s == "recurrence") return UnitSlopeMethod::recurrence;
    if (s == "density") return UnitSlopeMethod::density;
    if (s == "mc" || s == "monte_carlo") return UnitSlopeMethod::monte_carlo;
    throw ParseError("unknown method '" + s + "' (table|recurrence|density|mc)");
}

struct UnitSlopeOptions {
    UnitSlopeMethod method = UnitSlopeMethod::table;
    BigRational alpha = BigRational(1);
    int k_min = 1;
    int k_max = 8;
    int precision = 30;
    unsigned degree = 400;          // density route
    std::uint64_t samples = 1000000; // Monte Carlo route
    std::uint64_t seed = 1;
};

namespace detail {

inline PrecReal probability_point(int k, const UnitSlopeOptions& o)
{
    switch (o.method) {
    case UnitSlopeMethod::table:
        if (o.alpha != 1) {
            throw DomainError("the table route holds alpha = 1 only");
        }
        return exact_prec(q_initial(k), o.precision);
    case UnitSlopeMethod::recurrence:
        if (!is_integer(o.alpha)) {
            throw DomainError("the recurrence route needs integer alpha");
        }
        return exact_prec(q_from_recurrence(k, static_cast<long>(numerator_of(o.alpha))), o.precision);
    case UnitSlopeMethod::density:
        return estimate_probability(k, o.alpha, o.degree, {}, o.precision).value;
    case UnitSlopeMethod::monte_carlo: {
        Field field;
        if (o.alpha == 1) {
            field = Field::complex;
        } else if (o.alpha == BigRational(1, 2)) {
            field = Field::real;
        } else {
            throw DomainError("the Monte Carlo route covers alpha = 1/2 (real) and 1 (complex) only");
        }
        const McEstimate e = mc_estimate(k, field, o.samples, o.seed);
        WorkingPrecision wp(o.precision + kGuardDigits);
        // one standard error as the error scale; not a certified bound
        return make_prec(Real(e.p_d_positive), o.precision, std::log10(std::max(e.p_d_positive_se, 1e-300)));
    }
    }
    throw DomainError("unknown unit-slope method");
}

} // namespace detail

/// k·R(k) against k with R(k) = Q(k+1, α)/Q(k, α).
inline StudyResult unit_slope_study(const UnitSlopeOptions& o)
{
    if (o.k_max > 40) {
        throw DomainError("unit_slope_study covers k <= 40");
    }
    if (o.k_min < -1 || o.k_min >= o.k_max) {
        throw DomainError("unit_slope_study needs -1 <= k_min < k_max");
    }
    StudyResult r;
    r.name = "unit_slope";
    std::vector<PrecReal> q;
    for (int k = o.k_min; k <= o.k_max + 1; ++k) {
        q.push_back(detail::probability_point(k, o));
    }
    for (int k = o.k_min; k <= o.k_max; ++k) {
        const std::size_t i = static_cast<std::size_t>(k - o.k_min);
        PrecReal y = detail::index_value(k, o.precision) * (q[i + 1] / q[i]);
        y.precision = o.precision;
        if (!y.certified_digits || *y.certified_digits < 4) {
            r.findings.push_back("k = " + std::to_string(k) + ": fewer than 4 certified digits");
        }
        r.table.emplace_back(detail::index_value(k, o.precision), std::move(y));
    }
    detail::finish_fit(r);
    r.reference_label = "1";
    r.reference = exact_prec(BigRational(1), o.precision);
    if (r.fit) {
        r.deviation = r.fit->slope - *r.reference;
    }
    return r;
}

/// Extended mode: k·Q(k+1, k+1)/Q(k, k) along the diagonal α = k. Exact for
/// k <= 4, density route above that.
inline StudyResult diagonal_study(int k_max, unsigned degree = 400, int precision = 30)
{
    if (k_max < 2 || k_max > 6) {
        throw DomainError("diagonal_study covers 2 <= k_max <= 6");
    }
    StudyResult r;
    r.name = "diagonal";
    auto point = [&](int k) {
        if (k <= 4) {
            return exact_prec(q_from_recurrence(k, k), precision);
        }
        return estimate_probability(k, BigRational(k), degree, {}, precision).value;
    };
    PrecReal prev = point(1);
    for (int k = 1; k <= k_max; ++k) {
        PrecReal next = point(k + 1);
        PrecReal y = detail::index_value(k, precision) * (next / prev);
        y.precision = precision;
        r.table.emplace_back(detail::index_value(k, precision), std::move(y));
        prev = std::move(next);
    }
    detail::finish_fit(r);
    return r;
}

/// Fit on externally supplied (x, y) data, e.g. total-probability tables
/// from other sources.
inline StudyResult table_study(std::string name, std::vector<std::pair<PrecReal, PrecReal>> points,
                               std::optional<PrecReal> reference_slope = std::nullopt)
{
    if (points.empty()) {
        throw DomainError("table_study needs at least one point");
    }
    StudyResult r;
    r.name = std::move(name);
    r.table = std::move(points);
    detail::finish_fit(r);
    if (reference_slope && r.fit) {
        r.reference_label = "reference slope";
        r.reference = reference_slope;
        r.deviation = r.fit->slope - *reference_slope;
    }
    return r;
}

} // namespace sepkit
