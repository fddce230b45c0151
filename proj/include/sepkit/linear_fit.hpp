#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "sepkit/prec_real.hpp"

namespace sepkit {

struct LinearFit {
    PrecReal slope;
    PrecReal intercept;
    PrecReal r_squared;
};

/// Ordinary least squares y = slope*x + intercept at the smallest precision
/// among the inputs. Input error bounds are propagated to slope and intercept.
inline LinearFit linear_fit(const std::vector<std::pair<PrecReal, PrecReal>>& points)
{
    if (points.size() < 2) {
        throw DegenerateError("linear_fit needs at least two points");
    }
    int prec = points.front().first.precision;
    bool known = true;
    for (const auto& [x, y] : points) {
        prec = std::min({prec, x.precision, y.precision});
        known = known && x.certified_digits && y.certified_digits;
    }
    WorkingPrecision wp(prec + kGuardDigits);
    const Real n = static_cast<long>(points.size());
    Real sx = 0, sy = 0;
    for (const auto& [x, y] : points) {
        sx += x.value;
        sy += y.value;
    }
    Real mx = sx / n, my = sy / n;
    Real sxx = 0, sxy = 0, syy = 0;
    for (const auto& [x, y] : points) {
        Real dx = x.value - mx, dy = y.value - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0) {
        throw DegenerateError("linear_fit: all x values are equal");
    }
    Real slope = sxy / sxx;
    Real intercept = my - slope * mx;
    Real r2 = syy == 0 ? Real(1) : Real((sxy * sxy) / (sxx * syy));
    if (r2 > 1) r2 = 1;
    if (r2 < 0) r2 = 0;

    if (!known) {
        return {PrecReal{slope, prec, std::nullopt}, PrecReal{intercept, prec, std::nullopt},
                PrecReal{r2, prec, std::nullopt}};
    }
    // first-order bound: |d slope| <= sum(|dx_i| ey_i + |dy_i - slope dx_i| ex_i) / sxx
    const double ninf = -std::numeric_limits<double>::infinity();
    double acc = ninf;
    double ey_max = ninf;
    for (const auto& [x, y] : points) {
        Real dx = x.value - mx;
        Real resid = (y.value - my) - slope * dx;
        acc = detail::log10_sum(acc, log10_abs(dx) + y.abs_error_log10());
        acc = detail::log10_sum(acc, log10_abs(resid) + x.abs_error_log10());
        acc = detail::log10_sum(acc, log10_abs(slope) + x.abs_error_log10());
        ey_max = std::max({ey_max, y.abs_error_log10(), x.abs_error_log10() + log10_abs(slope)});
    }
    double rounding = -(prec + kGuardDigits) + 3.0 + std::log10(static_cast<double>(points.size()));
    double e_slope = detail::log10_sum(acc - log10_abs(sxx) + std::log10(2.0), log10_abs(slope) + rounding);
    double e_int = detail::log10_sum(ey_max, log10_abs(mx) + e_slope);
    e_int = detail::log10_sum(e_int, log10_abs(intercept) + rounding);
    // r^2 = slope^2 sxx/syy: relative error about twice the slope's
    double rel_r2 = std::log10(3.0) + e_slope - log10_abs(slope);
    double e_r2 = detail::log10_sum(rel_r2 + log10_abs(r2), rounding);
    return {make_prec(slope, prec, e_slope), make_prec(intercept, prec, e_int), make_prec(r2, prec, e_r2)};
}

} // namespace sepkit
