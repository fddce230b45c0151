#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "sepkit/errors.hpp"

namespace sepkit {

enum class Field { real, complex };

inline std::string to_string(Field f) { return f == Field::real ? "real" : "complex"; }

inline Field parse_field(const std::string& s)
{
    if (s == "real") return Field::real;
    if (s == "complex") return Field::complex;
    throw ParseError("field must be 'real' or 'complex', got '" + s + "'");
}

template <class Scalar>
using Matrix4 = Eigen::Matrix<Scalar, 4, 4>;

using ComplexMatrix4 = Matrix4<std::complex<double>>;

/// Columns of the Gaussian factor G for the induced measure weighted by |ρ|^k:
/// 4+k for complex entries, 5+2k for real entries.
inline int ginibre_columns(int k, Field field)
{
    const int cols = field == Field::complex ? 4 + k : 5 + 2 * k;
    if (cols < 1) {
        throw DomainError("k = " + std::to_string(k) + " leaves no columns for the " + to_string(field) + " ensemble");
    }
    return cols;
}

/// SplitMix64 step; used to derive independent per-chunk generator seeds.
inline std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index)
{
    std::uint64_t state = seed;
    const std::uint64_t base = splitmix64(state);
    std::uint64_t s2 = base ^ (index * 0xD1B54A32D192ED03ULL);
    std::seed_seq seq{splitmix64(s2), splitmix64(s2), splitmix64(s2), splitmix64(s2)};
    return std::mt19937_64(seq);
}

/// ρ = GG*/tr(GG*) with G a 4×cols standard Gaussian matrix.
template <class Rng>
ComplexMatrix4 sample_density(int k, Field field, Rng& rng)
{
    const int cols = ginibre_columns(k, field);
    std::normal_distribution<double> normal;
    Eigen::Matrix<std::complex<double>, 4, Eigen::Dynamic> g(4, cols);
    for (;;) {
        for (int j = 0; j < cols; ++j) {
            for (int i = 0; i < 4; ++i) {
                const double re = normal(rng);
                const double im = field == Field::complex ? normal(rng) : 0.0;
                g(i, j) = {re, im};
            }
        }
        ComplexMatrix4 rho = g * g.adjoint();
        const double tr = rho.trace().real();
        if (tr > 0 && std::isfinite(tr)) {
            return rho / tr;
        }
    }
}

/// Transpose on the second qubit: each 2×2 block is transposed in place.
template <class Scalar>
Matrix4<Scalar> partial_transpose(const Matrix4<Scalar>& rho)
{
    Matrix4<Scalar> out;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j) {
                    out(2 * a + i, 2 * b + j) = rho(2 * a + j, 2 * b + i);
                }
            }
        }
    }
    return out;
}

template <class Scalar>
Scalar determinant4(const Matrix4<Scalar>& m)
{
    return m.determinant();
}

struct McEstimate {
    int k = 0;
    Field field = Field::complex;
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;
    double p_d_positive = 0, p_d_positive_se = 0;
    double p_pt_positive = 0, p_pt_positive_se = 0;
    std::array<double, 4> d_moments{};    // E[D^n], n = 1..4
    std::array<double, 4> d_moments_se{}; // standard errors
    double pt_det_mean = 0, pt_det_mean_se = 0;
    double d_min = 0, d_max = 0;
    std::uint64_t implication_violations = 0; // samples with D > 0 and |ρ^PT| <= 0
    std::uint64_t precision_checked = 0;
    std::uint64_t precision_disagreements = 0; // indicator flips under long double
};

namespace detail {

struct McAccumulator {
    std::uint64_t n = 0, d_pos = 0, pt_pos = 0, violations = 0;
    std::array<long double, 8> d_pow{}; // Σ D^n, n = 1..8
    long double pt_sum = 0, pt_sq = 0;
    double d_min = std::numeric_limits<double>::infinity();
    double d_max = -std::numeric_limits<double>::infinity();
    std::uint64_t checked = 0, disagreements = 0;

    void merge(const McAccumulator& o)
    {
        n += o.n;
        d_pos += o.d_pos;
        pt_pos += o.pt_pos;
        violations += o.violations;
        for (std::size_t i = 0; i < d_pow.size(); ++i) d_pow[i] += o.d_pow[i];
        pt_sum += o.pt_sum;
        pt_sq += o.pt_sq;
        d_min = std::min(d_min, o.d_min);
        d_max = std::max(d_max, o.d_max);
        checked += o.checked;
        disagreements += o.disagreements;
    }
};

inline McAccumulator run_chunk(int k, Field field, std::uint64_t seed, std::uint64_t chunk, std::uint64_t count,
                               std::uint64_t check_budget)
{
    auto rng = substream(seed, chunk);
    McAccumulator acc;
    for (std::uint64_t s = 0; s < count; ++s) {
        const ComplexMatrix4 rho = sample_density(k, field, rng);
        const ComplexMatrix4 pt = partial_transpose(rho);
        const double det_rho = determinant4(rho).real();
        const double det_pt = determinant4(pt).real();
        const double d = det_pt - det_rho;
        ++acc.n;
        acc.d_pos += d > 0;
        acc.pt_pos += det_pt > 0;
        acc.violations += (d > 0 && det_pt <= 0);
        long double p = 1;
        for (auto& v : acc.d_pow) {
            p *= d;
            v += p;
        }
        acc.pt_sum += det_pt;
        acc.pt_sq += static_cast<long double>(det_pt) * det_pt;
        acc.d_min = std::min(acc.d_min, d);
        acc.d_max = std::max(acc.d_max, d);
        if (s < check_budget) {
            const Matrix4<std::complex<long double>> rl = rho.cast<std::complex<long double>>();
            const long double drl = determinant4(rl).real();
            const long double dpl = determinant4(partial_transpose(rl)).real();
            ++acc.checked;
            acc.disagreements += ((dpl - drl > 0) != (d > 0)) || ((dpl > 0) != (det_pt > 0));
        }
    }
    return acc;
}

} // namespace detail

/// Monte Carlo estimates from n_samples induced-measure states. Samples are
/// split into fixed chunks with their own substreams, so the result depends
/// only on (k, field, n_samples, seed) and not on the thread count.
inline McEstimate mc_estimate(int k, Field field, std::uint64_t n_samples, std::uint64_t seed,
                              unsigned threads = 0, std::uint64_t precision_check = 10000)
{
    if (n_samples < 1000) {
        throw DomainError("mc_estimate needs at least 1000 samples");
    }
    ginibre_columns(k, field);
    constexpr std::uint64_t chunk_size = 10000;
    const std::uint64_t chunks = (n_samples + chunk_size - 1) / chunk_size;
    std::vector<detail::McAccumulator> parts(chunks);
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    auto work = [&](unsigned t) {
        for (std::uint64_t c = t; c < chunks; c += threads) {
            const std::uint64_t count = std::min(chunk_size, n_samples - c * chunk_size);
            const std::uint64_t first = c * chunk_size;
            const std::uint64_t budget = first < precision_check ? std::min(count, precision_check - first) : 0;
            parts[c] = detail::run_chunk(k, field, seed, c, count, budget);
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
        for (auto& th : pool) th.join();
    }
    detail::McAccumulator acc;
    for (const auto& p : parts) acc.merge(p); // fixed order keeps sums reproducible

    McEstimate e;
    e.k = k;
    e.field = field;
    e.n_samples = n_samples;
    e.seed = seed;
    const long double n = static_cast<long double>(acc.n);
    auto prop = [n](std::uint64_t c, double& p, double& se) {
        const long double q = c / n;
        p = static_cast<double>(q);
        se = static_cast<double>(std::sqrt(q * (1 - q) / (n - 1)));
    };
    prop(acc.d_pos, e.p_d_positive, e.p_d_positive_se);
    prop(acc.pt_pos, e.p_pt_positive, e.p_pt_positive_se);
    for (std::size_t i = 0; i < 4; ++i) {
        const long double m = acc.d_pow[i] / n;
        const long double m2 = acc.d_pow[2 * i + 1] / n;
        e.d_moments[i] = static_cast<double>(m);
        e.d_moments_se[i] = static_cast<double>(std::sqrt(std::max(0.0L, m2 - m * m) / (n - 1)));
    }
    const long double pm = acc.pt_sum / n;
    e.pt_det_mean = static_cast<double>(pm);
    e.pt_det_mean_se = static_cast<double>(std::sqrt(std::max(0.0L, acc.pt_sq / n - pm * pm) / (n - 1)));
    e.d_min = acc.d_min;
    e.d_max = acc.d_max;
    e.implication_violations = acc.violations;
    e.precision_checked = acc.checked;
    e.precision_disagreements = acc.disagreements;
    return e;
}

} // namespace sepkit
