#pragma once

#include <cstddef>
#include <vector>

#include "sepkit/rational.hpp"

namespace sepkit {

using RationalMatrix = std::vector<std::vector<BigRational>>;
using IntegerMatrix = std::vector<std::vector<BigInt>>;

/// Fraction-free row echelon form (Bareiss). Returns the pivot columns; the
/// matrix is modified in place.
inline std::vector<std::size_t> bareiss_echelon(IntegerMatrix& m)
{
    std::vector<std::size_t> pivots;
    if (m.empty()) {
        return pivots;
    }
    const std::size_t rows = m.size(), cols = m[0].size();
    BigInt prev = 1;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && m[p][c] == 0) {
            ++p;
        }
        if (p == rows) {
            continue;
        }
        std::swap(m[p], m[r]);
        for (std::size_t i = r + 1; i < rows; ++i) {
            for (std::size_t j = c + 1; j < cols; ++j) {
                BigInt v = m[r][c] * m[i][j] - m[i][c] * m[r][j];
                mpz_divexact(v.backend().data(), v.backend().data(), prev.backend().data());
                m[i][j] = std::move(v);
            }
            m[i][c] = 0;
        }
        prev = m[r][c];
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

/// Clears denominators row by row.
inline IntegerMatrix integer_rows(const RationalMatrix& a)
{
    IntegerMatrix out;
    out.reserve(a.size());
    for (const auto& row : a) {
        BigInt l = 1;
        for (const auto& v : row) {
            l = mp::lcm(l, denominator_of(v));
        }
        std::vector<BigInt> irow;
        irow.reserve(row.size());
        for (const auto& v : row) {
            irow.push_back(numerator_of(v) * (l / denominator_of(v)));
        }
        out.push_back(std::move(irow));
    }
    return out;
}

/// Basis of the right nullspace of a, each vector scaled to coprime integers.
inline std::vector<std::vector<BigInt>> nullspace(const RationalMatrix& a, std::size_t cols)
{
    IntegerMatrix m = integer_rows(a);
    for (auto& row : m) {
        row.resize(cols);
    }
    std::vector<std::size_t> piv = bareiss_echelon(m);
    std::vector<bool> is_pivot(cols, false);
    for (auto c : piv) {
        is_pivot[c] = true;
    }
    std::vector<std::vector<BigInt>> basis;
    for (std::size_t f = 0; f < cols; ++f) {
        if (is_pivot[f]) {
            continue;
        }
        std::vector<BigRational> x(cols);
        x[f] = 1;
        for (std::size_t r = piv.size(); r-- > 0;) {
            std::size_t c = piv[r];
            BigRational s = 0;
            for (std::size_t j = c + 1; j < cols; ++j) {
                if (x[j] != 0 && m[r][j] != 0) {
                    s += BigRational(m[r][j]) * x[j];
                }
            }
            x[c] = -s / BigRational(m[r][c]);
        }
        BigInt l = 1;
        for (const auto& v : x) {
            l = mp::lcm(l, denominator_of(v));
        }
        std::vector<BigInt> iv;
        BigInt g = 0;
        for (const auto& v : x) {
            iv.push_back(numerator_of(v) * (l / denominator_of(v)));
            g = mp::gcd(g, iv.back());
        }
        for (auto& v : iv) {
            v /= g;
        }
        basis.push_back(std::move(iv));
    }
    return basis;
}

/// Exact positive-semidefiniteness test for a symmetric rational matrix by
/// symmetric elimination: a zero pivot requires its whole remaining row to be
/// zero, a negative pivot disproves semidefiniteness.
inline bool is_positive_semidefinite(RationalMatrix a)
{
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) {
        const BigRational d = a[i][i];
        if (d < 0) {
            return false;
        }
        if (d == 0) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (a[i][j] != 0) {
                    return false;
                }
            }
            continue;
        }
        for (std::size_t r = i + 1; r < n; ++r) {
            if (a[r][i] == 0) {
                continue;
            }
            BigRational f = a[r][i] / d;
            for (std::size_t c = i; c < n; ++c) {
                a[r][c] -= f * a[i][c];
            }
        }
    }
    return true;
}

} // namespace sepkit
