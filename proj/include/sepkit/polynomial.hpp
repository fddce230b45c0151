#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "sepkit/rational.hpp"

namespace sepkit {

/// Dense univariate polynomial in α with rational coefficients, ascending
/// degree. The zero polynomial has no coefficients.
class Polynomial {
public:
    Polynomial() = default;
    Polynomial(std::vector<BigRational> coeffs) : c_(std::move(coeffs)) { trim(); }
    Polynomial(std::initializer_list<long long> coeffs)
    {
        for (long long v : coeffs) {
            c_.emplace_back(v);
        }
        trim();
    }
    static Polynomial constant(const BigRational& v) { return Polynomial(std::vector<BigRational>{v}); }
    /// slope*α + offset
    static Polynomial linear(const BigRational& slope, const BigRational& offset)
    {
        return Polynomial(std::vector<BigRational>{offset, slope});
    }
    static Polynomial from(const AffineParam& p) { return linear(p.slope, p.offset); }

    const std::vector<BigRational>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    BigRational leading() const { return c_.empty() ? BigRational(0) : c_.back(); }
    BigRational coeff(std::size_t i) const { return i < c_.size() ? c_[i] : BigRational(0); }

    template <class T>
    T eval(const T& x) const
    {
        T acc(0);
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
            acc = acc * x + T(*it);
        }
        return acc;
    }
    BigRational operator()(const BigRational& x) const { return eval(x); }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b)
    {
        std::vector<BigRational> out(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = a.coeff(i) + b.coeff(i);
        }
        return Polynomial(std::move(out));
    }
    friend Polynomial operator-(const Polynomial& a) { return a * Polynomial::constant(BigRational(-1)); }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b)
    {
        if (a.is_zero() || b.is_zero()) {
            return {};
        }
        std::vector<BigRational> out(a.c_.size() + b.c_.size() - 1);
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            for (std::size_t j = 0; j < b.c_.size(); ++j) {
                out[i + j] += a.c_[i] * b.c_[j];
            }
        }
        return Polynomial(std::move(out));
    }
    friend Polynomial operator*(const BigRational& s, const Polynomial& p) { return Polynomial::constant(s) * p; }
    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }

    /// Quotient and remainder of Euclidean division; divisor must be nonzero.
    static std::pair<Polynomial, Polynomial> divmod(const Polynomial& a, const Polynomial& b)
    {
        if (b.is_zero()) {
            throw DomainError("polynomial division by zero");
        }
        std::vector<BigRational> rem = a.c_;
        int db = b.degree();
        std::vector<BigRational> quot(std::max(0, a.degree() - db + 1));
        for (int i = a.degree(); i >= db; --i) {
            BigRational f = rem[i] / b.leading();
            quot[i - db] = f;
            for (int j = 0; j <= db; ++j) {
                rem[i - db + j] -= f * b.c_[j];
            }
        }
        return {Polynomial(std::move(quot)), Polynomial(std::move(rem))};
    }

    /// True when b divides this polynomial exactly over Q.
    bool divisible_by(const Polynomial& b) const { return divmod(*this, b).second.is_zero(); }

    /// Integer coefficients with content 1 and positive leading coefficient;
    /// returns the scale factor that was applied.
    BigRational make_primitive()
    {
        if (c_.empty()) {
            return BigRational(1);
        }
        BigInt l = 1;
        for (const auto& v : c_) {
            l = mp::lcm(l, denominator_of(v));
        }
        BigInt g = 0;
        for (const auto& v : c_) {
            g = mp::gcd(g, numerator_of(v * BigRational(l)));
        }
        BigRational scale = BigRational(l) / BigRational(g);
        if (c_.back() < 0) {
            scale = -scale;
        }
        for (auto& v : c_) {
            v *= scale;
        }
        return scale;
    }

    std::string to_string(const std::string& var = "α") const
    {
        if (c_.empty()) {
            return "0";
        }
        std::string out;
        for (int i = degree(); i >= 0; --i) {
            const BigRational& v = c_[i];
            if (v == 0) {
                continue;
            }
            BigRational mag = mp::abs(v);
            if (out.empty()) {
                out = v < 0 ? "-" : "";
            } else {
                out += v < 0 ? " - " : " + ";
            }
            std::string num = sepkit::to_string(mag);
            if (i == 0) {
                out += num;
            } else {
                if (mag != 1) {
                    out += num + "·";
                }
                out += var;
                if (i > 1) {
                    out += "^" + std::to_string(i);
                }
            }
        }
        return out;
    }

private:
    void trim()
    {
        while (!c_.empty() && c_.back() == 0) {
            c_.pop_back();
        }
    }

    std::vector<BigRational> c_;
};

/// Legendre polynomial P_j with P_j(1) = 1, from the three-term recurrence.
inline Polynomial legendre_coeffs(unsigned j)
{
    Polynomial prev{1};
    if (j == 0) {
        return prev;
    }
    Polynomial cur{0, 1};
    const Polynomial t{0, 1};
    for (unsigned n = 1; n < j; ++n) {
        Polynomial next = make_rational(2 * n + 1, n + 1) * (t * cur) - make_rational(n, n + 1) * prev;
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

} // namespace sepkit
