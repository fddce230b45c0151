#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <string>
#include <string_view>

#include "sepkit/errors.hpp"

namespace sepkit {

namespace mp = boost::multiprecision;

using BigInt = mp::number<mp::gmp_int, mp::et_off>;
using BigRational = mp::number<mp::gmp_rational, mp::et_off>;

inline BigRational make_rational(long long num, long long den = 1)
{
    if (den == 0) {
        throw DomainError("zero denominator");
    }
    return BigRational(BigInt(num), BigInt(den));
}

inline BigInt numerator_of(const BigRational& q) { return mp::numerator(q); }
inline BigInt denominator_of(const BigRational& q) { return mp::denominator(q); }

inline bool is_integer(const BigRational& q) { return denominator_of(q) == 1; }

/// Mathematical floor (toward -infinity), also for negative values.
inline BigInt floor(const BigRational& q)
{
    BigInt n = numerator_of(q);
    BigInt d = denominator_of(q);
    BigInt quot = n / d; // truncates toward zero
    if (n < 0 && quot * d != n) {
        quot -= 1;
    }
    return quot;
}

/// floor(a/b) for machine integers, b != 0.
inline long long floor_div(long long a, long long b)
{
    long long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) {
        --q;
    }
    return q;
}

/// True when q is an integer <= 0.
inline bool is_nonpositive_integer(const BigRational& q) { return is_integer(q) && q <= 0; }

/// Canonical "p/q" serialization ("p" alone when q = 1).
inline std::string to_string(const BigRational& q)
{
    if (is_integer(q)) {
        return numerator_of(q).str();
    }
    return numerator_of(q).str() + "/" + denominator_of(q).str();
}

/// Accepts "p", "p/q", and plain decimals such as "0.5" or "-1.25".
inline BigRational parse_rational(std::string_view text)
{
    std::string s(text);
    auto trim = [](std::string& t) {
        const auto first = t.find_first_not_of(" \t");
        const auto last = t.find_last_not_of(" \t");
        t = (first == std::string::npos) ? std::string() : t.substr(first, last - first + 1);
    };
    trim(s);
    if (s.empty()) {
        throw ParseError("empty rational");
    }
    auto parse_int = [](const std::string& t) {
        if (t.empty() || t.find_first_not_of("+-0123456789") != std::string::npos) {
            throw ParseError("malformed integer '" + t + "'");
        }
        return BigInt(t[0] == '+' ? t.substr(1) : t);
    };
    try {
        if (auto slash = s.find('/'); slash != std::string::npos) {
            BigInt den = parse_int(s.substr(slash + 1));
            if (den == 0) {
                throw ParseError("zero denominator in '" + s + "'");
            }
            return BigRational(parse_int(s.substr(0, slash)), den);
        }
        if (auto dot = s.find('.'); dot != std::string::npos) {
            std::string whole = s.substr(0, dot);
            std::string frac = s.substr(dot + 1);
            bool negative = !whole.empty() && whole[0] == '-';
            if (whole == "-" || whole == "+" || whole.empty()) {
                whole += "0";
            }
            BigInt scale = mp::pow(BigInt(10), static_cast<unsigned>(frac.size()));
            BigInt w = parse_int(whole);
            BigInt f = frac.empty() ? BigInt(0) : parse_int(frac);
            BigRational value = BigRational(mp::abs(w)) + BigRational(f, scale);
            return negative ? BigRational(-value) : value;
        }
        return BigRational(parse_int(s));
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError("cannot parse rational '" + s + "'");
    }
}

/// Parameter of the form slope*alpha + offset.
struct AffineParam {
    BigRational slope{1};
    BigRational offset{0};

    BigRational operator()(const BigRational& alpha) const { return slope * alpha + offset; }

    AffineParam shifted(const BigRational& delta) const { return {slope, offset + delta}; }

    friend bool operator==(const AffineParam&, const AffineParam&) = default;
};

/// "α+11/6" style rendering used by the CLI.
inline std::string to_string(const AffineParam& p)
{
    std::string out;
    if (p.slope == 1) {
        out = "α";
    } else if (p.slope == -1) {
        out = "-α";
    } else if (p.slope != 0) {
        out = to_string(p.slope) + "α";
    }
    if (p.offset == 0) {
        return out.empty() ? "0" : out;
    }
    if (out.empty()) {
        return to_string(p.offset);
    }
    if (p.offset < 0) {
        return out + "-" + to_string(BigRational(-p.offset));
    }
    return out + "+" + to_string(p.offset);
}

} // namespace sepkit
