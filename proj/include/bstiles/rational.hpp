#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

#include "bstiles/errors.hpp"

namespace bstiles {

// Everything in this library is exact. Colors, coordinates and map slopes
// are rationals over arbitrary-precision integers; floating point is used
// nowhere except as a display convenience in the renderer.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// floor(x) as an integer, correct for negative values.
inline BigInt floor_rat(const Rational& x) {
    BigInt num = numerator(x);
    BigInt den = denominator(x); // always > 0
    BigInt q = num / den;        // truncates toward zero
    if (num < 0 && q * den != num) --q;
    return q;
}

inline BigInt ceil_rat(const Rational& x) { return -floor_rat(-x); }

// (num/den)^e for any integer exponent, exact.
inline Rational pow_ratio(BigInt num, BigInt den, long long e) {
    if (e < 0) {
        std::swap(num, den);
        e = -e;
    }
    Rational result(1);
    Rational base(num, den);
    while (e > 0) {
        if (e & 1) result *= base;
        base *= base;
        e >>= 1;
    }
    return result;
}

inline Rational pow_rational(const Rational& base, long long e) {
    return pow_ratio(numerator(base), denominator(base), e);
}

// "p" or "p/q" with optional sign; q must be positive.
inline Rational parse_rational(std::string_view text) {
    auto fail = [&] {
        throw ParseError("invalid rational '" + std::string(text) + "'");
    };
    if (text.empty()) fail();
    auto slash = text.find('/');
    auto parse_int = [&](std::string_view part) -> BigInt {
        if (part.empty()) fail();
        std::size_t i = (part[0] == '-' || part[0] == '+') ? 1 : 0;
        if (i == part.size()) fail();
        for (; i < part.size(); ++i)
            if (part[i] < '0' || part[i] > '9') fail();
        return BigInt(std::string(part));
    };
    BigInt num = parse_int(text.substr(0, slash));
    if (slash == std::string_view::npos) return Rational(num);
    BigInt den = parse_int(text.substr(slash + 1));
    if (den <= 0) fail();
    return Rational(num, den);
}

inline std::string format_rational(const Rational& x) {
    std::string s = numerator(x).str();
    if (denominator(x) != 1) s += "/" + denominator(x).str();
    return s;
}

// Decimal rendering with a fixed number of significant digits, computed
// with integer arithmetic only so output bytes never depend on the
// platform's floating point. Display use only.
inline std::string format_decimal(const Rational& x, int sig_digits = 6) {
    if (x == 0) return "0";
    std::string sign = x < 0 ? "-" : "";
    Rational mag = x < 0 ? Rational(-x) : x;
    // Scale into [10^(sig-1), 10^sig) and round half up.
    int exp10 = 0;
    BigInt lo = pow(BigInt(10), static_cast<unsigned>(sig_digits - 1));
    BigInt hi = lo * 10;
    Rational scaled = mag;
    while (scaled < lo) {
        scaled *= 10;
        --exp10;
    }
    while (scaled >= hi) {
        scaled /= 10;
        ++exp10;
    }
    BigInt digits = floor_rat(scaled + Rational(1, 2));
    if (digits == hi) {
        digits /= 10;
        ++exp10;
    }
    std::string d = digits.str();
    int point = static_cast<int>(d.size()) + exp10; // digits before the point
    std::string out;
    if (point <= 0) {
        out = "0." + std::string(static_cast<std::size_t>(-point), '0') + d;
    } else if (point >= static_cast<int>(d.size())) {
        out = d + std::string(static_cast<std::size_t>(point - d.size()), '0');
    } else {
        out = d.substr(0, point) + "." + d.substr(point);
    }
    // Trim trailing zeros in the fractional part.
    if (out.find('.') != std::string::npos) {
        while (out.back() == '0') out.pop_back();
        if (out.back() == '.') out.pop_back();
    }
    return sign + out;
}

} // namespace bstiles
