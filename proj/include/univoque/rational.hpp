#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <string>

#include "univoque/errors.hpp"

namespace univoque {

// Exact arithmetic backbone. cpp_rational keeps values in canonical form:
// gcd(|num|, den) == 1 and den > 0, which is exactly the invariant the rest
// of the library relies on for map equality and box predicates.
using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(Int num, Int den) {
    if (den == 0) throw Error("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    return Rational(num) / Rational(den);
}

/// Parses "p" or "p/q" with optional leading sign. Whitespace is not accepted.
inline Rational parse_rational(const std::string& text) {
    if (text.empty()) throw Error("empty rational literal");
    auto is_int = [](const std::string& s) {
        std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
        if (i == s.size()) return false;
        for (; i < s.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
        return true;
    };
    const auto slash = text.find('/');
    if (slash == std::string::npos) {
        if (!is_int(text)) throw Error("malformed rational '" + text + "'");
        return Rational(Int(text));
    }
    const std::string num = text.substr(0, slash);
    const std::string den = text.substr(slash + 1);
    if (!is_int(num) || !is_int(den)) throw Error("malformed rational '" + text + "'");
    Int d(den);
    if (d == 0) throw Error("zero denominator in '" + text + "'");
    return make_rational(Int(num), d);
}

/// Serializes in the same shape parse_rational accepts: "p" for integers, else "p/q".
inline std::string format_rational(const Rational& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

inline long double to_ld(const Rational& r) { return r.convert_to<long double>(); }

/// r^k for k >= 0, exact.
inline Rational pow_rational(const Rational& r, unsigned k) {
    Rational acc(1), base = r;
    while (k != 0) {
        if (k & 1u) acc *= base;
        base *= base;
        k >>= 1;
    }
    return acc;
}

}  // namespace univoque
