#pragma once

// Hand-frozen instantiations of the worked systems used across the test
// suites. Kept independent from the library's builtin catalogue on purpose.

#include <string>
#include <vector>

#include "univoque/similitude.hpp"

namespace fixtures {

using namespace univoque;

inline Similitude sim1(const std::string& ratio, const std::string& trans) {
    return Similitude(parse_rational(ratio), SignedPermutation::identity(1),
                      Point({parse_rational(trans)}));
}

inline Similitude sim2(const std::string& ratio, const std::string& tx, const std::string& ty) {
    return Similitude(parse_rational(ratio), SignedPermutation::identity(2),
                      Point({parse_rational(tx), parse_rational(ty)}));
}

/// Three maps rho*x, rho*x + rho, rho*x + 1 on the line (default rho = 1/3).
inline IFS ex1(const std::string& rho = "1/3") {
    Rational r = parse_rational(rho);
    return IFS(1, {sim1(rho, "0"), sim1(rho, format_rational(r)), sim1(rho, "1")});
}

/// Five planar maps with ratio lambda (default 1/3); translations from the
/// unit-square corner configuration plus one interior map.
inline IFS ex2(const std::string& lambda = "1/3") {
    Rational l = parse_rational(lambda);
    Rational one_m = Rational(1) - l;
    std::string a = format_rational(one_m);                // 1 - l
    std::string a5 = format_rational(l * one_m);           // l(1-l)
    std::string b5 = format_rational(one_m * one_m);       // (1-l)^2
    return IFS(2, {sim2(lambda, "0", "0"), sim2(lambda, a, "0"), sim2(lambda, a, a),
                   sim2(lambda, "0", a), sim2(lambda, a5, b5)});
}

/// x/4, x/4 + 9/17, (x+3)/4 on the line.
inline IFS ex4() { return IFS(1, {sim1("1/4", "0"), sim1("1/4", "9/17"), sim1("1/4", "3/4")}); }

/// Classical disjoint pair x/3, x/3 + 2/3.
inline IFS cantor_pair() { return IFS(1, {sim1("1/3", "0"), sim1("1/3", "2/3")}); }

inline Box interval(const std::string& lo, const std::string& hi) {
    return Box(Point({parse_rational(lo)}), Point({parse_rational(hi)}));
}

inline Box square(const std::string& lo, const std::string& hi) {
    return Box(Point({parse_rational(lo), parse_rational(lo)}),
               Point({parse_rational(hi), parse_rational(hi)}));
}

}  // namespace fixtures
