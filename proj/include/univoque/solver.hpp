#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "univoque/automaton.hpp"
#include "univoque/gamma.hpp"

namespace univoque {

// Numerical side: Moran equations, the covering upper bound, and the final
// verdict. Root finding is plain bisection in long double; tolerances carry a
// guard factor so double-rounded reports stay inside them.

struct BisectionResult {
    long double root = 0;
    long double residual = 0;      // f(root)
    long double lo = 0, hi = 0;    // final bracket, f(lo) >= 0 >= f(hi)
    int iterations = 0;
};

/// Root of a strictly decreasing function on [lo, hi] with f(lo) >= 0 >= f(hi).
inline BisectionResult bisect_decreasing(const std::function<long double(long double)>& f,
                                         long double lo, long double hi, long double tol) {
    long double flo = f(lo), fhi = f(hi);
    if (flo < 0 || fhi > 0) throw Error("bisection: root not bracketed");
    BisectionResult r;
    while (hi - lo > tol && r.iterations < 200) {
        const long double mid = (lo + hi) / 2;
        const long double fm = f(mid);
        if (fm >= 0)
            lo = mid;
        else
            hi = mid;
        ++r.iterations;
    }
    r.lo = lo;
    r.hi = hi;
    r.root = (lo + hi) / 2;
    r.residual = f(r.root);
    return r;
}

/// Unique solution of sum_i ratio_i^s = 1.
inline double similarity_dim(const IFS& ifs, double tol = 1e-9) {
    if (ifs.maps.empty()) throw Error("similarity_dim: empty system");
    std::vector<long double> ratios;
    for (const auto& f : ifs.maps) ratios.push_back(to_ld(f.ratio));
    auto f = [&](long double s) {
        long double sum = 0;
        for (long double r : ratios) sum += std::pow(r, s);
        return sum - 1;
    };
    const long double rmax = to_ld(ifs.max_ratio());
    long double hi = std::log((long double)ifs.alphabet_size()) / -std::log(rmax) + 1;
    return static_cast<double>(bisect_decreasing(f, 0, hi, tol).root);
}

/// Truncated Moran solutions s_N for Gamma cut at each depth N; the sequence
/// is nondecreasing in N. Depths with an empty Gamma are skipped.
inline std::vector<std::pair<int, double>> gamma_lower(const GammaTruncation& trunc,
                                                       double tol = 1e-9) {
    std::vector<std::pair<int, double>> out;
    std::vector<long double> ratios;
    std::size_t used = 0;
    for (std::size_t depth_i = 0; depth_i < trunc.levels.size(); ++depth_i) {
        const int n = trunc.levels[depth_i].depth;
        while (used < trunc.gamma_words.size() && trunc.gamma_words[used].level <= n)
            ratios.push_back(to_ld(trunc.gamma_words[used++].ratio));
        if (ratios.empty()) continue;
        auto f = [&](long double s) {
            long double sum = 0;
            for (long double r : ratios) sum += std::pow(r, s);
            return sum - 1;
        };
        long double hi = 1;
        while (f(hi) > 0 && hi < 1e6) hi *= 2;
        out.emplace_back(n, static_cast<double>(bisect_decreasing(f, 0, hi, tol).root));
    }
    return out;
}

/// Same Moran truncation driven by |S_k| coefficients of a homogeneous system
/// (used to reach depths no enumeration could).
inline double gamma_lower_from_counts(const std::vector<Int>& s_counts, const Rational& ratio,
                                      double tol = 1e-9) {
    const long double r = to_ld(ratio);
    auto f = [&](long double s) {
        long double sum = 0;
        for (std::size_t k = 0; k < s_counts.size(); ++k)
            sum += s_counts[k].convert_to<long double>() * std::pow(r, (k + 1) * s);
        return sum - 1;
    };
    long double hi = 1;
    while (f(hi) > 0 && hi < 1e6) hi *= 2;
    if (f(0) < 0) throw Error("gamma_lower_from_counts: empty Gamma");
    return static_cast<double>(bisect_decreasing(f, 0, hi, tol).root);
}

struct GammaExactResult {
    bool ok = false;
    double s = 0;          // dimension value
    double x = 0;          // root of G(x) = 1, x = ratio^s
    double residual = 0;   // |G(x) - 1|
    std::string error;
};

namespace detail {

/// emission . (I - xA)^{-1} . base by Gaussian elimination in long double.
inline long double resolvent_tail(const IntMatrix& a, const IntVector& emission,
                                  const IntVector& base, long double x) {
    const std::size_t n = a.size();
    if (n == 0) return 0;
    std::vector<std::vector<long double>> m(n, std::vector<long double>(n + 1, 0));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c)
            m[r][c] = (r == c ? 1.0L : 0.0L) - x * a[r][c].convert_to<long double>();
        m[r][n] = base[r].convert_to<long double>();
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs((double)m[r][col]) > std::fabs((double)m[piv][col])) piv = r;
        std::swap(m[col], m[piv]);
        if (m[col][col] == 0) throw Error("resolvent: singular system");
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const long double f = m[r][col] / m[col][col];
            if (f == 0) continue;
            for (std::size_t c = col; c <= n; ++c) m[r][c] -= f * m[col][c];
        }
    }
    long double out = 0;
    for (std::size_t r = 0; r < n; ++r)
        out += emission[r].convert_to<long double>() * (m[r][n] / m[r][r]);
    return out;
}

}  // namespace detail

/// Exact-solve of the full Moran equation of a closed automaton over a
/// homogeneous system:
///   G(x) = sum_{k<=k0} |S_k| x^k + x^{k0+1} emission.(I-xA)^{-1}.base = 1,
/// on x in (0, 1/rho(A)), returning s = log x / log ratio.
inline GammaExactResult gamma_exact(const TypeAutomaton& aut, const Rational& ratio,
                                    double tol = 1e-9) {
    GammaExactResult res;
    if (!aut.closed) {
        res.error = "automaton not closed";
        return res;
    }
    if (!(ratio > 0 && ratio < 1)) {
        res.error = "ratio must lie in (0,1)";
        return res;
    }

    bool any_gamma = false;
    for (const auto& c : aut.preperiodic_S) any_gamma |= c > 0;
    for (const auto& c : aut.emission) any_gamma |= c > 0;
    if (!any_gamma) {
        res.error = "Gamma is empty";
        return res;
    }

    // Convergence guard: stay strictly inside the resolvent's disk.
    SpectralBounds rho = spectral_bounds(aut.A, {}, 512, 1e-12);
    bool has_tail = false;
    for (const auto& e : aut.emission) has_tail |= e > 0;

    auto g = [&](long double x) {
        long double sum = 0;
        for (std::size_t k = 0; k < aut.preperiodic_S.size(); ++k)
            sum += aut.preperiodic_S[k].convert_to<long double>() * std::pow(x, (long double)(k + 1));
        if (has_tail && x > 0)
            sum += std::pow(x, (long double)(aut.base_depth + 1)) *
                   detail::resolvent_tail(aut.A, aut.emission, aut.base_counts, x);
        return 1 - sum;  // decreasing in the bisection's sense: g > 0 below the root
    };

    long double hi;
    if (has_tail && rho.upper > 1e-12) {
        hi = std::min(1.0L - 1e-9L, 1.0L / (long double)rho.upper - 1e-9L);
    } else {
        hi = 1.0L;  // polynomial case: Gamma finite, root may sit at 1 (s = 0)
    }
    if (g(hi) > 0) {
        res.error = "Moran root at or beyond the radius of convergence (spectral radius ~ [" +
                    std::to_string(rho.lower) + ", " + std::to_string(rho.upper) + "])";
        return res;
    }

    BisectionResult b = bisect_decreasing(g, 0, hi, tol);
    res.x = static_cast<double>(b.root);
    res.residual = static_cast<double>(std::fabs((double)b.residual));
    if (rho.lower > 0 && (long double)res.x * (long double)rho.lower >= 1) {
        res.error = "root does not satisfy the convergence guard x * rho(A) < 1";
        return res;
    }
    res.s = static_cast<double>(std::log(b.root) / std::log(to_ld(ratio)));
    res.ok = true;
    return res;
}

/// Covering upper bound d_V = log sigma / -log r_max; subexponential covers
/// give 0.
inline double v_upper(double sigma_upper, const IFS& ifs) {
    if (sigma_upper < 0) throw Error("v_upper: negative growth bound");
    if (sigma_upper <= 1) return 0;
    const double rmax = static_cast<double>(to_ld(ifs.max_ratio()));
    return std::log(sigma_upper) / -std::log(rmax);
}

enum class Verdict { EqualityCertified, BracketOnly, Inconclusive };

inline std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::EqualityCertified: return "EqualityCertified";
        case Verdict::BracketOnly: return "BracketOnly";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

/// Decision logic: equality needs an exact Moran value and a covering bound
/// below it; a covering bound above the best lower bound only brackets; no
/// covering bound at all leaves just "dim >= s".
inline Verdict verdict(double s_best, bool s_is_exact, std::optional<double> d_v,
                       double tol = 1e-6) {
    if (s_best < 0) throw Error("verdict: negative dimension");
    if (!d_v) return Verdict::Inconclusive;
    if (*d_v <= s_best + tol && s_is_exact) return Verdict::EqualityCertified;
    return Verdict::BracketOnly;
}

enum class OscStatus { Positive, Negative, Inconclusive };

struct OscReport {
    OscStatus status = OscStatus::Inconclusive;
    std::size_t overlap_count = 0;
    bool automaton_closed = false;
    int search_depth = 0;
    std::string conclusion;
};

inline std::string osc_status_name(OscStatus s) {
    switch (s) {
        case OscStatus::Positive: return "positive";
        case OscStatus::Negative: return "negative";
        case OscStatus::Inconclusive: return "inconclusive";
    }
    return "?";
}

/// Evidence-level open-set-condition report: an exact overlap refutes the
/// OSC; a closed automaton with no overlap found up to the search depth is
/// finite-type evidence for it; otherwise nothing can be concluded.
inline OscReport osc_report(const std::vector<OverlapPair>& overlaps, bool automaton_closed,
                            int search_depth, double similarity_dimension) {
    OscReport r;
    r.overlap_count = overlaps.size();
    r.automaton_closed = automaton_closed;
    r.search_depth = search_depth;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.5f", similarity_dimension);
    if (!overlaps.empty()) {
        r.status = OscStatus::Negative;
        r.conclusion = "exact overlap " + overlaps.front().u.str() + " = " +
                       overlaps.front().v.str() +
                       ": no open set condition; dim_H U < dim_S K = " + buf + " expected";
    } else if (automaton_closed) {
        r.status = OscStatus::Positive;
        r.conclusion = "finite-type evidence and no exact overlap up to depth " +
                       std::to_string(search_depth) +
                       ": open set condition holds; dim_H U = dim_S K = " + buf;
    } else {
        r.status = OscStatus::Inconclusive;
        r.conclusion = "no overlap up to depth " + std::to_string(search_depth) +
                       " but no finite-type closure: inconclusive at this depth";
    }
    return r;
}

struct DimensionBracket {
    double lower = 0;
    std::optional<double> upper;
    enum class Method { Truncation, GeneratingFunction, Covering } method = Method::Truncation;
};

struct DimensionReport {
    double similarity_dim = 0;
    std::vector<std::pair<int, double>> s_lower_by_depth;
    std::optional<double> s_exact;
    double s_exact_tolerance = 0;
    std::optional<double> d_v_upper;
    double s_best = 0;
    Verdict verdict = Verdict::Inconclusive;
    bool gamma_empty = false;
    OscReport osc;
};

}  // namespace univoque
