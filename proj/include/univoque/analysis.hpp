#pragma once

#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "univoque/cache.hpp"
#include "univoque/config.hpp"
#include "univoque/report.hpp"

namespace univoque {

struct AnalysisOptions {
    bool include_timings = false;
    std::optional<std::string> cache_file;
};

/// Full pipeline: box -> levels -> overlaps -> automaton -> Moran solves ->
/// covering bound -> verdict. Partial failures degrade the report instead of
/// aborting; only an unusable invariant box is fatal.
inline AnalysisReport run_analysis(const AnalysisConfig& cfg, AnalysisOptions opts = {}) {
    using Clock = std::chrono::steady_clock;
    AnalysisReport rep;
    rep.config_echo = emit_config(cfg);
    rep.include_timings = opts.include_timings;
    auto stamp = [&, last = Clock::now()](const std::string& name) mutable {
        auto now = Clock::now();
        rep.timings.emplace_back(name, std::chrono::duration<double>(now - last).count());
        last = now;
    };

    IFS ifs = cfg.ifs();

    Box m = [&] {
        if (cfg.invariant_box) {
            if (!validate_invariant_box(ifs, *cfg.invariant_box))
                throw InvariantBoxError("configured box is not invariant under the system");
            return *cfg.invariant_box;
        }
        Box suggested = [&] {
            try {
                return suggest_invariant_box(ifs);
            } catch (const Error& e) {
                throw InvariantBoxError(e.what());
            }
        }();
        if (!validate_invariant_box(ifs, suggested))
            throw InvariantBoxError("suggested box failed validation");
        rep.box_suggested = true;
        return suggested;
    }();
    {
        std::string lo = "(", hi = "(";
        for (std::size_t j = 0; j < m.dim(); ++j) {
            lo += (j ? ", " : "") + format_rational(m.lo[j]);
            hi += (j ? ", " : "") + format_rational(m.hi[j]);
        }
        rep.box_lo = lo + ")";
        rep.box_hi = hi + ")";
    }
    stamp("invariant_box");

    EnumerateOptions eopts{cfg.prune_twins, cfg.frontier_budget};
    GammaTruncation trunc =
        opts.cache_file
            ? enumerate_with_cache(ifs, m, cfg.depth, eopts, *opts.cache_file, cache_key(cfg))
            : enumerate_levels(ifs, m, cfg.depth, eopts);
    rep.truncated_by_budget = trunc.truncated_by_budget;
    if (trunc.truncated_by_budget) {
        rep.status = "partial";
        rep.warnings.push_back("frontier budget exceeded; levels truncated at depth " +
                               std::to_string(trunc.levels.size()));
    }
    {
        auto dedup = survivor_cover_counts(trunc, CoverMode::DedupOne);
        auto prune_all = survivor_cover_counts(trunc, CoverMode::PruneAll);
        for (std::size_t i = 0; i < trunc.levels.size(); ++i)
            rep.levels.push_back({trunc.levels[i].depth, trunc.levels[i].s_count(),
                                  trunc.levels[i].t_count(), trunc.levels[i].pruned_count(),
                                  dedup[i], prune_all[i]});
    }
    stamp("enumerate");

    const int overlap_depth = std::min(cfg.depth, 6);
    OverlapSearchResult overlaps = detect_overlaps(ifs, overlap_depth, 500'000);
    rep.overlap_search_depth = overlaps.searched_depth;
    rep.overlap_search_truncated = overlaps.truncated;
    if (overlaps.truncated)
        rep.warnings.push_back("overlap search truncated at depth " +
                               std::to_string(overlaps.searched_depth));
    for (const auto& p : overlaps.pairs) rep.overlaps.emplace_back(p.u.str(), p.v.str());
    stamp("overlaps");

    TypeAutomaton aut = build_automaton(ifs, m, std::max(cfg.depth, 4),
                                        {cfg.frontier_budget, 4096, 20'000'000});
    rep.automaton = summarize_automaton(aut);
    if (!aut.closed) {
        rep.warnings.push_back("automaton did not close: " + aut.status);
    }
    stamp("automaton");

    DimensionReport& dim = rep.dimension;
    dim.similarity_dim = similarity_dim(ifs, cfg.tolerance);
    dim.s_lower_by_depth = gamma_lower(trunc, cfg.tolerance);
    dim.gamma_empty = trunc.gamma_words.empty();
    if (dim.gamma_empty)
        rep.warnings.push_back("Gamma is empty up to the explored depth; lower bound is 0");

    if (aut.closed && ifs.homogeneous()) {
        GammaExactResult ex = gamma_exact(aut, ifs.maps.front().ratio, cfg.tolerance);
        if (ex.ok) {
            dim.s_exact = ex.s;
            dim.s_exact_tolerance = cfg.tolerance * 10;  // guard factor on the bisection
        } else if (!dim.gamma_empty) {
            rep.warnings.push_back("exact Moran solve unavailable: " + ex.error);
        }
    } else if (aut.closed && !ifs.homogeneous()) {
        rep.warnings.push_back(
            "inhomogeneous ratios: exact Moran solve refused, truncated lower bounds apply");
    }

    if (aut.closed) {
        SpectralBounds growth = survivor_growth(aut, 256, 1e-3);
        rep.automaton.spectral = growth;
        dim.d_v_upper = v_upper(growth.upper, ifs);
    } else {
        rep.warnings.push_back("no certified survivor growth rate; covering bound unavailable");
    }

    dim.s_best = dim.s_exact ? *dim.s_exact
                             : (dim.s_lower_by_depth.empty() ? 0.0
                                                             : dim.s_lower_by_depth.back().second);
    dim.verdict = dim.gamma_empty ? Verdict::Inconclusive
                                  : verdict(dim.s_best, dim.s_exact.has_value(), dim.d_v_upper,
                                            1e-6);
    dim.osc = osc_report(overlaps.pairs, aut.closed, overlaps.searched_depth, dim.similarity_dim);
    stamp("solve");
    return rep;
}

// ---------------------------------------------------------------------------
// Built-in worked systems.
// ---------------------------------------------------------------------------

namespace builtin {

inline Similitude line_map(const std::string& ratio, const std::string& trans) {
    return Similitude(parse_rational(ratio), SignedPermutation::identity(1),
                      Point({parse_rational(trans)}));
}

/// rho x, rho x + rho, rho x + 1 at rho = 1/3.
inline AnalysisConfig ex1() {
    AnalysisConfig cfg;
    cfg.dimension = 1;
    cfg.maps = {line_map("1/3", "0"), line_map("1/3", "1/3"), line_map("1/3", "1")};
    return cfg;
}

/// Five planar maps with ratio 1/3.
inline AnalysisConfig ex2() {
    AnalysisConfig cfg;
    cfg.dimension = 2;
    auto planar = [](const std::string& tx, const std::string& ty) {
        return Similitude(make_rational(1, 3), SignedPermutation::identity(2),
                          Point({parse_rational(tx), parse_rational(ty)}));
    };
    cfg.maps = {planar("0", "0"), planar("2/3", "0"), planar("2/3", "2/3"), planar("0", "2/3"),
                planar("2/9", "4/9")};
    return cfg;
}

/// x/4, x/4 + 9/17, (x+3)/4.
inline AnalysisConfig ex4() {
    AnalysisConfig cfg;
    cfg.dimension = 1;
    cfg.maps = {line_map("1/4", "0"), line_map("1/4", "9/17"), line_map("1/4", "3/4")};
    return cfg;
}

/// Disjoint pair x/3, x/3 + 2/3.
inline AnalysisConfig cantor_pair() {
    AnalysisConfig cfg;
    cfg.dimension = 1;
    cfg.maps = {line_map("1/3", "0"), line_map("1/3", "2/3")};
    return cfg;
}

inline const IntMatrix& quarter_matrix() {
    static const IntMatrix m = {
        {Int(0), Int(1), Int(0), Int(0), Int(1)},
        {Int(0), Int(1), Int(0), Int(1), Int(1)},
        {Int(1), Int(0), Int(1), Int(0), Int(0)},
        {Int(1), Int(0), Int(1), Int(0), Int(0)},
        {Int(0), Int(1), Int(0), Int(1), Int(0)},
    };
    return m;
}

}  // namespace builtin

inline std::optional<AnalysisConfig> builtin_config(const std::string& name) {
    if (name == "ex1") return builtin::ex1();
    if (name == "ex2") return builtin::ex2();
    if (name == "ex4") return builtin::ex4();
    if (name == "cantor") return builtin::cantor_pair();
    return std::nullopt;
}

struct VerificationLine {
    std::string label;
    bool passed = false;
    std::string detail;
};

struct VerificationResult {
    std::string name;
    bool passed = true;
    std::vector<VerificationLine> lines;

    void add(const std::string& label, bool ok, const std::string& detail = "") {
        lines.push_back({label, ok, detail});
        passed &= ok;
    }
};

/// Re-runs a canonical instantiation and checks its published values.
inline VerificationResult verify_builtin(const std::string& name) {
    auto cfg = builtin_config(name);
    if (!cfg || name == "cantor") throw ConfigError("unknown verification target '" + name + "'");
    VerificationResult res;
    res.name = name;

    AnalysisReport rep = run_analysis(*cfg);
    auto counts_match = [&](const std::vector<std::size_t>& expect) {
        if (rep.levels.size() < expect.size()) return false;
        for (std::size_t i = 0; i < expect.size(); ++i)
            if (rep.levels[i].s != expect[i]) return false;
        return true;
    };
    char buf[64];

    if (name == "ex1") {
        res.add("counts |S_k| = k-1 to depth 12",
                counts_match({1, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}));
        res.add("automaton closes", rep.automaton.closed);
        const bool have = rep.dimension.s_exact.has_value();
        double lambda = have ? std::pow(3.0, *rep.dimension.s_exact) : 0.0;
        std::snprintf(buf, sizeof(buf), "lambda = %.5f", lambda);
        res.add("lambda within 5e-4 of 2.3247", have && std::fabs(lambda - 2.3247) <= 5e-4, buf);
        const double cubic =
            lambda * lambda * lambda - 3 * lambda * lambda + 2 * lambda - 1;
        res.add("cubic residual < 1e-6", have && std::fabs(cubic) < 1e-6);
        res.add("verdict EqualityCertified",
                rep.dimension.verdict == Verdict::EqualityCertified);
    } else if (name == "ex2") {
        res.add("counts |S_k| = 3k-1 to depth 10",
                counts_match({3, 5, 8, 11, 14, 17, 20, 23, 26, 29}));
        const bool have = rep.dimension.s_exact.has_value();
        const double x = have ? std::pow(1.0 / 3.0, *rep.dimension.s_exact) : 0.0;
        std::snprintf(buf, sizeof(buf), "1/x = %.5f", have ? 1 / x : 0.0);
        res.add("cubic residual < 1e-6",
                have && std::fabs(x * x * x - 2 * x * x + 5 * x - 1) < 1e-6);
        res.add("1/x within 1e-3 of 4.61347", have && std::fabs(1 / x - 4.61347) <= 1e-3, buf);
        bool found = false;
        for (const auto& [u, v] : rep.overlaps) found |= (u == "42" && v == "54");
        res.add("overlap (42, 54) found", found);
        res.add("verdict EqualityCertified",
                rep.dimension.verdict == Verdict::EqualityCertified);
    } else {  // ex4
        res.add("counts |S_k| to depth 6", counts_match({1, 1, 2, 4, 9, 21}));
        res.add("automaton closes with 5 recurring types",
                rep.automaton.closed && rep.automaton.types == 5);
        IntMatrix got;
        for (const auto& row : rep.automaton.matrix) {
            IntVector r;
            for (long long x : row) r.push_back(Int(x));
            got.push_back(std::move(r));
        }
        res.add("transfer matrix matches the published one up to permutation",
                matrix_equal_up_to_permutation(got, builtin::quarter_matrix()));
        int ones = 0, nonzero = 0;
        for (long long e : rep.automaton.emission) {
            if (e != 0) ++nonzero;
            if (e == 1) ++ones;
        }
        res.add("emission supported on exactly two types", nonzero == 2 && ones == 2);
        const bool sp = rep.automaton.spectral.has_value();
        std::snprintf(buf, sizeof(buf), "bounds [%.6f, %.6f]",
                      sp ? rep.automaton.spectral->lower : 0.0,
                      sp ? rep.automaton.spectral->upper : 0.0);
        res.add("spectral bounds of width <= 1e-3 containing 2.2775",
                sp && rep.automaton.spectral->width() <= 1e-3 &&
                    rep.automaton.spectral->contains(2.2775),
                buf);
        const bool have = rep.dimension.s_exact.has_value();
        std::snprintf(buf, sizeof(buf), "4^s = %.5f",
                      have ? std::pow(4.0, *rep.dimension.s_exact) : 0.0);
        res.add("4^s > 2.4693", have && std::pow(4.0, *rep.dimension.s_exact) > 2.4693, buf);
        bool found = false;
        for (const auto& [u, v] : rep.overlaps) found |= (u == "232" && v == "311");
        res.add("overlap (232, 311) found", found);
        res.add("verdict EqualityCertified",
                rep.dimension.verdict == Verdict::EqualityCertified);
    }
    return res;
}

}  // namespace univoque
