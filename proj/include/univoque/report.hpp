#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "univoque/automaton.hpp"
#include "univoque/config.hpp"
#include "univoque/solver.hpp"

namespace univoque {

// Reporting. Human- and machine-readable renderings carry the same numbers:
// dimension scalars are rounded to 1e-5, certified brackets outward to 1e-6.

inline double round_value(double x) { return std::round(x * 1e5) / 1e5; }
inline double round_lower(double x) { return std::floor(x * 1e6) / 1e6; }
inline double round_upper(double x) { return std::ceil(x * 1e6) / 1e6; }

struct LevelSummary {
    int k = 0;
    std::size_t s = 0, t = 0, pruned = 0;
    Int cover_dedup_one, cover_prune_all;
};

struct AutomatonSummary {
    bool closed = false;
    std::size_t types = 0;
    int closure_level = 0;
    int base_depth = 0;
    int levels_built = 0;
    std::string status;
    std::vector<std::vector<long long>> matrix;
    std::vector<long long> emission;
    std::vector<long long> pruned_children;
    std::vector<long long> base_counts;
    std::vector<long long> preperiodic_s;
    std::vector<std::string> representatives;
    std::optional<SpectralBounds> spectral;
};

struct AnalysisReport {
    Json config_echo;
    std::string status = "complete";  // or "partial"
    std::vector<std::string> warnings;
    std::string box_lo, box_hi;  // rendered invariant box
    bool box_suggested = false;

    std::vector<LevelSummary> levels;
    bool truncated_by_budget = false;

    std::vector<std::pair<std::string, std::string>> overlaps;
    int overlap_search_depth = 0;
    bool overlap_search_truncated = false;

    AutomatonSummary automaton;
    DimensionReport dimension;

    bool include_timings = false;
    std::vector<std::pair<std::string, double>> timings;
};

inline AutomatonSummary summarize_automaton(const TypeAutomaton& aut) {
    AutomatonSummary s;
    s.closed = aut.closed;
    s.types = aut.type_count();
    s.closure_level = aut.closure_level;
    s.base_depth = aut.base_depth;
    s.levels_built = aut.levels_built;
    s.status = aut.status;
    if (aut.closed) {
        for (const auto& row : aut.A) {
            std::vector<long long> r;
            for (const auto& x : row) r.push_back(x.convert_to<long long>());
            s.matrix.push_back(std::move(r));
        }
        for (const auto& x : aut.emission) s.emission.push_back(x.convert_to<long long>());
        for (const auto& x : aut.pruned_children)
            s.pruned_children.push_back(x.convert_to<long long>());
        for (const auto& x : aut.base_counts) s.base_counts.push_back(x.convert_to<long long>());
        for (const auto& x : aut.preperiodic_S)
            s.preperiodic_s.push_back(x.convert_to<long long>());
        for (const auto& t : aut.types) s.representatives.push_back(t.representative.str());
    }
    return s;
}

namespace detail {

inline std::string fmt5(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.5f", x);
    return buf;
}

}  // namespace detail

inline Json report_to_json(const AnalysisReport& r) {
    Json j;
    j["version"] = 1;
    j["status"] = r.status;
    j["warnings"] = r.warnings;
    j["config"] = r.config_echo;
    j["invariant_box"] = {{"lo", r.box_lo}, {"hi", r.box_hi}, {"suggested", r.box_suggested}};

    j["levels"] = Json::array();
    for (const auto& l : r.levels) {
        Json e;
        e["k"] = l.k;
        e["S"] = l.s;
        e["T"] = l.t;
        e["pruned"] = l.pruned;
        e["cover_dedup_one"] = l.cover_dedup_one.str();
        e["cover_prune_all"] = l.cover_prune_all.str();
        j["levels"].push_back(e);
    }
    j["truncated_by_budget"] = r.truncated_by_budget;

    j["overlaps"] = Json::array();
    for (const auto& [u, v] : r.overlaps) j["overlaps"].push_back(Json::array({u, v}));
    j["overlap_search"] = {{"depth", r.overlap_search_depth},
                           {"truncated", r.overlap_search_truncated}};

    Json a;
    a["closed"] = r.automaton.closed;
    a["types"] = r.automaton.types;
    a["closure_level"] = r.automaton.closure_level;
    a["base_depth"] = r.automaton.base_depth;
    a["levels_built"] = r.automaton.levels_built;
    if (!r.automaton.status.empty()) a["status"] = r.automaton.status;
    if (r.automaton.closed) {
        a["matrix"] = r.automaton.matrix;
        a["emission"] = r.automaton.emission;
        a["pruned_children"] = r.automaton.pruned_children;
        a["base_counts"] = r.automaton.base_counts;
        a["preperiodic_S"] = r.automaton.preperiodic_s;
        a["representatives"] = r.automaton.representatives;
    }
    if (r.automaton.spectral) {
        a["spectral_radius"] = {{"lower", round_lower(r.automaton.spectral->lower)},
                                {"upper", round_upper(r.automaton.spectral->upper)}};
    }
    j["automaton"] = a;

    Json d;
    d["similarity_dim"] = round_value(r.dimension.similarity_dim);
    d["s_lower_by_depth"] = Json::array();
    for (const auto& [n, s] : r.dimension.s_lower_by_depth)
        d["s_lower_by_depth"].push_back(Json::array({n, round_value(s)}));
    d["s_exact"] = r.dimension.s_exact ? Json(round_value(*r.dimension.s_exact)) : Json(nullptr);
    d["s_exact_tolerance"] = r.dimension.s_exact_tolerance;
    d["d_v_upper"] =
        r.dimension.d_v_upper ? Json(round_value(*r.dimension.d_v_upper)) : Json(nullptr);
    d["s_best"] = round_value(r.dimension.s_best);
    d["gamma_empty"] = r.dimension.gamma_empty;
    d["verdict"] = verdict_name(r.dimension.verdict);
    d["osc"] = {{"status", osc_status_name(r.dimension.osc.status)},
                {"overlaps_found", r.dimension.osc.overlap_count},
                {"automaton_closed", r.dimension.osc.automaton_closed},
                {"search_depth", r.dimension.osc.search_depth},
                {"conclusion", r.dimension.osc.conclusion}};
    j["dimension"] = d;

    if (r.include_timings) {
        Json t;
        for (const auto& [name, sec] : r.timings) t[name] = sec;
        j["timings"] = t;
    }
    return j;
}

inline std::string emit_json(const AnalysisReport& r) { return report_to_json(r).dump(2) + "\n"; }

inline std::string emit_csv_counts(const AnalysisReport& r) {
    std::string out = "k,S,T,pruned,N_dedup_one,N_prune_all\n";
    for (const auto& l : r.levels) {
        out += std::to_string(l.k) + "," + std::to_string(l.s) + "," + std::to_string(l.t) + "," +
               std::to_string(l.pruned) + "," + l.cover_dedup_one.str() + "," +
               l.cover_prune_all.str() + "\n";
    }
    return out;
}

inline std::string emit_markdown(const AnalysisReport& r) {
    using detail::fmt5;
    std::string md;
    md += "# Univoque-set dimension report\n\n";
    md += "- status: " + r.status + "\n";
    md += "- invariant box: " + r.box_lo + " .. " + r.box_hi +
          (r.box_suggested ? " (auto-suggested)" : " (from config)") + "\n";
    for (const auto& w : r.warnings) md += "- warning: " + w + "\n";
    md += "\n## Level counts\n\n";
    md += "| k | S | T | pruned | N (dedup-one) | N (prune-all) |\n";
    md += "|---|---|---|--------|---------------|---------------|\n";
    for (const auto& l : r.levels)
        md += "| " + std::to_string(l.k) + " | " + std::to_string(l.s) + " | " +
              std::to_string(l.t) + " | " + std::to_string(l.pruned) + " | " +
              l.cover_dedup_one.str() + " | " + l.cover_prune_all.str() + " |\n";

    md += "\n## Exact overlaps (search depth " + std::to_string(r.overlap_search_depth) + ")\n\n";
    if (r.overlaps.empty()) {
        md += "none found\n";
    } else {
        for (const auto& [u, v] : r.overlaps) md += "- f_" + u + " = f_" + v + "\n";
    }

    md += "\n## Neighbor-type automaton\n\n";
    if (r.automaton.closed) {
        md += "closed at level " + std::to_string(r.automaton.closure_level) + " with " +
              std::to_string(r.automaton.types) + " recurring types (base depth " +
              std::to_string(r.automaton.base_depth) + ")\n";
        if (!r.automaton.matrix.empty()) {
            md += "\ntransfer matrix rows:\n\n";
            for (const auto& row : r.automaton.matrix) {
                md += "|";
                for (long long x : row) md += " " + std::to_string(x) + " |";
                md += "\n";
            }
            md += "\nemission:";
            for (long long e : r.automaton.emission) md += " " + std::to_string(e);
            md += "\n";
        }
        if (r.automaton.spectral)
            md += "spectral radius in [" + fmt5(round_lower(r.automaton.spectral->lower)) + ", " +
                  fmt5(round_upper(r.automaton.spectral->upper)) + "]\n";
    } else {
        md += "not closed (" + (r.automaton.status.empty() ? "no closure" : r.automaton.status) +
              ")\n";
    }

    md += "\n## Dimension\n\n";
    md += "- similarity dimension: " + fmt5(round_value(r.dimension.similarity_dim)) + "\n";
    if (!r.dimension.s_lower_by_depth.empty())
        md += "- truncated lower bounds s_N up to N = " +
              std::to_string(r.dimension.s_lower_by_depth.back().first) + ": last " +
              fmt5(round_value(r.dimension.s_lower_by_depth.back().second)) + "\n";
    md += "- s exact: " +
          (r.dimension.s_exact ? fmt5(round_value(*r.dimension.s_exact)) : std::string("n/a")) +
          "\n";
    md += "- covering upper bound d_V: " +
          (r.dimension.d_v_upper ? fmt5(round_value(*r.dimension.d_v_upper)) : std::string("n/a")) +
          "\n";
    md += "- verdict: " + verdict_name(r.dimension.verdict) + "\n";
    md += "- open set condition: " + osc_status_name(r.dimension.osc.status) + " (" +
          r.dimension.osc.conclusion + ")\n";
    if (r.include_timings) {
        md += "\n## Timings\n\n";
        for (const auto& [name, sec] : r.timings) md += "- " + name + ": " + fmt5(sec) + " s\n";
    }
    return md;
}

enum class ReportFormat { JsonFormat, Markdown, CsvCounts };

inline std::string emit_report(const AnalysisReport& r, ReportFormat format) {
    switch (format) {
        case ReportFormat::JsonFormat: return emit_json(r);
        case ReportFormat::Markdown: return emit_markdown(r);
        case ReportFormat::CsvCounts: return emit_csv_counts(r);
    }
    throw Error("unknown report format");
}

}  // namespace univoque
