// Command-line front end: analyze a configured system, re-verify the built-in
// worked examples, or dump overlaps / Gamma truncations.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "univoque/analysis.hpp"

namespace {

using namespace univoque;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw Error("cannot write output file '" + path + "'");
    out << text;
}

int run(int argc, char** argv) {
    CLI::App app{"Certified Hausdorff-dimension bounds for univoque sets of "
                 "self-similar systems"};
    app.require_subcommand(1);

    // analyze
    std::string config_path, format = "json", cache_path, output_path;
    int depth_override = -1;
    bool no_prune = false, timings = false;
    auto* analyze = app.add_subcommand("analyze", "run the full pipeline on a config");
    analyze->add_option("config", config_path, "JSON configuration file")->required();
    analyze->add_option("--depth", depth_override, "override the config depth");
    analyze->add_option("--format", format, "json | markdown | csv-counts")
        ->check(CLI::IsMember({"json", "markdown", "csv-counts"}));
    analyze->add_option("--cache", cache_path, "level cache file (resumable)");
    analyze->add_flag("--no-prune", no_prune, "expand twin words literally");
    analyze->add_flag("--timings", timings, "include stage timings in the report");
    analyze->add_option("-o,--output", output_path, "write the report to a file");

    // verify-paper
    std::string verify_name;
    auto* verify = app.add_subcommand("verify-paper", "check a built-in worked example");
    verify->add_option("name", verify_name, "ex1 | ex2 | ex4")->required();

    // overlaps
    std::string overlaps_config;
    int overlaps_depth = 6;
    auto* overlaps_cmd = app.add_subcommand("overlaps", "search exact overlaps");
    overlaps_cmd->add_option("config", overlaps_config, "JSON configuration file")->required();
    overlaps_cmd->add_option("--depth", overlaps_depth, "word length bound");

    // gamma
    std::string gamma_config;
    int gamma_depth = -1;
    auto* gamma_cmd = app.add_subcommand("gamma", "enumerate the Gamma truncation");
    gamma_cmd->add_option("config", gamma_config, "JSON configuration file")->required();
    gamma_cmd->add_option("--depth", gamma_depth, "levels to enumerate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (analyze->parsed()) {
        AnalysisConfig cfg = parse_config(read_file(config_path));
        if (depth_override > 0) cfg.depth = depth_override;
        if (no_prune) cfg.prune_twins = false;
        AnalysisOptions opts;
        opts.include_timings = timings;
        if (!cache_path.empty()) opts.cache_file = cache_path;
        AnalysisReport rep = run_analysis(cfg, opts);
        for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
        ReportFormat f = format == "json"       ? ReportFormat::JsonFormat
                         : format == "markdown" ? ReportFormat::Markdown
                                                : ReportFormat::CsvCounts;
        write_output(emit_report(rep, f), output_path);
        return 0;
    }

    if (verify->parsed()) {
        VerificationResult res = verify_builtin(verify_name);
        std::cout << "verification: " << res.name << "\n";
        for (const auto& line : res.lines) {
            std::cout << "  [" << (line.passed ? "PASS" : "FAIL") << "] " << line.label;
            if (!line.detail.empty()) std::cout << "  (" << line.detail << ")";
            std::cout << "\n";
        }
        std::cout << (res.passed ? "all checks passed" : "SOME CHECKS FAILED") << "\n";
        return res.passed ? 0 : 1;
    }

    if (overlaps_cmd->parsed()) {
        AnalysisConfig cfg = parse_config(read_file(overlaps_config));
        OverlapSearchResult res = detect_overlaps(cfg.ifs(), overlaps_depth);
        if (res.truncated)
            std::cerr << "warning: search truncated at depth " << res.searched_depth << "\n";
        for (const auto& p : res.pairs)
            std::cout << "f_" << p.u.str() << " = f_" << p.v.str() << "\n";
        std::cout << res.pairs.size() << " primitive overlap(s) up to depth "
                  << res.searched_depth << "\n";
        return 0;
    }

    // gamma
    AnalysisConfig cfg = parse_config(read_file(gamma_config));
    if (gamma_depth > 0) cfg.depth = gamma_depth;
    IFS ifs = cfg.ifs();
    Box m = [&] {
        if (cfg.invariant_box) return *cfg.invariant_box;
        try {
            return suggest_invariant_box(ifs);
        } catch (const Error& e) {
            throw InvariantBoxError(e.what());
        }
    }();
    if (!validate_invariant_box(ifs, m))
        throw InvariantBoxError("box is not invariant under the system");
    GammaTruncation t =
        enumerate_levels(ifs, m, cfg.depth, {cfg.prune_twins, cfg.frontier_budget});
    if (t.truncated_by_budget)
        std::cerr << "warning: frontier budget exceeded at depth " << t.levels.size() << "\n";
    std::cout << "k |S_k| |T_k| |pruned_k|  S words\n";
    for (const auto& lvl : t.levels) {
        std::cout << lvl.depth << " " << lvl.s_count() << " " << lvl.t_count() << " "
                  << lvl.pruned_count() << " ";
        for (const auto& [w, f] : lvl.S) std::cout << " " << w.str();
        std::cout << "\n";
    }
    std::cout << "gamma words up to depth " << t.levels.size() << ": " << t.gamma_words.size()
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const univoque::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const univoque::InvariantBoxError& e) {
        std::cerr << "error: invariant box: " << e.what() << "\n";
        return 3;
    } catch (const univoque::BudgetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
