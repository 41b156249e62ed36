#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>

#include "fixtures.hpp"
#include "univoque/analysis.hpp"
#include "univoque/cache.hpp"

using namespace univoque;

namespace {

struct TempPath {
    std::string path;
    explicit TempPath(const std::string& name) : path("/tmp/univoque-test-" + name) {
        std::remove(path.c_str());
        std::remove((path + ".lock").c_str());
    }
    ~TempPath() {
        std::remove(path.c_str());
        std::remove((path + ".lock").c_str());
    }
};

}  // namespace

TEST_CASE("cache round-trip reproduces the enumeration exactly") {
    TempPath tmp("roundtrip");
    IFS s = fixtures::ex4();
    Box m = fixtures::interval("0", "1");
    const std::string hash = "feedc0de";

    GammaTruncation direct = enumerate_levels(s, m, 8);
    GammaTruncation first = enumerate_with_cache(s, m, 5, {}, tmp.path, hash);
    REQUIRE(first.levels.size() == 5);

    bool resumed = false;
    GammaTruncation second = enumerate_with_cache(s, m, 8, {}, tmp.path, hash, &resumed);
    CHECK(resumed);
    REQUIRE(second.levels.size() == direct.levels.size());
    for (std::size_t k = 0; k < direct.levels.size(); ++k) {
        CHECK(second.levels[k].S == direct.levels[k].S);
        CHECK(second.levels[k].T == direct.levels[k].T);
        CHECK(second.levels[k].pruned == direct.levels[k].pruned);
        REQUIRE(second.levels[k].frontier.size() == direct.levels[k].frontier.size());
        for (std::size_t i = 0; i < direct.levels[k].frontier.size(); ++i) {
            CHECK(second.levels[k].frontier[i].word == direct.levels[k].frontier[i].word);
            CHECK(second.levels[k].frontier[i].multiplicity ==
                  direct.levels[k].frontier[i].multiplicity);
        }
        CHECK(second.levels[k].active == direct.levels[k].active);
    }
    REQUIRE(second.gamma_words.size() == direct.gamma_words.size());
    for (std::size_t i = 0; i < direct.gamma_words.size(); ++i)
        CHECK(second.gamma_words[i].word == direct.gamma_words[i].word);
}

TEST_CASE("a cache keyed to a different config is ignored") {
    TempPath tmp("mismatch");
    IFS s = fixtures::ex4();
    Box m = fixtures::interval("0", "1");
    enumerate_with_cache(s, m, 4, {}, tmp.path, "aaaa");
    bool resumed = true;
    enumerate_with_cache(s, m, 4, {}, tmp.path, "bbbb", &resumed);
    CHECK_FALSE(resumed);
}

TEST_CASE("a torn cache tail falls back to recomputation") {
    TempPath tmp("torn");
    IFS s = fixtures::ex4();
    Box m = fixtures::interval("0", "1");
    enumerate_with_cache(s, m, 6, {}, tmp.path, "cafe");
    {
        std::ofstream out(tmp.path, std::ios::app);
        out << "{\"k\": garbage\n";
    }
    bool resumed = false;
    GammaTruncation t = enumerate_with_cache(s, m, 8, {}, tmp.path, "cafe", &resumed);
    CHECK(resumed);
    GammaTruncation direct = enumerate_levels(s, m, 8);
    REQUIRE(t.levels.size() == direct.levels.size());
    for (std::size_t k = 0; k < direct.levels.size(); ++k)
        CHECK(t.levels[k].S == direct.levels[k].S);
}

TEST_CASE("the lock is exclusive and cleaned up") {
    TempPath tmp("lock");
    {
        CacheLock lock(tmp.path);
        CHECK_THROWS_AS(CacheLock(tmp.path), BudgetError);
    }
    CHECK_NOTHROW(CacheLock(tmp.path));  // released after scope exit
}

TEST_CASE("run_analysis with a cache file is identical to a cold run") {
    TempPath tmp("analysis");
    AnalysisConfig cfg = *builtin_config("ex4");
    cfg.depth = 8;
    AnalysisReport cold = run_analysis(cfg);
    AnalysisOptions with_cache;
    with_cache.cache_file = tmp.path;
    AnalysisReport warm1 = run_analysis(cfg, with_cache);
    AnalysisReport warm2 = run_analysis(cfg, with_cache);  // replays the cache
    CHECK(emit_json(cold) == emit_json(warm1));
    CHECK(emit_json(cold) == emit_json(warm2));

    // Deepening an existing cache extends it.
    cfg.depth = 10;
    AnalysisReport deep = run_analysis(cfg, with_cache);
    CHECK(deep.levels.size() == 10);
    CHECK(emit_json(deep) == emit_json(run_analysis(cfg)));
}
