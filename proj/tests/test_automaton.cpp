#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "random_systems.hpp"
#include "univoque/automaton.hpp"

using namespace univoque;
using fixtures::interval;

namespace {

const IntMatrix kPublishedMatrix = {
    {Int(0), Int(1), Int(0), Int(0), Int(1)},
    {Int(0), Int(1), Int(0), Int(1), Int(1)},
    {Int(1), Int(0), Int(1), Int(0), Int(0)},
    {Int(1), Int(0), Int(1), Int(0), Int(0)},
    {Int(0), Int(1), Int(0), Int(1), Int(0)},
};

TypeAutomaton quarter_automaton() {
    return build_automaton(fixtures::ex4(), interval("0", "1"), 12);
}

}  // namespace

TEST_CASE("fingerprints of the quarter system at level 1 and 2") {
    IFS s = fixtures::ex4();
    Box m = interval("0", "1");
    Level l1 = initial_level(s, m);
    NeighborType t2 = fingerprint(s, m, l1, Word::of("2"));
    NeighborType t3 = fingerprint(s, m, l1, Word::of("3"));
    CHECK_FALSE(t2 == t3);
    REQUIRE(t2.fingerprint.size() == 1);
    CHECK(t2.fingerprint[0].trans == Point({make_rational(15, 17)}));
    CHECK(t3.fingerprint[0].trans == Point({make_rational(-15, 17)}));

    Level l2 = next_level(s, m, l1);
    // The type of f_2(M) recurs at f_32(M).
    CHECK(fingerprint(s, m, l2, Word::of("32")) == t2);
    // f_22(M) is a genuinely new label: its island extends past its direct neighbor.
    NeighborType t4 = fingerprint(s, m, l2, Word::of("22"));
    CHECK_FALSE(t4 == t2);
    REQUIRE(t4.fingerprint.size() == 2);

    CHECK_THROWS_AS(fingerprint(s, m, l1, Word::of("1")), Error);  // S word, not frontier
}

TEST_CASE("an isolated twin pair has an empty fingerprint") {
    // f_1 = f_2 exactly; their shared cell is isolated from f_3.
    IFS s(1, {fixtures::sim1("1/4", "0"), fixtures::sim1("1/4", "0"), fixtures::sim1("1/4", "3/4")});
    Box m = interval("0", "1");
    Level l1 = initial_level(s, m);
    CHECK(l1.s_count() == 1);  // only "3" survives the isolation test as a word
    REQUIRE(l1.frontier.size() == 1);
    CHECK(l1.frontier[0].multiplicity == 2);
    NeighborType t = fingerprint(s, m, l1, l1.frontier[0].word);
    CHECK(t.fingerprint.empty());
}

TEST_CASE("quarter system: closed automaton matches the published matrix") {
    TypeAutomaton aut = quarter_automaton();
    REQUIRE(aut.closed);
    CHECK(aut.type_count() == 5);
    CHECK(aut.closure_level == 3);
    CHECK(aut.base_depth == 2);
    CHECK(aut.base_counts == IntVector(5, Int(1)));
    CHECK(aut.preperiodic_S == std::vector<Int>{Int(1), Int(1)});

    CHECK(aut.A == kPublishedMatrix);  // discovery order happens to match
    CHECK(matrix_equal_up_to_permutation(aut.A, kPublishedMatrix));

    int nonzero = 0;
    for (const auto& e : aut.emission) {
        if (e != 0) {
            ++nonzero;
            CHECK(e == Int(1));
        }
    }
    CHECK(nonzero == 2);

    // Column sums + emission + pruned children account for every symbol.
    for (std::size_t t = 0; t < aut.type_count(); ++t) {
        Int sum = aut.emission[t] + aut.pruned_children[t];
        for (std::size_t r = 0; r < aut.type_count(); ++r) sum += aut.A[r][t];
        CHECK(sum == Int(3));
    }
}

TEST_CASE("quarter system: exact counts from the matrix recursion") {
    TypeAutomaton aut = quarter_automaton();
    auto c2 = automaton_counts(aut, 2);
    CHECK(c2.type_vector == IntVector(5, Int(1)));
    CHECK(c2.s_count == Int(2));

    auto c3 = automaton_counts(aut, 3);
    CHECK(c3.type_vector == IntVector{Int(2), Int(3), Int(2), Int(2), Int(2)});

    CHECK(automaton_counts(aut, 5).s_count == Int(21));

    CHECK(automaton_s_count(aut, 1) == Int(1));
    CHECK(automaton_s_count(aut, 2) == Int(1));
    CHECK(automaton_s_count(aut, 6) == Int(21));

    CHECK_THROWS_AS(automaton_counts(aut, 1), Error);
}

TEST_CASE("rho-system automaton closes and reproduces |S_k| = k-1") {
    IFS s = fixtures::ex1();
    Box m = interval("0", "3/2");
    TypeAutomaton aut = build_automaton(s, m, 12);
    REQUIRE(aut.closed);

    GammaTruncation t = enumerate_levels(s, m, 12);
    for (int k = 1; k <= 12; ++k)
        CHECK(automaton_s_count(aut, k) == Int(t.levels[k - 1].s_count()));
    for (int k = 3; k <= 12; ++k) CHECK(automaton_s_count(aut, k) == Int(k - 1));
}

TEST_CASE("five-map planar system automaton closes and matches enumeration") {
    IFS s = fixtures::ex2();
    Box m = fixtures::square("0", "1");
    TypeAutomaton aut = build_automaton(s, m, 10);
    REQUIRE(aut.closed);
    GammaTruncation t = enumerate_levels(s, m, 10);
    for (int k = 1; k <= 10; ++k)
        CHECK(automaton_s_count(aut, k) == Int(t.levels[k - 1].s_count()));
    CHECK(automaton_s_count(aut, 1) == Int(3));
    for (int k = 2; k <= 10; ++k) CHECK(automaton_s_count(aut, k) == Int(3 * k - 1));
}

TEST_CASE("pairwise-disjoint system yields the empty automaton") {
    TypeAutomaton aut = build_automaton(fixtures::cantor_pair(), interval("0", "1"), 4);
    REQUIRE(aut.closed);
    CHECK(aut.type_count() == 0);
    CHECK(aut.preperiodic_S == std::vector<Int>{Int(2)});
    CHECK(automaton_s_count(aut, 3) == Int(0));
    SpectralBounds g = survivor_growth(aut);
    CHECK(g.lower == 0.0);
    CHECK(g.upper == 0.0);
}

TEST_CASE("spectral bounds: published matrix") {
    SpectralBounds b = spectral_bounds(kPublishedMatrix, {}, 60, 1e-3);
    CHECK(b.width() <= 1e-3);
    CHECK(b.contains(2.2775));

    // The Perron value is the positive root of x^4 - 2x^3 - x - 1: the
    // certified bracket must straddle its sign change.
    auto quartic = [](double x) { return ((x - 2) * x * x - 1) * x - 1; };
    CHECK(quartic(b.lower) <= 0.0);
    CHECK(quartic(b.upper) >= 0.0);

    // A tight run pins the value near 2.27745 (2.2775 is its loose rounding).
    SpectralBounds tight = spectral_bounds(kPublishedMatrix, {}, 200, 1e-9);
    CHECK(tight.width() <= 1e-9);
    CHECK(tight.lower > 2.2774);
    CHECK(tight.upper < 2.2775);
}

TEST_CASE("spectral bounds: small exact cases") {
    IntMatrix two = {{Int(2)}};
    SpectralBounds b2 = spectral_bounds(two, {}, 10, 0.0);
    CHECK(b2.lower == 2.0);
    CHECK(b2.upper == 2.0);

    IntMatrix id2 = {{Int(1), Int(0)}, {Int(0), Int(1)}};
    SpectralBounds bi = spectral_bounds(id2, {}, 10, 0.0);
    CHECK(bi.lower == 1.0);
    CHECK(bi.upper == 1.0);

    IntMatrix zero = {{Int(0), Int(0)}, {Int(0), Int(0)}};
    SpectralBounds bz = spectral_bounds(zero, {}, 10, 0.0);
    CHECK(bz.lower == 0.0);
    CHECK(bz.upper == 0.0);

    // Nilpotent: spectral radius 0, handled through the A+I positivity shift.
    IntMatrix nil = {{Int(0), Int(1)}, {Int(0), Int(0)}};
    SpectralBounds bn = spectral_bounds(nil, {}, 64, 1e-2);
    CHECK(bn.lower == 0.0);
    CHECK(bn.upper <= 1.0);
}

TEST_CASE("collatz-wielandt sandwich narrows monotonically") {
    double last_width = std::numeric_limits<double>::infinity();
    for (int iters = 1; iters <= 40; ++iters) {
        SpectralBounds b = spectral_bounds(kPublishedMatrix, {}, iters, 0.0);
        CHECK(b.lower <= b.upper);
        CHECK(b.width() <= last_width);
        last_width = b.width();
    }
}

TEST_CASE("permutation invariance of spectral bounds") {
    const std::size_t n = 5;
    IntMatrix p(n, IntVector(n, Int(0)));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) p[n - 1 - r][n - 1 - c] = kPublishedMatrix[r][c];
    CHECK(matrix_equal_up_to_permutation(kPublishedMatrix, p));

    SpectralBounds a = spectral_bounds(kPublishedMatrix, {}, 60, 1e-6);
    SpectralBounds b = spectral_bounds(p, {}, 60, 1e-6);
    CHECK(a.lower == b.lower);
    CHECK(a.upper == b.upper);
}

TEST_CASE("survivor growth of the rho-system frontier is linear") {
    // |T_k| = k + 1 for this system: the certified growth bracket sits at 1,
    // which the enumerated retained counts confirm.
    IFS s = fixtures::ex1();
    Box m = interval("0", "3/2");
    TypeAutomaton aut = build_automaton(s, m, 12);
    REQUIRE(aut.closed);

    GammaTruncation t = enumerate_levels(s, m, 12);
    for (int k = 1; k <= 12; ++k) CHECK(t.levels[k - 1].t_count() == std::size_t(k) + 1);

    SpectralBounds g = survivor_growth(aut, 256, 1e-2);
    CHECK(g.contains(1.0));
    CHECK(g.upper < 1.1);
}

TEST_CASE("survivor growth of the quarter system matches the Perron bracket") {
    TypeAutomaton aut = quarter_automaton();
    SpectralBounds g = survivor_growth(aut);
    CHECK(g.width() <= 1e-3);
    CHECK(g.contains(2.2775));

    // Retained counts from the matrix equal the enumerated |T_k| exactly.
    GammaTruncation t = enumerate_levels(fixtures::ex4(), interval("0", "1"), 12);
    for (int k = aut.base_depth; k <= 12; ++k) {
        IntVector v = automaton_counts(aut, k).type_vector;
        Int sum(0);
        for (const auto& x : v) sum += x;
        CHECK(sum == Int(t.levels[k - 1].t_count()));
    }
}

TEST_CASE("survivor_growth refuses an unclosed automaton") {
    // Depth 2 is too shallow for the quarter system to close.
    TypeAutomaton aut = build_automaton(fixtures::ex4(), interval("0", "1"), 2);
    REQUIRE_FALSE(aut.closed);
    CHECK_THROWS_AS(survivor_growth(aut), Error);
    CHECK_THROWS_AS(automaton_counts(aut, 3), Error);
}

TEST_CASE("oracle equivalence on randomized systems that close early") {
    std::mt19937_64 rng(20260809);
    int found = 0, attempts = 0;
    while (found < 20 && attempts < 400) {
        ++attempts;
        auto [s, m] = random_systems::generate(rng);
        TypeAutomaton aut;
        try {
            aut = build_automaton(s, m, 6, {.frontier_budget = 50'000, .max_types = 128});
        } catch (const Error&) {
            continue;
        }
        if (!aut.closed) continue;
        ++found;

        auto ref = oracle::enumerate_sdef(s, m, 8);
        GammaTruncation pruned = enumerate_levels(s, m, 8);
        GammaTruncation full = enumerate_levels(s, m, 8, {.prune = false});
        for (std::size_t k = 0; k < ref.S.size(); ++k) {
            CHECK(automaton_s_count(aut, int(k) + 1) == Int(ref.S[k].size()));
            if (k < pruned.levels.size()) CHECK(pruned.levels[k].s_count() == ref.S[k].size());
            if (k < full.levels.size()) CHECK(full.levels[k].s_count() == ref.S[k].size());
        }
    }
    INFO("closed systems found: " << found << " in " << attempts << " attempts");
    CHECK(found == 20);
}

TEST_CASE("type consistency: equal fingerprints expand identically") {
    // build_automaton verifies every re-expansion against the recorded profile
    // and refuses to close on a mismatch, so deep builds of the worked systems
    // double as consistency checks at every level they visit.
    for (int depth : {6, 9, 12}) {
        CHECK(build_automaton(fixtures::ex4(), interval("0", "1"), depth).closed);
        CHECK(build_automaton(fixtures::ex1(), interval("0", "3/2"), depth).closed);
    }
}
