#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "univoque/gamma.hpp"

namespace univoque {

// ---------------------------------------------------------------------------
// Finite-type detection.
//
// A frontier word is typed by the *island* it lives in: the connected
// component of the level's intersection graph, described by the exact
// relative maps g_u^{-1} o g_v of all other members v. Two words with equal
// island patterns see congruent geometry forever, because a child's island is
// always contained in the children of its parent's island. Twin cells join
// islands (their boxes keep constraining everyone) but are never typed
// themselves: their descendants can never contribute to Gamma.
// ---------------------------------------------------------------------------

/// Canonical island fingerprint of a frontier word.
struct NeighborType {
    std::vector<Similitude> fingerprint;  // sorted, one relative map per island co-member
    Word representative;                  // first word observed with this fingerprint

    friend bool operator==(const NeighborType& a, const NeighborType& b) {
        return a.fingerprint == b.fingerprint;
    }
};

using IntMatrix = std::vector<std::vector<Int>>;
using IntVector = std::vector<Int>;

struct TypeAutomaton {
    std::vector<NeighborType> types;  // index = type id, in order of first sighting
    IntMatrix A;                      // A[child][parent] = T-children of type `child` per parent
    IntVector emission;               // S-children per type
    IntVector pruned_children;        // children absorbed into twin cells, per type
    IntVector base_counts;            // type multiplicities at base_depth
    int base_depth = 0;               // first level whose type set equals the recurrent set
    std::vector<Int> preperiodic_S;   // |S_1| .. |S_{base_depth}|
    bool closed = false;
    int closure_level = 0;
    int levels_built = 0;
    std::string status;               // diagnostics when not closed

    std::size_t type_count() const { return types.size(); }
};

namespace detail {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

inline std::vector<std::vector<int>> islands_of(const Level& lvl) {
    const int n = static_cast<int>(lvl.frontier.size());
    UnionFind uf(n);
    for (int i = 0; i < n; ++i)
        for (int j : lvl.adjacency[i]) uf.unite(i, j);
    std::map<int, std::vector<int>> groups;
    for (int i = 0; i < n; ++i) groups[uf.find(i)].push_back(i);
    std::vector<std::vector<int>> out;
    out.reserve(groups.size());
    for (auto& [root, members] : groups) out.push_back(std::move(members));
    return out;
}

inline std::vector<Similitude> island_fingerprint(const Level& lvl,
                                                  const std::vector<int>& island, int self) {
    std::vector<Similitude> fp;
    fp.reserve(island.size() - 1);
    for (int j : island)
        if (j != self) fp.push_back(relative_map(lvl.frontier[self].map, lvl.frontier[j].map));
    std::sort(fp.begin(), fp.end());
    return fp;
}

}  // namespace detail

/// Fingerprint of one frontier word of a level (the public, single-word view).
inline NeighborType fingerprint(const IFS&, const Box&, const Level& lvl, const Word& w) {
    for (std::size_t i = 0; i < lvl.frontier.size(); ++i) {
        if (lvl.frontier[i].word == w) {
            auto islands = detail::islands_of(lvl);
            for (const auto& isl : islands)
                if (std::find(isl.begin(), isl.end(), int(i)) != isl.end())
                    return {detail::island_fingerprint(lvl, isl, int(i)), w};
        }
    }
    throw Error("fingerprint: word " + w.str() + " is not in the frontier");
}

struct BuildOptions {
    std::size_t frontier_budget = 1'000'000;
    std::size_t max_types = 4096;          // systems past this are not finite type in practice
    std::size_t fingerprint_budget = 20'000'000;  // total relative-map computations
};

/// Grows levels, types retained frontier cells, and closes when a full level
/// introduces no new type and every known type's expansion has been recorded.
inline TypeAutomaton build_automaton(const IFS& ifs, const Box& m, int max_depth,
                                     BuildOptions opts = {}) {
    if (max_depth < 2) throw Error("build_automaton: max_depth must be >= 2");
    TypeAutomaton aut;

    struct Profile {
        bool recorded = false;
        std::vector<int> t_children;  // sorted type ids
        Int s_children{0};
        Int pruned{0};
    };
    std::vector<Profile> profiles;
    std::vector<IntVector> level_type_counts;  // per level: count per type id
    std::vector<Int> level_s_counts;
    std::map<std::vector<Similitude>, int> type_ids;

    Level prev;
    std::vector<int> prev_cell_type;  // type id per prev frontier cell, -1 for twins
    bool have_prev = false;
    std::size_t fingerprint_work = 0;

    auto type_level = [&](const Level& lvl) -> std::optional<std::vector<int>> {
        auto islands = detail::islands_of(lvl);
        std::vector<int> cell_type(lvl.frontier.size(), -1);
        for (const auto& isl : islands) {
            for (int i : isl) {
                if (lvl.frontier[i].multiplicity > 1) continue;  // twins are not typed
                fingerprint_work += isl.size();
                if (fingerprint_work > opts.fingerprint_budget ||
                    aut.types.size() > opts.max_types)
                    return std::nullopt;
                auto fp = detail::island_fingerprint(lvl, isl, i);
                auto it = type_ids.find(fp);
                if (it == type_ids.end()) {
                    it = type_ids.emplace(fp, int(aut.types.size())).first;
                    aut.types.push_back({fp, lvl.frontier[i].word});
                    profiles.emplace_back();
                }
                cell_type[i] = it->second;
            }
        }
        return cell_type;
    };

    for (int k = 1; k <= max_depth; ++k) {
        const std::size_t parents = have_prev ? prev.active.size() : 1;
        if (parents * ifs.alphabet_size() > opts.frontier_budget) {
            aut.status = "frontier budget exhausted at level " + std::to_string(k);
            break;
        }
        Level lvl = have_prev ? next_level(ifs, m, prev) : initial_level(ifs, m);
        aut.levels_built = k;
        level_s_counts.push_back(Int(lvl.s_count()));

        const std::size_t known_before = aut.types.size();
        auto typed = type_level(lvl);
        if (!typed) {
            aut.status = "typing budget exhausted at level " + std::to_string(k);
            aut.closed = false;
            return aut;
        }
        std::vector<int> cell_type = std::move(*typed);

        // Record/verify the expansion profile of every retained parent.
        if (have_prev) {
            for (std::size_t p = 0; p < prev.frontier.size(); ++p) {
                if (prev_cell_type[p] < 0) continue;
                Profile obs;
                obs.recorded = true;
                for (const auto& out : lvl.child_outcomes[p]) {
                    switch (out.kind) {
                        case ChildKind::EnteredS: ++obs.s_children; break;
                        case ChildKind::Merged: ++obs.pruned; break;
                        case ChildKind::EnteredT: obs.t_children.push_back(cell_type[out.index]); break;
                    }
                }
                std::sort(obs.t_children.begin(), obs.t_children.end());
                Profile& ref = profiles[prev_cell_type[p]];
                if (!ref.recorded) {
                    ref = obs;
                } else if (ref.t_children != obs.t_children || ref.s_children != obs.s_children ||
                           ref.pruned != obs.pruned) {
                    aut.status = "type " + std::to_string(prev_cell_type[p]) +
                                 " expanded inconsistently at level " + std::to_string(k) +
                                 " (fingerprint collision)";
                    aut.closed = false;
                    return aut;
                }
            }
        }

        IntVector counts(aut.types.size(), Int(0));
        for (int t : cell_type)
            if (t >= 0) ++counts[t];
        level_type_counts.push_back(std::move(counts));

        const bool no_new_types = aut.types.size() == known_before;
        bool all_profiled = true;
        for (const auto& pr : profiles) all_profiled &= pr.recorded;
        if ((k >= 2 || lvl.frontier.empty()) && no_new_types && all_profiled) {
            aut.closed = true;
            aut.closure_level = k;
            prev = std::move(lvl);
            break;
        }
        if (lvl.frontier.empty()) {
            // Gamma complete; nothing left to expand, so every (zero) type is known.
            aut.closed = true;
            aut.closure_level = k;
            prev = std::move(lvl);
            break;
        }

        prev = std::move(lvl);
        prev_cell_type = std::move(cell_type);
        have_prev = true;
    }

    if (!aut.closed) {
        if (aut.status.empty())
            aut.status = "no closure within depth " + std::to_string(max_depth);
        return aut;
    }

    // Assemble matrix, emission and base data.
    const std::size_t n = aut.types.size();
    aut.A.assign(n, IntVector(n, Int(0)));
    aut.emission.assign(n, Int(0));
    aut.pruned_children.assign(n, Int(0));
    for (std::size_t t = 0; t < n; ++t) {
        for (int child : profiles[t].t_children) ++aut.A[child][t];
        aut.emission[t] = profiles[t].s_children;
        aut.pruned_children[t] = profiles[t].pruned;
    }

    // Pad earlier levels' count vectors to the final type count.
    for (auto& v : level_type_counts) v.resize(n, Int(0));
    const IntVector& closure_counts = level_type_counts[aut.closure_level - 1];
    auto type_set = [](const IntVector& v) {
        std::vector<bool> s(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) s[i] = v[i] > 0;
        return s;
    };
    int k0 = aut.closure_level;
    for (int k = 1; k <= aut.closure_level; ++k) {
        if (type_set(level_type_counts[k - 1]) == type_set(closure_counts)) {
            k0 = k;
            break;
        }
    }
    aut.base_depth = k0;
    aut.base_counts = level_type_counts[k0 - 1];
    aut.preperiodic_S.assign(level_s_counts.begin(), level_s_counts.begin() + k0);
    return aut;
}

/// type_vector at level n and |S_{n+1}| = emission . type_vector, exact.
struct CountResult {
    Int s_count;       // |S_{n+1}|
    IntVector type_vector;
};

inline CountResult automaton_counts(const TypeAutomaton& aut, int n) {
    if (!aut.closed) throw Error("automaton_counts: automaton is not closed");
    if (n < aut.base_depth) throw Error("automaton_counts: n below base depth");
    IntVector v = aut.base_counts;
    for (int step = 0; step < n - aut.base_depth; ++step) {
        IntVector w(v.size(), Int(0));
        for (std::size_t r = 0; r < v.size(); ++r)
            for (std::size_t c = 0; c < v.size(); ++c)
                if (aut.A[r][c] != 0 && v[c] != 0) w[r] += aut.A[r][c] * v[c];
        v = std::move(w);
    }
    Int s(0);
    for (std::size_t i = 0; i < v.size(); ++i) s += aut.emission[i] * v[i];
    return {s, v};
}

/// |S_k| for any k >= 1, combining the stored preperiodic counts with the
/// matrix recursion.
inline Int automaton_s_count(const TypeAutomaton& aut, int k) {
    if (!aut.closed) throw Error("automaton_s_count: automaton is not closed");
    if (k < 1) throw Error("automaton_s_count: k must be >= 1");
    if (k <= aut.base_depth) return aut.preperiodic_S[k - 1];
    return automaton_counts(aut, k - 1).s_count;
}

struct SpectralBounds {
    double lower = 0.0;
    double upper = 0.0;
    int iterations = 0;

    double width() const { return upper - lower; }
    bool contains(double x) const { return lower <= x && x <= upper; }
};

/// Power iteration with exact integer vectors; every reported pair
/// (min_i (Av)_i/v_i, max_i (Av)_i/v_i) brackets the Perron value, and the
/// best bounds seen so far are returned (outward-rounded to double).
inline SpectralBounds spectral_bounds(const IntMatrix& a, IntVector v0, int max_iters,
                                      double target_width = 0.0) {
    SpectralBounds out;
    const std::size_t n = a.size();
    if (n == 0) return out;
    if (v0.empty()) v0.assign(n, Int(1));
    if (v0.size() != n) throw Error("spectral_bounds: bad start vector");
    for (const auto& x : v0)
        if (x <= 0) throw Error("spectral_bounds: start vector must be positive");

    bool zero_matrix = true;
    for (const auto& row : a)
        for (const auto& x : row) {
            if (x < 0) throw Error("spectral_bounds: matrix must be nonnegative");
            if (x > 0) zero_matrix = false;
        }
    if (zero_matrix) return out;

    Rational best_lo(0);
    std::optional<Rational> best_hi;
    IntVector v = std::move(v0);
    for (int it = 0; it < max_iters; ++it) {
        IntVector w(n, Int(0));
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c)
                if (a[r][c] != 0 && v[c] != 0) w[r] += a[r][c] * v[c];
        Rational lo, hi;
        for (std::size_t i = 0; i < n; ++i) {
            Rational q = make_rational(w[i], v[i]);
            if (i == 0 || q < lo) lo = q;
            if (i == 0 || q > hi) hi = q;
        }
        out.iterations = it + 1;
        if (lo > best_lo) best_lo = lo;
        if (!best_hi || hi < *best_hi) best_hi = hi;

        const double wd = to_ld(*best_hi) - to_ld(best_lo);
        if (wd <= target_width || best_lo == *best_hi) break;

        bool positive = true;
        for (const auto& x : w) positive &= x > 0;
        if (positive) {
            v = std::move(w);
        } else {
            // Shift to A + I: keeps the iterate strictly positive and the
            // Perron direction unchanged.
            for (std::size_t i = 0; i < n; ++i) w[i] += v[i];
            v = std::move(w);
        }
    }
    auto round_down = [](const Rational& r) {
        double d = r.convert_to<double>();
        while (Rational(d) > r) d = std::nextafter(d, -std::numeric_limits<double>::infinity());
        return d;
    };
    auto round_up = [](const Rational& r) {
        double d = r.convert_to<double>();
        while (Rational(d) < r) d = std::nextafter(d, std::numeric_limits<double>::infinity());
        return d;
    };
    out.lower = std::max(0.0, round_down(best_lo));
    out.upper = round_up(*best_hi);
    return out;
}

/// Certified bounds on the growth rate of the retained (prune-all) frontier:
/// the Perron value of A, since twin lineages never re-enter the counts.
inline SpectralBounds survivor_growth(const TypeAutomaton& aut, int max_iters = 256,
                                      double target_width = 1e-3) {
    if (!aut.closed)
        throw Error(
            "survivor_growth: automaton not closed; estimate growth from "
            "enumerated survivor counts instead");
    return spectral_bounds(aut.A, {}, max_iters, target_width);
}

/// True iff B equals A after applying one simultaneous row/column permutation.
inline bool matrix_equal_up_to_permutation(const IntMatrix& a, const IntMatrix& b) {
    if (a.size() != b.size()) return false;
    const std::size_t n = a.size();
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    do {
        bool ok = true;
        for (std::size_t r = 0; ok && r < n; ++r)
            for (std::size_t c = 0; ok && c < n; ++c) ok = a[r][c] == b[perm[r]][perm[c]];
        if (ok) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

}  // namespace univoque
