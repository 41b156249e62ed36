#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <unordered_map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "univoque/similitude.hpp"

namespace univoque {

// ---------------------------------------------------------------------------
// Level recursion.
//
// Words are grouped into *cells*: one cell per distinct composed map, with the
// number of words carrying that map kept as an exact multiplicity. Words whose
// map is shared (twins) leave the counted frontier at the level where the
// collision appears, but their cell keeps expanding so that its boxes keep
// constraining the disjointness tests of every later level. This is what makes
// pruning count-preserving: the geometry of a level depends only on the set of
// distinct maps, never on how many words carry each of them.
// ---------------------------------------------------------------------------

/// One distinct composed map at a level.
struct Cell {
    Word word;         // lexicographically least word carrying this map
    Similitude map;
    Int multiplicity;  // number of length-k words with this map (>= 2: twin cell)
};

enum class ChildKind { EnteredS, EnteredT, Merged };

struct ChildOutcome {
    ChildKind kind;
    int index;  // S index / frontier index of the (possibly merged) cell
};

struct Level {
    int depth = 0;
    std::vector<std::pair<Word, Similitude>> S;       // isolated words (exit to Gamma)
    std::vector<std::pair<Word, Similitude>> T;       // retained frontier words
    std::vector<std::pair<Word, Similitude>> pruned;  // words that became twins here

    std::vector<Cell> frontier;                    // all non-S cells, lex order
    std::vector<Box> frontier_boxes;               // images of M under frontier maps
    std::vector<std::vector<int>> adjacency;       // frontier intersection graph
    std::vector<int> active;                       // frontier cells expanded by the next level
    std::vector<std::vector<ChildOutcome>> child_outcomes;  // [parent][symbol-1]

    std::size_t s_count() const { return S.size(); }
    std::size_t t_count() const { return T.size(); }
    std::size_t pruned_count() const { return pruned.size(); }
};

/// Pairwise intersection graph of closed boxes (touching boxes intersect),
/// via a sweep along axis 0. Comparisons run on cached double approximations
/// and fall back to exact rationals only when the gap is inside the rounding
/// margin, so every decision equals the exact one.
inline std::vector<std::vector<int>> intersection_graph(const std::vector<Box>& boxes) {
    const int n = static_cast<int>(boxes.size());
    std::vector<std::vector<int>> adj(n);
    if (n == 0) return adj;
    const std::size_t d = boxes[0].dim();

    std::vector<double> alo(n * d), ahi(n * d);
    double maxabs = 1.0;
    for (int i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            alo[i * d + j] = boxes[i].lo[j].convert_to<double>();
            ahi[i * d + j] = boxes[i].hi[j].convert_to<double>();
            maxabs = std::max({maxabs, std::abs(alo[i * d + j]), std::abs(ahi[i * d + j])});
        }
    const double eps = 1e-9 * maxabs;
    auto exact_lt = [&](double xa, double xb, const Rational& ra, const Rational& rb) {
        if (xa + eps < xb) return true;
        if (xb + eps < xa) return false;
        return ra < rb;
    };

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (alo[a * d] + eps < alo[b * d]) return true;
        if (alo[b * d] + eps < alo[a * d]) return false;
        if (boxes[a].lo[0] != boxes[b].lo[0]) return boxes[a].lo[0] < boxes[b].lo[0];
        return a < b;
    });
    std::vector<int> active;
    for (int oi = 0; oi < n; ++oi) {
        const int i = order[oi];
        const Box& bi = boxes[i];
        std::erase_if(active, [&](int a) {
            return exact_lt(ahi[a * d], alo[i * d], boxes[a].hi[0], bi.lo[0]);
        });
        for (int a : active) {
            bool meet = true;
            for (std::size_t j = 1; meet && j < d; ++j)
                meet = !exact_lt(ahi[a * d + j], alo[i * d + j], boxes[a].hi[j], bi.lo[j]) &&
                       !exact_lt(ahi[i * d + j], alo[a * d + j], bi.hi[j], boxes[a].lo[j]);
            if (meet) {
                adj[i].push_back(a);
                adj[a].push_back(i);
            }
        }
        active.push_back(i);
    }
    for (auto& row : adj) std::sort(row.begin(), row.end());
    return adj;
}

namespace detail {

struct PendingCell {
    Int multiplicity{0};
    Word rep;                                         // lex-least contributing word
    std::vector<std::pair<Word, int>> word_children;  // children of retained parents: (word, parent)
    std::vector<std::pair<int, int>> contributions;   // (parent index, symbol)
};

struct SimilitudeHash {
    std::size_t operator()(const Similitude& s) const {
        std::size_t h = std::hash<Rational>{}(s.ratio);
        for (std::size_t j = 0; j < s.orth.perm.size(); ++j)
            h = h * 1099511628211ULL + (s.orth.perm[j] * 2 + (s.orth.signs[j] > 0 ? 1 : 0));
        for (const auto& c : s.trans.coords) h = h * 1099511628211ULL + std::hash<Rational>{}(c);
        return h;
    }
};

inline Level classify_children(const IFS& ifs, const Box& m,
                               const std::vector<Cell>& parents,
                               const std::vector<int>& active_parents, int next_depth,
                               bool prune) {
    const int msym = static_cast<int>(ifs.alphabet_size());

    // Expand and (in prune mode) merge equal maps.
    std::unordered_map<Similitude, PendingCell, SimilitudeHash> merged;
    merged.reserve(active_parents.size() * msym);
    std::vector<std::pair<Similitude, PendingCell>> flat;  // no-prune path keeps duplicates
    for (int p : active_parents) {
        for (int j = 1; j <= msym; ++j) {
            Similitude child_map = compose(parents[p].map, ifs.map(std::uint8_t(j)));
            Word child_word = parents[p].word.extended(std::uint8_t(j));
            const bool retained_parent = parents[p].multiplicity == 1;
            auto feed = [&](PendingCell& c) {
                c.multiplicity += parents[p].multiplicity;
                if (c.rep.symbols.empty() || child_word < c.rep) c.rep = child_word;
                if (retained_parent) c.word_children.emplace_back(child_word, p);
                c.contributions.emplace_back(p, j);
            };
            if (prune) {
                feed(merged[child_map]);
            } else {
                flat.emplace_back(child_map, PendingCell{});
                feed(flat.back().second);
            }
        }
    }

    struct Entry {
        Similitude map;
        PendingCell cell;
    };
    std::vector<Entry> entries;
    if (prune) {
        entries.reserve(merged.size());
        for (auto& [map, cell] : merged) entries.push_back({map, std::move(cell)});
    } else {
        entries.reserve(flat.size());
        for (auto& [map, cell] : flat) entries.push_back({map, std::move(cell)});
    }
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.cell.rep < b.cell.rep; });

    // Disjointness over every cell of the level at once.
    std::vector<Box> boxes;
    boxes.reserve(entries.size());
    for (const auto& e : entries) boxes.push_back(image_box(e.map, m));
    std::vector<std::vector<int>> adj = intersection_graph(boxes);

    Level lvl;
    lvl.depth = next_depth;
    lvl.child_outcomes.assign(parents.size(), std::vector<ChildOutcome>(msym));

    std::vector<int> frontier_index(entries.size(), -1);
    std::vector<ChildOutcome> entry_outcome(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        const bool isolated = adj[i].empty();
        const bool twin = e.cell.multiplicity > 1;
        if (!twin && isolated) {
            // Unique word whose image meets no other cell: it joins Gamma.
            entry_outcome[i] = {ChildKind::EnteredS, static_cast<int>(lvl.S.size())};
            lvl.S.emplace_back(e.cell.rep, e.map);
        } else {
            const int fi = static_cast<int>(lvl.frontier.size());
            frontier_index[i] = fi;
            lvl.frontier.push_back({e.cell.rep, e.map, e.cell.multiplicity});
            lvl.frontier_boxes.push_back(boxes[i]);
            if (!twin) {
                lvl.T.emplace_back(e.cell.rep, e.map);
                entry_outcome[i] = {ChildKind::EnteredT, fi};
            } else {
                entry_outcome[i] = {ChildKind::Merged, fi};
                for (const auto& wc : e.cell.word_children) lvl.pruned.emplace_back(wc.first, e.map);
            }
        }
    }
    std::sort(lvl.pruned.begin(), lvl.pruned.end());

    // Frontier adjacency, re-indexed (S cells have no edges by construction).
    lvl.adjacency.assign(lvl.frontier.size(), {});
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (frontier_index[i] < 0) continue;
        for (int nb : adj[i])
            if (frontier_index[nb] >= 0) lvl.adjacency[frontier_index[i]].push_back(frontier_index[nb]);
    }

    // A twin cell keeps constraining future levels only while its island
    // holds a retained cell; a component made of twins alone stays congruent
    // to itself forever and can never touch a retained lineage again, so it
    // is not expanded.
    {
        const int n = static_cast<int>(lvl.frontier.size());
        std::vector<int> comp(n);
        for (int i = 0; i < n; ++i) comp[i] = i;
        std::function<int(int)> find = [&](int x) {
            while (comp[x] != x) x = comp[x] = comp[comp[x]];
            return x;
        };
        for (int i = 0; i < n; ++i)
            for (int j : lvl.adjacency[i]) {
                int a = find(i), b = find(j);
                if (a != b) comp[std::max(a, b)] = std::min(a, b);
            }
        std::vector<char> has_retained(n, 0);
        for (int i = 0; i < n; ++i)
            if (lvl.frontier[i].multiplicity == 1) has_retained[find(i)] = 1;
        for (int i = 0; i < n; ++i)
            if (lvl.frontier[i].multiplicity == 1 || has_retained[find(i)]) lvl.active.push_back(i);
    }

    // Outcomes per (parent, symbol).
    for (std::size_t i = 0; i < entries.size(); ++i)
        for (const auto& [parent, sym] : entries[i].cell.contributions)
            lvl.child_outcomes[parent][sym - 1] = entry_outcome[i];
    return lvl;
}

inline std::vector<Cell> root_cells(const IFS& ifs) {
    return {Cell{Word(), Similitude::identity(ifs.dimension), Int(1)}};
}

}  // namespace detail

/// Level 1: classifies the single symbols.
inline Level initial_level(const IFS& ifs, const Box& m, bool prune = true) {
    if (!validate_invariant_box(ifs, m)) throw InvariantBoxError("box is not invariant under the system");
    return detail::classify_children(ifs, m, detail::root_cells(ifs), {0}, 1, prune);
}

/// Level k+1 from level k.
inline Level next_level(const IFS& ifs, const Box& m, const Level& prev, bool prune = true) {
    return detail::classify_children(ifs, m, prev.frontier, prev.active, prev.depth + 1, prune);
}

struct GammaWord {
    Word word;
    Rational ratio;
    Similitude map;
    int level;
};

struct GammaTruncation {
    std::vector<Level> levels;
    std::vector<GammaWord> gamma_words;  // level-major, lex inside a level
    int requested_depth = 0;
    bool truncated_by_budget = false;
};

struct EnumerateOptions {
    bool prune = true;
    std::size_t frontier_budget = 1'000'000;
};

inline GammaTruncation enumerate_levels(const IFS& ifs, const Box& m, int depth,
                                        EnumerateOptions opts = {}) {
    if (depth < 1) throw Error("enumerate: depth must be >= 1");
    GammaTruncation out;
    out.requested_depth = depth;
    for (int k = 1; k <= depth; ++k) {
        const std::size_t parent_count = k == 1 ? 1 : out.levels.back().active.size();
        if (parent_count * ifs.alphabet_size() > opts.frontier_budget) {
            out.truncated_by_budget = true;
            break;
        }
        Level lvl = k == 1 ? initial_level(ifs, m, opts.prune)
                           : next_level(ifs, m, out.levels.back(), opts.prune);
        for (const auto& [w, f] : lvl.S)
            out.gamma_words.push_back({w, word_ratio(ifs, w), f, k});
        out.levels.push_back(std::move(lvl));
        if (out.levels.back().active.empty()) break;  // nothing left to expand
    }
    return out;
}

enum class CoverMode { DedupOne, PruneAll };

/// Per-level survivor cover counts over the level's word partition T u pruned.
///   DedupOne: distinct maps (covers the projection of surviving codings).
///   PruneAll: maps carried by exactly one word and free of twins (valid cover
///             for the univoque part: a point entering a twin cell has two
///             codings, so it never counts there).
inline std::vector<Int> survivor_cover_counts(const GammaTruncation& trunc, CoverMode mode) {
    std::vector<Int> out;
    for (const auto& lvl : trunc.levels) {
        struct Tally {
            Int t_words{0}, pruned_words{0};
        };
        std::map<Similitude, Tally> groups;
        for (const auto& [w, f] : lvl.T) ++groups[f].t_words;
        for (const auto& [w, f] : lvl.pruned) ++groups[f].pruned_words;
        Int n(0);
        for (const auto& [map, g] : groups) {
            if (mode == CoverMode::DedupOne)
                ++n;
            else if (g.t_words == 1 && g.pruned_words == 0)
                ++n;
        }
        out.push_back(n);
    }
    return out;
}

struct OverlapPair {
    Word u, v;  // u < v, word_map(u) == word_map(v)
    friend bool operator==(const OverlapPair& a, const OverlapPair& b) {
        return a.u == b.u && a.v == b.v;
    }
};

struct OverlapSearchResult {
    std::vector<OverlapPair> pairs;
    int searched_depth = 0;   // may be smaller than requested under the budget
    bool truncated = false;
};

namespace detail {

/// True iff (u,v) = (p u' s, p v' s) for some common prefix p and suffix s.
inline bool extends_pair(const Word& u, const Word& v, const Word& u2, const Word& v2) {
    if (u.size() < u2.size() || v.size() < v2.size()) return false;
    if (u.size() - u2.size() != v.size() - v2.size()) return false;
    const std::size_t slack = u.size() - u2.size();
    for (std::size_t p = 0; p <= slack; ++p) {
        bool ok = true;
        for (std::size_t i = 0; ok && i < p; ++i) ok = u.symbols[i] == v.symbols[i];
        for (std::size_t i = 0; ok && i < u2.size(); ++i) ok = u.symbols[p + i] == u2.symbols[i];
        for (std::size_t i = 0; ok && i < v2.size(); ++i) ok = v.symbols[p + i] == v2.symbols[i];
        for (std::size_t i = p + u2.size(); ok && i < u.size(); ++i) {
            const std::size_t off = i - u2.size() + v2.size();
            ok = u.symbols[i] == v.symbols[off];
        }
        if (ok) return true;
    }
    return false;
}

}  // namespace detail

/// All exact-overlap pairs up to the given depth, minimal witnesses first;
/// pairs that extend an already-reported pair by a common prefix/suffix are
/// suppressed.
inline OverlapSearchResult detect_overlaps(const IFS& ifs, int depth,
                                           std::size_t word_budget = 2'000'000) {
    OverlapSearchResult res;
    std::map<Similitude, std::vector<Word>> by_map;
    std::vector<Word> frontier{Word()};
    std::size_t total = 0;
    for (int k = 1; k <= depth; ++k) {
        if (total + frontier.size() * ifs.alphabet_size() > word_budget) {
            res.truncated = true;
            break;
        }
        std::vector<Word> next;
        next.reserve(frontier.size() * ifs.alphabet_size());
        for (const auto& w : frontier)
            for (std::uint8_t j = 1; j <= ifs.alphabet_size(); ++j) next.push_back(w.extended(j));
        total += next.size();
        for (const auto& w : next) by_map[word_map(ifs, w)].push_back(w);
        frontier = std::move(next);
        res.searched_depth = k;
    }

    std::vector<OverlapPair> all;
    for (const auto& [map, words] : by_map) {
        for (std::size_t i = 0; i < words.size(); ++i)
            for (std::size_t j = i + 1; j < words.size(); ++j)
                all.push_back(words[i] < words[j] ? OverlapPair{words[i], words[j]}
                                                  : OverlapPair{words[j], words[i]});
    }
    std::sort(all.begin(), all.end(), [](const OverlapPair& a, const OverlapPair& b) {
        const auto ka = std::max(a.u.size(), a.v.size()), kb = std::max(b.u.size(), b.v.size());
        if (ka != kb) return ka < kb;
        if (a.u != b.u) return a.u < b.u;
        return a.v < b.v;
    });
    for (const auto& p : all) {
        bool derived = false;
        for (const auto& kept : res.pairs)
            if (detail::extends_pair(p.u, p.v, kept.u, kept.v)) {
                derived = true;
                break;
            }
        if (!derived) res.pairs.push_back(p);
    }
    return res;
}

struct CheckResult {
    bool ok = true;
    std::string reason;
    explicit operator bool() const { return ok; }
};

/// Re-verifies, from scratch, the structural guarantees of a truncation:
/// Gamma is prefix-free, Gamma images are pairwise disjoint, and every S word
/// is disjoint from its whole level.
inline CheckResult prefix_free_check(const GammaTruncation& trunc, const Box& m) {
    std::vector<Word> words;
    for (const auto& g : trunc.gamma_words) words.push_back(g.word);
    std::sort(words.begin(), words.end());
    for (std::size_t i = 0; i + 1 < words.size(); ++i)
        if (words[i].is_prefix_of(words[i + 1]))
            return {false, "gamma word " + words[i].str() + " is a prefix of " + words[i + 1].str()};

    std::vector<Box> boxes;
    for (const auto& g : trunc.gamma_words) boxes.push_back(image_box(g.map, m));
    auto adj = intersection_graph(boxes);
    for (std::size_t i = 0; i < adj.size(); ++i)
        if (!adj[i].empty())
            return {false, "gamma images intersect: " + trunc.gamma_words[i].word.str() + " and " +
                               trunc.gamma_words[adj[i][0]].word.str()};

    for (const auto& lvl : trunc.levels) {
        for (const auto& [w, f] : lvl.S) {
            Box sb = image_box(f, m);
            for (std::size_t i = 0; i < lvl.frontier.size(); ++i)
                if (!boxes_disjoint(sb, lvl.frontier_boxes[i]))
                    return {false, "S word " + w.str() + " meets frontier cell " +
                                       lvl.frontier[i].word.str()};
        }
    }
    return {};
}

/// Partition invariant: at every level the words of S, T and pruned are
/// exactly the one-symbol extensions of the previous retained frontier.
inline CheckResult verify_partition(const GammaTruncation& trunc, const IFS& ifs) {
    for (std::size_t k = 0; k < trunc.levels.size(); ++k) {
        std::vector<Word> expected;
        if (k == 0) {
            for (std::uint8_t j = 1; j <= ifs.alphabet_size(); ++j) expected.push_back(Word().extended(j));
        } else {
            for (const auto& [w, f] : trunc.levels[k - 1].T)
                for (std::uint8_t j = 1; j <= ifs.alphabet_size(); ++j)
                    expected.push_back(w.extended(j));
        }
        std::vector<Word> got;
        for (const auto& [w, f] : trunc.levels[k].S) got.push_back(w);
        for (const auto& [w, f] : trunc.levels[k].T) got.push_back(w);
        for (const auto& [w, f] : trunc.levels[k].pruned) got.push_back(w);
        std::sort(expected.begin(), expected.end());
        std::sort(got.begin(), got.end());
        if (expected != got)
            return {false, "level " + std::to_string(k + 1) + " does not partition the expansion"};
    }
    return {};
}

}  // namespace univoque
