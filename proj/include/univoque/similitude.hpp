#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "univoque/geometry.hpp"

namespace univoque {

/// An exact similarity map x |-> ratio * orth(x) + trans.
///
/// Contractive system maps have ratio in (0,1) (enforced by IFS validation);
/// the type itself also represents identities (ratio 1) and relative maps
/// g^{-1} o h between cells, whose ratio may be any positive rational.
struct Similitude {
    Rational ratio;
    SignedPermutation orth;
    Point trans;

    Similitude() = default;
    Similitude(Rational r, SignedPermutation o, Point t)
        : ratio(std::move(r)), orth(std::move(o)), trans(std::move(t)) {
        if (ratio <= 0) throw Error("similitude ratio must be positive");
        if (orth.dim() != trans.dim()) throw Error("similitude: dimension mismatch");
    }

    static Similitude identity(std::size_t d) {
        return Similitude(Rational(1), SignedPermutation::identity(d), Point::zero(d));
    }

    std::size_t dim() const { return trans.dim(); }
    bool is_identity() const { return ratio == 1 && orth.is_identity(); }
    bool contractive() const { return ratio < 1; }

    Point apply(const Point& x) const {
        Point y = orth.apply(x);
        for (std::size_t j = 0; j < dim(); ++j) y[j] = ratio * y[j] + trans[j];
        return y;
    }

    friend bool operator==(const Similitude& a, const Similitude& b) {
        return a.ratio == b.ratio && a.orth == b.orth && a.trans == b.trans;
    }
    friend bool operator<(const Similitude& a, const Similitude& b) {
        if (a.ratio != b.ratio) return a.ratio < b.ratio;
        if (a.orth != b.orth) return a.orth < b.orth;
        return a.trans < b.trans;
    }
};

/// f o g, exact.
inline Similitude compose(const Similitude& f, const Similitude& g) {
    if (f.dim() != g.dim()) throw Error("compose: dimension mismatch");
    return Similitude(f.ratio * g.ratio, f.orth.compose(g.orth), f.apply(g.trans));
}

inline Similitude inverse(const Similitude& f) {
    SignedPermutation oinv = f.orth.inverse();
    Point t = oinv.apply(f.trans);
    for (std::size_t j = 0; j < f.dim(); ++j) t[j] = -t[j] / f.ratio;
    return Similitude(Rational(1) / f.ratio, std::move(oinv), std::move(t));
}

/// base^{-1} o other: the position of `other`'s cell seen from `base`'s frame.
inline Similitude relative_map(const Similitude& base, const Similitude& other) {
    return compose(inverse(base), other);
}

/// Exact image of a box; signed permutations keep boxes axis-aligned.
inline Box image_box(const Similitude& f, const Box& b) {
    if (f.dim() != b.dim()) throw Error("image_box: dimension mismatch");
    Point lo = f.apply(b.lo), hi = f.apply(b.hi);
    for (std::size_t j = 0; j < f.dim(); ++j)
        if (lo[j] > hi[j]) std::swap(lo[j], hi[j]);
    return Box(std::move(lo), std::move(hi));
}

inline bool map_equal(const Similitude& f, const Similitude& g) {
    if (f.dim() != g.dim()) throw Error("map_equal: dimension mismatch");
    return f == g;
}

/// A finite word over the alphabet {1, ..., m}. The empty word is allowed and
/// denotes the identity composition.
struct Word {
    std::vector<std::uint8_t> symbols;

    Word() = default;
    explicit Word(std::vector<std::uint8_t> s) : symbols(std::move(s)) {}
    /// Convenience spelling for tests: "231" -> word (2,3,1). Digits only.
    static Word of(const std::string& digits) {
        std::vector<std::uint8_t> s;
        s.reserve(digits.size());
        for (char c : digits) {
            if (c < '1' || c > '9') throw Error("word literal must use digits 1..9");
            s.push_back(static_cast<std::uint8_t>(c - '0'));
        }
        return Word(std::move(s));
    }

    std::size_t size() const { return symbols.size(); }
    bool empty() const { return symbols.empty(); }

    Word extended(std::uint8_t sym) const {
        Word w = *this;
        w.symbols.push_back(sym);
        return w;
    }

    bool is_prefix_of(const Word& other) const {
        if (size() > other.size()) return false;
        return std::equal(symbols.begin(), symbols.end(), other.symbols.begin());
    }

    std::string str() const {
        if (symbols.empty()) return "-";
        bool digits = std::all_of(symbols.begin(), symbols.end(), [](auto s) { return s <= 9; });
        std::string out;
        for (std::size_t i = 0; i < symbols.size(); ++i) {
            if (!digits && i > 0) out += '.';
            out += std::to_string(int(symbols[i]));
        }
        return out;
    }

    friend bool operator==(const Word& a, const Word& b) { return a.symbols == b.symbols; }
    friend auto operator<=>(const Word& a, const Word& b) {
        return std::lexicographical_compare_three_way(a.symbols.begin(), a.symbols.end(),
                                                      b.symbols.begin(), b.symbols.end());
    }
};

/// Iterated function system of contractive similitudes on Q^d.
struct IFS {
    std::size_t dimension = 0;
    std::vector<Similitude> maps;

    IFS() = default;
    IFS(std::size_t d, std::vector<Similitude> ms) : dimension(d), maps(std::move(ms)) {
        for (const auto& f : maps) {
            if (f.dim() != dimension) throw Error("IFS: map dimension mismatch");
            if (!(f.ratio > 0 && f.ratio < 1)) throw Error("IFS: ratio must lie in (0,1)");
        }
    }

    std::size_t alphabet_size() const { return maps.size(); }

    const Similitude& map(std::uint8_t symbol) const {
        if (symbol < 1 || symbol > maps.size()) throw Error("symbol out of range");
        return maps[symbol - 1];
    }

    Rational max_ratio() const {
        Rational r(0);
        for (const auto& f : maps) r = std::max(r, f.ratio);
        return r;
    }

    bool homogeneous() const {
        for (const auto& f : maps)
            if (f.ratio != maps.front().ratio) return false;
        return true;
    }
};

/// Left-to-right composition f_{w_1} o ... o f_{w_k}; the empty word gives the
/// (non-contractive) identity.
inline Similitude word_map(const IFS& ifs, const Word& w) {
    Similitude acc = Similitude::identity(ifs.dimension);
    for (std::uint8_t s : w.symbols) acc = compose(acc, ifs.map(s));
    return acc;
}

inline Rational word_ratio(const IFS& ifs, const Word& w) {
    Rational r(1);
    for (std::uint8_t s : w.symbols) r *= ifs.map(s).ratio;
    return r;
}

/// True iff f_i(M) is contained in M for every map.
inline bool validate_invariant_box(const IFS& ifs, const Box& m) {
    if (m.dim() != ifs.dimension) throw Error("invariant box: dimension mismatch");
    for (const auto& f : ifs.maps)
        if (!box_contains(m, image_box(f, m))) return false;
    return true;
}

/// Smallest invariant box for systems whose orthogonal parts are all the
/// identity: per axis the fixed points of the min/max envelope maps, which
/// reduce to min_i b_ij/(1-r_i) and max_i b_ij/(1-r_i).
inline Box suggest_invariant_box(const IFS& ifs) {
    if (ifs.maps.empty()) throw Error("suggest_invariant_box: empty system");
    for (const auto& f : ifs.maps)
        if (!f.orth.is_identity())
            throw Error(
                "suggest_invariant_box requires identity orthogonal parts; "
                "provide the invariant box explicitly");
    Point lo = Point::zero(ifs.dimension), hi = Point::zero(ifs.dimension);
    for (std::size_t j = 0; j < ifs.dimension; ++j) {
        Rational lo_j, hi_j;
        bool first = true;
        for (const auto& f : ifs.maps) {
            Rational fix = f.trans[j] / (Rational(1) - f.ratio);
            if (first || fix < lo_j) lo_j = fix;
            if (first || fix > hi_j) hi_j = fix;
            first = false;
        }
        lo[j] = lo_j;
        hi[j] = hi_j;
    }
    return Box(std::move(lo), std::move(hi));
}

}  // namespace univoque
