#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "univoque/rational.hpp"

namespace univoque {

/// A point of Q^d.
struct Point {
    std::vector<Rational> coords;

    Point() = default;
    explicit Point(std::vector<Rational> c) : coords(std::move(c)) {}
    static Point zero(std::size_t d) { return Point(std::vector<Rational>(d, Rational(0))); }

    std::size_t dim() const { return coords.size(); }
    const Rational& operator[](std::size_t i) const { return coords[i]; }
    Rational& operator[](std::size_t i) { return coords[i]; }

    friend bool operator==(const Point& a, const Point& b) { return a.coords == b.coords; }
    friend bool operator<(const Point& a, const Point& b) {
        return std::lexicographical_compare(a.coords.begin(), a.coords.end(),
                                            b.coords.begin(), b.coords.end());
    }
};

/// Nonempty closed axis-aligned box [lo, hi].
struct Box {
    Point lo, hi;

    Box() = default;
    Box(Point l, Point h) : lo(std::move(l)), hi(std::move(h)) {
        if (lo.dim() != hi.dim()) throw Error("box corners of different dimension");
        for (std::size_t j = 0; j < lo.dim(); ++j)
            if (lo[j] > hi[j]) throw Error("box with lo > hi on axis " + std::to_string(j));
    }

    std::size_t dim() const { return lo.dim(); }
    Rational side(std::size_t j) const { return hi[j] - lo[j]; }

    friend bool operator==(const Box& a, const Box& b) { return a.lo == b.lo && a.hi == b.hi; }
};

/// True iff the closed boxes do not meet. Touching boxes are NOT disjoint.
inline bool boxes_disjoint(const Box& a, const Box& b) {
    if (a.dim() != b.dim()) throw Error("boxes_disjoint: dimension mismatch");
    for (std::size_t j = 0; j < a.dim(); ++j)
        if (a.hi[j] < b.lo[j] || b.hi[j] < a.lo[j]) return true;
    return false;
}

inline bool box_contains(const Box& outer, const Box& inner) {
    if (outer.dim() != inner.dim()) throw Error("box_contains: dimension mismatch");
    for (std::size_t j = 0; j < outer.dim(); ++j)
        if (inner.lo[j] < outer.lo[j] || inner.hi[j] > outer.hi[j]) return false;
    return true;
}

/// Orthogonal map sending e_j to signs[j] * e_{perm[j]} (0-based axes).
struct SignedPermutation {
    std::vector<std::size_t> perm;
    std::vector<int> signs;  // each +1 or -1

    SignedPermutation() = default;
    SignedPermutation(std::vector<std::size_t> p, std::vector<int> s)
        : perm(std::move(p)), signs(std::move(s)) {
        validate();
    }

    static SignedPermutation identity(std::size_t d) {
        std::vector<std::size_t> p(d);
        std::iota(p.begin(), p.end(), std::size_t{0});
        return SignedPermutation(std::move(p), std::vector<int>(d, 1));
    }

    std::size_t dim() const { return perm.size(); }

    bool is_identity() const {
        for (std::size_t j = 0; j < dim(); ++j)
            if (perm[j] != j || signs[j] != 1) return false;
        return true;
    }

    Point apply(const Point& x) const {
        if (x.dim() != dim()) throw Error("signed permutation: dimension mismatch");
        Point y = Point::zero(dim());
        for (std::size_t j = 0; j < dim(); ++j) y[perm[j]] = signs[j] > 0 ? x[j] : -x[j];
        return y;
    }

    /// this o other (apply other first).
    SignedPermutation compose(const SignedPermutation& other) const {
        if (dim() != other.dim()) throw Error("signed permutation: dimension mismatch");
        std::vector<std::size_t> p(dim());
        std::vector<int> s(dim());
        for (std::size_t j = 0; j < dim(); ++j) {
            p[j] = perm[other.perm[j]];
            s[j] = other.signs[j] * signs[other.perm[j]];
        }
        return SignedPermutation(std::move(p), std::move(s));
    }

    SignedPermutation inverse() const {
        std::vector<std::size_t> p(dim());
        std::vector<int> s(dim());
        for (std::size_t j = 0; j < dim(); ++j) {
            p[perm[j]] = j;
            s[perm[j]] = signs[j];
        }
        return SignedPermutation(std::move(p), std::move(s));
    }

    friend bool operator==(const SignedPermutation& a, const SignedPermutation& b) {
        return a.perm == b.perm && a.signs == b.signs;
    }
    friend bool operator<(const SignedPermutation& a, const SignedPermutation& b) {
        if (a.perm != b.perm) return a.perm < b.perm;
        return a.signs < b.signs;
    }

  private:
    void validate() const {
        if (perm.size() != signs.size()) throw Error("signed permutation: size mismatch");
        std::vector<bool> seen(perm.size(), false);
        for (std::size_t t : perm) {
            if (t >= perm.size() || seen[t]) throw Error("signed permutation: not a bijection");
            seen[t] = true;
        }
        for (int s : signs)
            if (s != 1 && s != -1) throw Error("signed permutation: sign must be +-1");
    }
};

}  // namespace univoque
