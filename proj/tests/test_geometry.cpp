#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "univoque/geometry.hpp"

using namespace univoque;

namespace {

Point pt(std::initializer_list<std::string> cs) {
    std::vector<Rational> v;
    for (const auto& c : cs) v.push_back(parse_rational(c));
    return Point(std::move(v));
}

Box box1(const std::string& lo, const std::string& hi) { return Box(pt({lo}), pt({hi})); }

}  // namespace

TEST_CASE("box construction validates corners") {
    CHECK_NOTHROW(box1("0", "0"));  // degenerate boxes are allowed
    CHECK_THROWS_AS(box1("1", "0"), Error);
    CHECK_THROWS_AS(Box(pt({"0"}), pt({"0", "1"})), Error);
}

TEST_CASE("boxes_disjoint on the level-1 cells of the three-map quarter system") {
    // f_1(M) = [0,1/4], f_2(M) = [9/17,53/68], f_3(M) = [3/4,1] over M = [0,1].
    Box f1 = box1("0", "1/4"), f2 = box1("9/17", "53/68"), f3 = box1("3/4", "1");
    CHECK(boxes_disjoint(f1, f2));
    CHECK(boxes_disjoint(f1, f3));
    CHECK_FALSE(boxes_disjoint(f2, f3));  // 53/68 > 3/4 by 1/34
}

TEST_CASE("equal nonempty boxes are never disjoint, touching boxes neither") {
    Box a = box1("1/3", "1/2");
    CHECK_FALSE(boxes_disjoint(a, a));
    CHECK_FALSE(boxes_disjoint(box1("0", "1/2"), box1("1/2", "1")));
    CHECK(boxes_disjoint(box1("0", "1/2"), box1("2/3", "1")));
}

TEST_CASE("boxes_disjoint is symmetric") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> c(0, 24);
    for (int i = 0; i < 500; ++i) {
        auto rnd = [&] {
            Rational a = make_rational(c(rng), 24), b = make_rational(c(rng), 24);
            if (a > b) std::swap(a, b);
            return Box(Point({a, Rational(0)}), Point({b, Rational(1)}));
        };
        Box a = rnd(), b = rnd();
        CHECK(boxes_disjoint(a, b) == boxes_disjoint(b, a));
        CHECK_FALSE(boxes_disjoint(a, a));
    }
}

TEST_CASE("box_contains") {
    Box m = box1("0", "1");
    CHECK(box_contains(m, box1("0", "1/4")));
    CHECK(box_contains(m, m));
    CHECK_FALSE(box_contains(m, box1("1/2", "4/3")));
}

TEST_CASE("signed permutation algebra") {
    auto id = SignedPermutation::identity(3);
    CHECK(id.is_identity());

    SignedPermutation r({1, 0, 2}, {1, -1, 1});   // e0 -> e1, e1 -> -e0
    SignedPermutation s({2, 1, 0}, {-1, 1, -1});  // e0 -> -e2, e2 -> -e0

    Point x = Point({Rational(2), Rational(3), Rational(5)});
    CHECK(r.apply(x) == Point({Rational(-3), Rational(2), Rational(5)}));

    // Composition agrees with applying right-to-left.
    CHECK(r.compose(s).apply(x) == r.apply(s.apply(x)));
    CHECK(s.compose(r).apply(x) == s.apply(r.apply(x)));

    CHECK(r.compose(r.inverse()).is_identity());
    CHECK(r.inverse().compose(r).is_identity());

    CHECK_THROWS_AS(SignedPermutation({0, 0}, {1, 1}), Error);
    CHECK_THROWS_AS(SignedPermutation({0, 1}, {1, 2}), Error);
}

TEST_CASE("composition of signed permutations closed under random sampling") {
    std::mt19937_64 rng(13);
    std::vector<std::size_t> p{0, 1, 2, 3};
    auto rand_sp = [&] {
        std::shuffle(p.begin(), p.end(), rng);
        std::vector<int> s;
        for (int j = 0; j < 4; ++j) s.push_back(rng() % 2 ? 1 : -1);
        return SignedPermutation(p, s);
    };
    for (int i = 0; i < 200; ++i) {
        SignedPermutation a = rand_sp(), b = rand_sp();
        CHECK_NOTHROW(a.compose(b));  // constructor re-validates bijection + signs
    }
}
