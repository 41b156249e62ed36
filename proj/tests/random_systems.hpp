#pragma once

// Deterministic stream of small rational systems on the line with the unit
// interval invariant, biased toward overlapping and colliding translations so
// that twin handling and typing actually get exercised.

#include <random>
#include <vector>

#include "univoque/similitude.hpp"

namespace random_systems {

using namespace univoque;

struct Generated {
    IFS ifs;
    Box m;
};

inline Generated generate(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> m_dist(2, 3), q_dist(3, 5), den_dist(1, 4);
    const int m = m_dist(rng);
    const int q = q_dist(rng);
    const Rational ratio = make_rational(1, q);
    const int den = q * den_dist(rng);

    std::vector<Rational> trans;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (int i = 0; i < m; ++i) {
        if (i > 0 && coin(rng) < 0.25) {
            trans.push_back(trans[std::uniform_int_distribution<int>(0, i - 1)(rng)]);
            continue;
        }
        // b in [0, 1 - 1/q] keeps [0,1] invariant.
        const Int max_num = Int(den) - Int(den) / q;
        std::uniform_int_distribution<long> p(0, max_num.convert_to<long>());
        trans.push_back(make_rational(p(rng), den));
    }

    std::vector<Similitude> maps;
    for (const Rational& b : trans)
        maps.emplace_back(ratio, SignedPermutation::identity(1), Point({b}));
    return {IFS(1, maps), Box(Point({Rational(0)}), Point({Rational(1)}))};
}

}  // namespace random_systems
