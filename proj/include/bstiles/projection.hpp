#pragma once

#include "bstiles/group.hpp"
#include "bstiles/rational.hpp"
#include "bstiles/word.hpp"

namespace bstiles {

// Image of a group element in the plane: alpha is the horizontal
// coordinate psi(w), beta the height ||w||_{b^-1}. Well defined on the
// group, not just on words.
struct PlanePoint {
    Rational alpha;
    long long beta = 0;

    friend bool operator==(const PlanePoint&, const PlanePoint&) = default;
};

// psi(w.a) = psi(w) + (m/n)^{||w||_b}, psi unchanged by b-letters.
inline Rational psi(GroupParams p, const GroupWord& w) {
    require_valid(p);
    Rational acc = 0;
    long long h = 0; // ||prefix||_b
    for (Letter l : w) {
        if (l.base == Gen::A) {
            Rational step = pow_ratio(p.m, p.n, h);
            acc += l.inverse ? -step : step;
        } else {
            h += l.inverse ? -1 : 1;
        }
    }
    return acc;
}

inline PlanePoint project(GroupParams p, const GroupWord& w) {
    return {psi(p, w), contribution(w, Letter{Gen::B, true})};
}

// Syllable-wise evaluation; works even when the trailing a-exponent is
// too large to expand into letters.
inline PlanePoint project(GroupParams p, const NormalForm& g) {
    Rational acc = 0;
    long long h = 0;
    for (const auto& s : g.syllables()) {
        if (s.residue != 0) acc += Rational(s.residue) * pow_ratio(p.m, p.n, h);
        h += s.binv ? -1 : 1;
    }
    if (g.tail() != 0) acc += Rational(g.tail()) * pow_ratio(p.m, p.n, h);
    return {acc, -h};
}

} // namespace bstiles
