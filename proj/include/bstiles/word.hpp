#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "bstiles/errors.hpp"

namespace bstiles {

// Generators of BS(m,n). ASCII encoding: a, A, b, B for a, a^-1, b, b^-1.
enum class Gen : unsigned char { A, B };

struct Letter {
    Gen base = Gen::A;
    bool inverse = false;

    friend bool operator==(const Letter&, const Letter&) = default;
};

inline Letter inverse(Letter l) { return {l.base, !l.inverse}; }

inline char letter_to_char(Letter l) {
    if (l.base == Gen::A) return l.inverse ? 'A' : 'a';
    return l.inverse ? 'B' : 'b';
}

inline Letter letter_from_char(char c) {
    switch (c) {
        case 'a': return {Gen::A, false};
        case 'A': return {Gen::A, true};
        case 'b': return {Gen::B, false};
        case 'B': return {Gen::B, true};
        default: throw ParseError(std::string("invalid letter '") + c + "'");
    }
}

// A word over {a, A, b, B}; may contain cancellations and pinches.
using GroupWord = std::vector<Letter>;

inline GroupWord parse_word(std::string_view text) {
    GroupWord w;
    w.reserve(text.size());
    for (char c : text) w.push_back(letter_from_char(c));
    return w;
}

inline std::string format_word(const GroupWord& w) {
    std::string s;
    s.reserve(w.size());
    for (Letter l : w) s.push_back(letter_to_char(l));
    return s;
}

inline GroupWord inverse_word(const GroupWord& w) {
    GroupWord r;
    r.reserve(w.size());
    for (auto it = w.rbegin(); it != w.rend(); ++it) r.push_back(inverse(*it));
    return r;
}

inline GroupWord concat(const GroupWord& u, const GroupWord& v) {
    GroupWord r = u;
    r.insert(r.end(), v.begin(), v.end());
    return r;
}

// ||w||_x = |w|_x - |w|_{x^-1}, the signed count of a directed generator.
inline long long contribution(const GroupWord& w, Letter x) {
    long long c = 0;
    for (Letter l : w) {
        if (l.base != x.base) continue;
        c += (l.inverse == x.inverse) ? 1 : -1;
    }
    return c;
}

// Cancels adjacent inverse pairs to fixpoint.
inline GroupWord free_reduce(const GroupWord& w) {
    GroupWord out;
    out.reserve(w.size());
    for (Letter l : w) {
        if (!out.empty() && out.back() == inverse(l))
            out.pop_back();
        else
            out.push_back(l);
    }
    return out;
}

} // namespace bstiles
