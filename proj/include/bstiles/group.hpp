#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bstiles/rational.hpp"
#include "bstiles/word.hpp"

namespace bstiles {

// Order (m,n) of the group <a,b | a^m b = b a^n>, both positive.
struct GroupParams {
    int m = 1;
    int n = 1;

    friend bool operator==(const GroupParams&, const GroupParams&) = default;
};

inline void require_valid(GroupParams p) {
    if (p.m < 1 || p.n < 1)
        throw ValidationError("group orders must be positive");
}

namespace detail {

inline BigInt floor_mod(const BigInt& z, int mod) {
    BigInt r = z % mod;
    if (r < 0) r += mod;
    return r;
}

// One syllable "a^exponent then b^{+-1}" of a split word.
struct BigSyllable {
    BigInt exponent;
    bool binv = false;
};

inline void expand_a_power(const BigInt& e, GroupWord& out) {
    if (e > 10'000'000 || e < -10'000'000)
        throw std::length_error("a-exponent too large to expand into letters");
    long long k = e.convert_to<long long>();
    Letter l{Gen::A, k < 0};
    for (long long i = 0; i < (k < 0 ? -k : k); ++i) out.push_back(l);
}

} // namespace detail

// Eliminates pinches b^-1 a^{km} b -> a^{kn} and b a^{kn} b^-1 -> a^{km}
// to fixpoint, leftmost-innermost, together with free reduction. Exponents
// of a-runs are otherwise left where they are. Terminates because every
// pinch elimination removes two b-letters and each input b-letter is
// pushed at most once.
inline GroupWord britton_reduce(GroupParams p, const GroupWord& w) {
    require_valid(p);
    std::vector<detail::BigSyllable> stack;
    BigInt pending = 0;
    for (Letter l : w) {
        if (l.base == Gen::A) {
            pending += l.inverse ? -1 : 1;
            continue;
        }
        int mod = l.inverse ? p.n : p.m;
        int to = l.inverse ? p.m : p.n;
        if (!stack.empty() && stack.back().binv != l.inverse && pending % mod == 0) {
            pending = stack.back().exponent + BigInt(to) * (pending / mod);
            stack.pop_back();
        } else {
            stack.push_back({pending, l.inverse});
            pending = 0;
        }
    }
    GroupWord out;
    for (const auto& s : stack) {
        detail::expand_a_power(s.exponent, out);
        out.push_back({Gen::B, s.binv});
    }
    detail::expand_a_power(pending, out);
    return out;
}

// Canonical representative of a group element: the rightward-collected
// form a^{r_1} b^{e_1} a^{r_2} b^{e_2} ... a^{r_k} b^{e_k} a^z where every
// residue r_i lies in [0,m) if the following letter is b and in [0,n) if
// it is b^-1, the word is pinch-free, and only the trailing exponent z is
// unrestricted. Two words represent the same group element iff they
// collect to identical forms.
//
// The trailing exponent is kept as a big integer: pushing a power of a
// through a b-letter multiplies it by n/m or m/n, so it can grow
// geometrically in the number of b-letters crossed.
class NormalForm {
public:
    struct Syllable {
        int residue = 0; // in [0,m) before b, in [0,n) before b^-1
        bool binv = false;

        friend bool operator==(const Syllable&, const Syllable&) = default;
        friend auto operator<=>(const Syllable&, const Syllable&) = default;
    };

    explicit NormalForm(GroupParams p) : params_(p) { require_valid(p); }

    GroupParams params() const { return params_; }
    const std::vector<Syllable>& syllables() const { return syllables_; }
    const BigInt& tail() const { return tail_; }

    bool is_identity() const { return syllables_.empty() && tail_ == 0; }
    bool is_a_power() const { return syllables_.empty(); }

    // Right-multiplies by a^e, staying in collected form.
    void append_a(const BigInt& e) { tail_ += e; }

    // Right-multiplies by b or b^-1. Collection step: with z pending,
    //   a^z b    = a^{z mod m} b    a^{n*floor(z/m)}
    //   a^z b^-1 = a^{z mod n} b^-1 a^{m*floor(z/n)}
    // and a zero residue against an opposite b-letter on top is a pinch,
    // which cancels the pair and merges the displaced power back.
    void append_b(bool inv) {
        int mod = inv ? params_.n : params_.m;
        int to = inv ? params_.m : params_.n;
        BigInt r = detail::floor_mod(tail_, mod);
        BigInt carry = BigInt(to) * ((tail_ - r) / mod);
        if (r == 0 && !syllables_.empty() && syllables_.back().binv != inv) {
            tail_ = BigInt(syllables_.back().residue) + carry;
            syllables_.pop_back();
        } else {
            syllables_.push_back({r.convert_to<int>(), inv});
            tail_ = carry;
        }
    }

    void append_letter(Letter l) {
        if (l.base == Gen::A)
            append_a(l.inverse ? -1 : 1);
        else
            append_b(l.inverse);
    }

    void append_word(const GroupWord& w) {
        for (Letter l : w) append_letter(l);
    }

    void append(const NormalForm& other) {
        BigInt saved_tail = other.tail_; // self-append must tolerate aliasing
        auto saved = other.syllables_;
        for (const auto& s : saved) {
            append_a(s.residue);
            append_b(s.binv);
        }
        append_a(saved_tail);
    }

    GroupWord to_word() const {
        GroupWord out;
        for (const auto& s : syllables_) {
            detail::expand_a_power(s.residue, out);
            out.push_back({Gen::B, s.binv});
        }
        detail::expand_a_power(tail_, out);
        return out;
    }

    std::string str() const { return format_word(to_word()); }

    friend bool operator==(const NormalForm& x, const NormalForm& y) {
        return x.params_ == y.params_ && x.tail_ == y.tail_ &&
               x.syllables_ == y.syllables_;
    }

private:
    GroupParams params_;
    std::vector<Syllable> syllables_;
    BigInt tail_ = 0;
};

inline NormalForm normalize(GroupParams p, const GroupWord& w) {
    NormalForm nf(p);
    nf.append_word(w);
    return nf;
}

inline NormalForm normalize(GroupParams p, std::string_view text) {
    return normalize(p, parse_word(text));
}

inline NormalForm identity(GroupParams p) { return NormalForm(p); }

inline NormalForm multiply(GroupParams p, const NormalForm& u, const NormalForm& v) {
    NormalForm r = u;
    r.append(v);
    return r;
}

inline NormalForm invert(GroupParams p, const NormalForm& u) {
    NormalForm r(p);
    r.append_a(-u.tail());
    const auto& syl = u.syllables();
    for (auto it = syl.rbegin(); it != syl.rend(); ++it) {
        r.append_b(!it->binv);
        r.append_a(-BigInt(it->residue));
    }
    return r;
}

inline bool equal(GroupParams p, const GroupWord& u, const GroupWord& v) {
    return normalize(p, u) == normalize(p, v);
}

inline bool equal(GroupParams p, const NormalForm& u, const NormalForm& v) {
    return u == v;
}

// The four products g.a, g.a^-1, g.b, g.b^-1, in that order.
inline std::vector<std::pair<Letter, NormalForm>> neighbors(GroupParams p,
                                                            const NormalForm& g) {
    static constexpr std::array<Letter, 4> gens = {
        Letter{Gen::A, false}, Letter{Gen::A, true},
        Letter{Gen::B, false}, Letter{Gen::B, true}};
    std::vector<std::pair<Letter, NormalForm>> out;
    out.reserve(4);
    for (Letter l : gens) {
        NormalForm h = g;
        h.append_letter(l);
        out.emplace_back(l, std::move(h));
    }
    return out;
}

// Elements at word-metric distance <= r from the identity, sorted
// lexicographically by their normal-form string.
inline std::vector<NormalForm> ball(GroupParams p, int r) {
    require_valid(p);
    std::set<std::string> seen;
    std::vector<NormalForm> result;
    std::vector<NormalForm> frontier;
    NormalForm e(p);
    seen.insert(e.str());
    result.push_back(e);
    frontier.push_back(e);
    for (int depth = 0; depth < r; ++depth) {
        std::vector<NormalForm> next;
        for (const auto& g : frontier) {
            for (auto& [l, h] : neighbors(p, g)) {
                if (seen.insert(h.str()).second) {
                    result.push_back(h);
                    next.push_back(std::move(h));
                }
            }
        }
        frontier = std::move(next);
    }
    std::sort(result.begin(), result.end(),
              [](const NormalForm& x, const NormalForm& y) { return x.str() < y.str(); });
    return result;
}

// True iff u and v lie on the same level, i.e. differ by a power of a.
inline bool same_level(GroupParams p, const NormalForm& u, const NormalForm& v) {
    return multiply(p, invert(p, u), v).is_a_power();
}

} // namespace bstiles
