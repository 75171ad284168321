#include <catch2/catch_amalgamated.hpp>

#include <limits>
#include <random>
#include <set>

#include "bstiles/group.hpp"
#include "bstiles/word.hpp"

using namespace bstiles;

namespace {

const GroupParams kP{3, 2};
const char* kOmega = "baBaabABAA";

GroupWord random_word(std::mt19937_64& rng, int max_len) {
    std::uniform_int_distribution<int> len(0, max_len);
    std::uniform_int_distribution<int> pick(0, 3);
    static const char alphabet[] = {'a', 'A', 'b', 'B'};
    GroupWord w;
    int l = len(rng);
    for (int i = 0; i < l; ++i) w.push_back(letter_from_char(alphabet[pick(rng)]));
    return w;
}

// Identity test that bypasses the collected normal form: a freely reduced
// pinch-free word represents the identity iff it is empty.
bool identity_by_britton(const GroupWord& w) {
    return britton_reduce(kP, w).empty();
}

} // namespace

TEST_CASE("free reduction cancels inverse pairs", "[group]") {
    CHECK(format_word(free_reduce(parse_word("aA"))).empty());
    CHECK(format_word(free_reduce(parse_word("abBA"))).empty());
    CHECK(format_word(free_reduce(parse_word("aab"))) == "aab");
}

TEST_CASE("britton reduction eliminates pinches only", "[group]") {
    CHECK(format_word(britton_reduce(kP, parse_word("Baaab"))) == "aa");
    CHECK(format_word(britton_reduce(kP, parse_word("baaB"))) == "aaa");
    CHECK(format_word(britton_reduce(kP, parse_word("baB"))) == "baB");
    // No rightward collection: a^3 b keeps its shape under pure pinch removal.
    CHECK(format_word(britton_reduce(kP, parse_word("aaab"))) == "aaab");
}

TEST_CASE("normalize produces one representative per element", "[group]") {
    CHECK(normalize(kP, "aaab") == normalize(kP, "baa"));
    CHECK(normalize(kP, "aaab").str() == "baa");
    CHECK(normalize(kP, "").str().empty());
    CHECK_FALSE(normalize(kP, kOmega).is_identity());
}

TEST_CASE("normal form residues are canonical", "[group]") {
    std::mt19937_64 rng(12345);
    for (int i = 0; i < 500; ++i) {
        NormalForm nf = normalize(kP, random_word(rng, 30));
        for (const auto& s : nf.syllables()) {
            CHECK(s.residue >= 0);
            CHECK(s.residue < (s.binv ? kP.n : kP.m));
        }
        // Idempotence: renormalizing the printed form changes nothing.
        CHECK(normalize(kP, nf.to_word()) == nf);
    }
}

TEST_CASE("normalize is sound against a pinch-only identity check", "[group]") {
    std::mt19937_64 rng(777);
    for (int i = 0; i < 500; ++i) {
        GroupWord w = random_word(rng, 24);
        NormalForm nf = normalize(kP, w);
        GroupWord probe = concat(w, inverse_word(nf.to_word()));
        CHECK(identity_by_britton(probe));
    }
}

TEST_CASE("word problem", "[group]") {
    CHECK(equal(kP, parse_word("aaab"), parse_word("baa")));
    CHECK_FALSE(equal(kP, parse_word(kOmega), parse_word("")));
    std::mt19937_64 rng(99);
    for (int i = 0; i < 100; ++i) {
        GroupWord w = random_word(rng, 20);
        CHECK(equal(kP, w, concat(w, parse_word("aA"))));
    }
}

TEST_CASE("multiplication and inversion", "[group]") {
    std::mt19937_64 rng(4242);
    for (int i = 0; i < 200; ++i) {
        NormalForm x = normalize(kP, random_word(rng, 20));
        CHECK(multiply(kP, x, invert(kP, x)).is_identity());
        CHECK(multiply(kP, identity(kP), x) == x);
        CHECK(multiply(kP, x, identity(kP)) == x);
    }
    CHECK(multiply(kP, normalize(kP, "aaa"), normalize(kP, "b")) ==
          multiply(kP, normalize(kP, "b"), normalize(kP, "aa")));
}

TEST_CASE("contribution counts signed occurrences", "[group]") {
    CHECK(contribution(parse_word(kOmega), Letter{Gen::B, true}) == 0);
    CHECK(contribution(parse_word(""), Letter{Gen::A, false}) == 0);
    CHECK(contribution(parse_word("aab"), Letter{Gen::B, false}) == 1);
    CHECK(contribution(parse_word("aab"), Letter{Gen::A, false}) == 2);
    CHECK(contribution(parse_word("AAb"), Letter{Gen::A, false}) == -2);
}

TEST_CASE("neighbors are the four generator products", "[group]") {
    auto nb = neighbors(kP, identity(kP));
    REQUIRE(nb.size() == 4);
    std::set<std::string> names;
    for (const auto& [l, g] : nb) names.insert(g.str());
    CHECK(names == std::set<std::string>{"a", "A", "b", "B"});

    auto nb3 = neighbors(kP, normalize(kP, "aaa"));
    bool found = false;
    for (const auto& [l, g] : nb3) found = found || g.str() == "baa";
    CHECK(found);

    // Symmetry: g appears among the neighbors of each of its neighbors.
    for (const auto& g0 : ball(kP, 2)) {
        for (const auto& [l, h] : neighbors(kP, g0)) {
            bool back = false;
            for (const auto& [l2, g2] : neighbors(kP, h)) back = back || g2 == g0;
            CHECK(back);
        }
    }
}

TEST_CASE("balls around the identity", "[group]") {
    CHECK(ball(kP, 0).size() == 1);
    CHECK(ball(kP, 1).size() == 5);

    // Independent count for radius 2: enumerate all words of length <= 2
    // and deduplicate with pairwise equality checks only.
    std::vector<GroupWord> words{parse_word("")};
    static const char alphabet[] = {'a', 'A', 'b', 'B'};
    for (char c1 : alphabet) {
        words.push_back(parse_word(std::string(1, c1)));
        for (char c2 : alphabet)
            words.push_back(parse_word(std::string(1, c1) + std::string(1, c2)));
    }
    std::vector<GroupWord> distinct;
    for (const auto& w : words) {
        bool dup = false;
        for (const auto& seen : distinct) dup = dup || equal(kP, w, seen);
        if (!dup) distinct.push_back(w);
    }
    CHECK(distinct.size() == 17);
    CHECK(ball(kP, 2).size() == distinct.size());

    // Iteration order is lexicographic on the normal form.
    auto b2 = ball(kP, 2);
    for (std::size_t i = 1; i < b2.size(); ++i) CHECK(b2[i - 1].str() < b2[i].str());
}

TEST_CASE("levels are cosets of the a-powers", "[group]") {
    CHECK(same_level(kP, normalize(kP, "b"), normalize(kP, "baaaaa")));
    CHECK_FALSE(same_level(kP, identity(kP), normalize(kP, "b")));
    CHECK(same_level(kP, normalize(kP, "aaab"), normalize(kP, "baa")));
}

TEST_CASE("the non-injectivity witness has infinite order", "[group]") {
    NormalForm omega = normalize(kP, kOmega);
    NormalForm power = identity(kP);
    for (int k = 1; k <= 50; ++k) {
        power = multiply(kP, power, omega);
        CHECK_FALSE(power.is_identity());
    }
}

TEST_CASE("huge exponents survive collection", "[group]") {
    // Each a^2 b^-1 crossing multiplies the pending exponent by 3/2, so
    // 200 of them overflow any fixed-width integer. The collected form
    // still composes exactly with its inverse.
    std::string w;
    for (int i = 0; i < 200; ++i) w += "aaB";
    NormalForm nf = normalize(kP, w);
    CHECK_FALSE(nf.is_identity());
    CHECK(nf.tail() > BigInt(std::numeric_limits<unsigned long long>::max()));
    CHECK(multiply(kP, nf, invert(kP, nf)).is_identity());
    CHECK_THROWS_AS(nf.to_word(), std::length_error);
}

TEST_CASE("group orders must be positive", "[group]") {
    CHECK_THROWS_AS(normalize(GroupParams{0, 2}, "a"), ValidationError);
    CHECK_THROWS_AS(normalize(GroupParams{3, -1}, "a"), ValidationError);
}
