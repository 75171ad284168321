#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "bstiles/projection.hpp"

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

} // namespace

TEST_CASE("psi evaluates the defining induction", "[projection]") {
    CHECK(psi(kP, parse_word("")) == 0);
    CHECK(psi(kP, parse_word(kOmega)) == 0);
    CHECK(psi(kP, parse_word("aba")) == Rational(5, 2));
}

TEST_CASE("psi satisfies the cocycle identity", "[projection]") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 1000; ++i) {
        GroupWord u = random_word(rng, 30);
        GroupWord v = random_word(rng, 30);
        Rational lhs = psi(kP, concat(u, v));
        Rational rhs =
            psi(kP, u) + pow_ratio(kP.m, kP.n, contribution(u, Letter{Gen::B, false})) *
                             psi(kP, v);
        REQUIRE(lhs == rhs);
    }
}

TEST_CASE("projection of words and normal forms", "[projection]") {
    PlanePoint omega = project(kP, parse_word(kOmega));
    CHECK(omega.alpha == 0);
    CHECK(omega.beta == 0);
    CHECK(project(kP, parse_word("")) == PlanePoint{Rational(0), 0});

    PlanePoint lhs = project(kP, parse_word("aaab"));
    PlanePoint rhs = project(kP, parse_word("baa"));
    CHECK(lhs == rhs);
    CHECK(lhs.alpha == 3);
    CHECK(lhs.beta == -1);
}

TEST_CASE("projection is invariant under relator insertion", "[projection]") {
    // The relator, its inverse, and trivial pairs, inserted anywhere,
    // never move the image.
    static const char* fillers[] = {"aaabAAB", "baaBAAA", "aA", "Aa", "bB", "Bb"};
    std::mt19937_64 rng(31337);
    std::uniform_int_distribution<int> pick_filler(0, 5);
    for (int i = 0; i < 1000; ++i) {
        GroupWord w = random_word(rng, 24);
        GroupWord filler = parse_word(fillers[pick_filler(rng)]);
        std::uniform_int_distribution<std::size_t> pos(0, w.size());
        GroupWord spliced = w;
        spliced.insert(spliced.begin() + static_cast<long>(pos(rng)), filler.begin(),
                       filler.end());
        REQUIRE(project(kP, spliced) == project(kP, w));
    }
}

TEST_CASE("projection agrees between word and syllable evaluation", "[projection]") {
    std::mt19937_64 rng(555);
    for (int i = 0; i < 300; ++i) {
        GroupWord w = random_word(rng, 25);
        REQUIRE(project(kP, w) == project(kP, normalize(kP, w)));
    }
}

TEST_CASE("b-steps move the height by one", "[projection]") {
    std::mt19937_64 rng(808);
    for (int i = 0; i < 300; ++i) {
        GroupWord w = random_word(rng, 20);
        long long beta = project(kP, w).beta;
        CHECK(project(kP, concat(w, parse_word("b"))).beta == beta - 1);
        CHECK(project(kP, concat(w, parse_word("B"))).beta == beta + 1);
    }
}

TEST_CASE("each level has m distinct predecessor levels", "[projection]") {
    for (const auto& g : ball(kP, 2)) {
        // g b and g a^{km} b define the same level.
        NormalForm gb = multiply(kP, g, normalize(kP, "b"));
        CHECK(same_level(kP, gb, multiply(kP, g, normalize(kP, "aaab"))));
        CHECK(same_level(kP, gb, multiply(kP, g, normalize(kP, "aaaaaab"))));
        // g b, g a b, ..., g a^{m-1} b are pairwise on distinct levels.
        std::vector<NormalForm> sheets;
        NormalForm walk = g;
        for (int j = 0; j < kP.m; ++j) {
            sheets.push_back(multiply(kP, walk, normalize(kP, "b")));
            walk.append_a(1);
        }
        for (std::size_t x = 0; x < sheets.size(); ++x)
            for (std::size_t y = x + 1; y < sheets.size(); ++y)
                CHECK_FALSE(same_level(kP, sheets[x], sheets[y]));
    }
}
