#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <json.hpp>

#include "bstiles/group.hpp"
#include "bstiles/rational.hpp"

namespace bstiles {

// One allowed pattern of the tile shape: n top colors (edges gb->gba->...),
// m bottom colors (edges g->ga->...), and the two vertical carries. The
// mode tag rides on the vertical edges and identifies the multiplier, so
// vertical colors match iff (carry, mode) pairs are equal. The branch id
// records which bottom alphabet produced the tile when a mode offers
// several; it distinguishes tiles for counting but takes no part in edge
// matching.
struct Tile {
    std::vector<Rational> top;
    std::vector<Rational> bottom;
    Rational left;
    Rational right;
    std::string mode;
    int branch = 0;

    friend bool operator==(const Tile&, const Tile&) = default;
};

inline bool operator<(const Tile& x, const Tile& y) {
    auto seq_less = [](const std::vector<Rational>& u, const std::vector<Rational>& v) {
        return std::lexicographical_compare(u.begin(), u.end(), v.begin(), v.end());
    };
    if (x.mode != y.mode) return x.mode < y.mode;
    if (x.branch != y.branch) return x.branch < y.branch;
    if (x.top != y.top) return seq_less(x.top, y.top);
    if (x.bottom != y.bottom) return seq_less(x.bottom, y.bottom);
    if (x.left != y.left) return x.left < y.left;
    return x.right < y.right;
}

struct TileSet {
    GroupParams group;
    std::vector<Tile> tiles;

    std::size_t size() const { return tiles.size(); }
};

// Exact multiply-by-q check: q * avg(top) + left == avg(bottom) + right.
inline bool check_relation(const Tile& t, const Rational& q, GroupParams p) {
    Rational top_sum = 0, bottom_sum = 0;
    for (const auto& c : t.top) top_sum += c;
    for (const auto& c : t.bottom) bottom_sum += c;
    return q * top_sum / p.n + t.left == bottom_sum / p.m + t.right;
}

namespace detail {

template <typename F>
void for_each_sequence(const std::vector<Rational>& alphabet, int length, F&& fn) {
    std::vector<Rational> seq(static_cast<std::size_t>(length));
    std::vector<std::size_t> idx(static_cast<std::size_t>(length), 0);
    if (alphabet.empty() || length == 0) {
        if (length == 0) fn(seq);
        return;
    }
    while (true) {
        for (int i = 0; i < length; ++i) seq[i] = alphabet[idx[i]];
        fn(seq);
        int pos = length - 1;
        while (pos >= 0 && ++idx[pos] == alphabet.size()) idx[pos--] = 0;
        if (pos < 0) break;
    }
}

} // namespace detail

// All tiles over the given alphabets that multiply by q. Each tile's
// bottom colors are drawn from a single alphabet of the list; the
// alphabet's index becomes the tile's branch id.
inline TileSet enumerate_generic(GroupParams p, const Rational& q,
                                 const std::vector<Rational>& top_alphabet,
                                 const std::vector<std::vector<Rational>>& bottom_alphabets,
                                 const std::vector<Rational>& carry_set,
                                 const std::string& mode) {
    require_valid(p);
    TileSet out{p, {}};
    detail::for_each_sequence(top_alphabet, p.n, [&](const std::vector<Rational>& top) {
        Rational top_sum = 0;
        for (const auto& c : top) top_sum += c;
        for (std::size_t ai = 0; ai < bottom_alphabets.size(); ++ai) {
            detail::for_each_sequence(
                bottom_alphabets[ai], p.m, [&](const std::vector<Rational>& bottom) {
                    Rational bottom_sum = 0;
                    for (const auto& c : bottom) bottom_sum += c;
                    // c - d is pinned by the relation; scan c over the carry set.
                    Rational delta = bottom_sum / p.m - q * top_sum / p.n;
                    for (const auto& c : carry_set) {
                        Rational d = c - delta;
                        if (std::find(carry_set.begin(), carry_set.end(), d) ==
                            carry_set.end())
                            continue;
                        out.tiles.push_back(
                            {top, bottom, c, d, mode, static_cast<int>(ai)});
                    }
                });
        }
    });
    std::sort(out.tiles.begin(), out.tiles.end());
    out.tiles.erase(std::unique(out.tiles.begin(), out.tiles.end()), out.tiles.end());
    return out;
}

// The 36 tiles that multiply by 2: tops over {0,1}, bottoms over {1,2},
// carries over {0, 1/3, 2/3}.
inline TileSet enumerate_times2() {
    return enumerate_generic(
        {3, 2}, Rational(2), {Rational(0), Rational(1)},
        {{Rational(1), Rational(2)}},
        {Rational(0), Rational(1, 3), Rational(2, 3)}, "q2");
}

// The 10 tiles that multiply by 2/3: tops over {1,2}, bottoms over {0,1}
// or over {1,2} (two branches), carries zero.
inline TileSet enumerate_times23() {
    return enumerate_generic(
        {3, 2}, Rational(2, 3), {Rational(1), Rational(2)},
        {{Rational(0), Rational(1)}, {Rational(1), Rational(2)}},
        {Rational(0)}, "q23");
}

// The full 46-tile set implementing the doubling/two-thirds system.
inline TileSet kari_bs32_tileset() {
    TileSet q2 = enumerate_times2();
    TileSet q23 = enumerate_times23();
    TileSet out{{3, 2}, {}};
    out.tiles = q2.tiles;
    out.tiles.insert(out.tiles.end(), q23.tiles.begin(), q23.tiles.end());
    std::sort(out.tiles.begin(), out.tiles.end());
    return out;
}

inline nlohmann::json tileset_to_json(const TileSet& ts) {
    nlohmann::json tiles = nlohmann::json::array();
    for (const auto& t : ts.tiles) {
        nlohmann::json jt;
        nlohmann::json top = nlohmann::json::array();
        for (const auto& c : t.top) top.push_back(format_rational(c));
        nlohmann::json bottom = nlohmann::json::array();
        for (const auto& c : t.bottom) bottom.push_back(format_rational(c));
        jt["top"] = std::move(top);
        jt["bottom"] = std::move(bottom);
        jt["left"] = format_rational(t.left);
        jt["right"] = format_rational(t.right);
        jt["mode"] = t.mode;
        if (t.branch != 0) jt["branch"] = t.branch;
        tiles.push_back(std::move(jt));
    }
    return nlohmann::json{{"group", {{"m", ts.group.m}, {"n", ts.group.n}}},
                          {"tiles", std::move(tiles)}};
}

inline std::string serialize_tileset(const TileSet& ts) {
    return tileset_to_json(ts).dump(2) + "\n";
}

inline TileSet tileset_from_json(const nlohmann::json& j) {
    try {
        TileSet ts;
        ts.group.m = j.at("group").at("m").get<int>();
        ts.group.n = j.at("group").at("n").get<int>();
        require_valid(ts.group);
        for (const auto& jt : j.at("tiles")) {
            Tile t;
            for (const auto& c : jt.at("top"))
                t.top.push_back(parse_rational(c.get<std::string>()));
            for (const auto& c : jt.at("bottom"))
                t.bottom.push_back(parse_rational(c.get<std::string>()));
            if (t.top.size() != static_cast<std::size_t>(ts.group.n))
                throw ParseError("tile has " + std::to_string(t.top.size()) +
                                 " top colors, expected " + std::to_string(ts.group.n));
            if (t.bottom.size() != static_cast<std::size_t>(ts.group.m))
                throw ParseError("tile has " + std::to_string(t.bottom.size()) +
                                 " bottom colors, expected " + std::to_string(ts.group.m));
            t.left = parse_rational(jt.at("left").get<std::string>());
            t.right = parse_rational(jt.at("right").get<std::string>());
            t.mode = jt.at("mode").get<std::string>();
            t.branch = jt.value("branch", 0);
            ts.tiles.push_back(std::move(t));
        }
        std::sort(ts.tiles.begin(), ts.tiles.end());
        ts.tiles.erase(std::unique(ts.tiles.begin(), ts.tiles.end()), ts.tiles.end());
        return ts;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("tile set: ") + e.what());
    }
}

inline TileSet parse_tileset(const std::string& text) {
    try {
        return tileset_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("tile set: ") + e.what());
    }
}

} // namespace bstiles
