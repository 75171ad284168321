#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "bstiles/rational.hpp"
#include "bstiles/solver.hpp"

namespace bstiles {

using Vec2 = std::array<Rational, 2>;
using Mat2 = std::array<std::array<Rational, 2>, 2>;

inline Vec2 add(const Vec2& x, const Vec2& y) { return {x[0] + y[0], x[1] + y[1]}; }
inline Vec2 sub(const Vec2& x, const Vec2& y) { return {x[0] - y[0], x[1] - y[1]}; }
inline Vec2 scale(const Rational& s, const Vec2& x) { return {s * x[0], s * x[1]}; }
inline Vec2 mat_apply(const Mat2& m, const Vec2& x) {
    return {m[0][0] * x[0] + m[0][1] * x[1], m[1][0] * x[0] + m[1][1] * x[1]};
}

inline bool vec_less(const Vec2& x, const Vec2& y) {
    if (x[0] != y[0]) return x[0] < y[0];
    return x[1] < y[1];
}

// One affine map f(x) = M x + b with a closed unit square domain whose
// lower-left corner has integer coordinates.
struct AffineBranch {
    Mat2 M;
    Vec2 b;
    std::array<long long, 2> corner;

    bool domain_contains(const Vec2& x) const {
        return x[0] >= corner[0] && x[0] <= corner[0] + 1 && x[1] >= corner[1] &&
               x[1] <= corner[1] + 1;
    }

    Vec2 apply(const Vec2& x) const { return add(mat_apply(M, x), b); }
};

struct AffineSystem {
    std::vector<AffineBranch> branches;
};

// Squares are unit with integer corners by construction; this checks
// pairwise disjointness (closed squares, so touching counts as overlap).
inline bool validate_system(const AffineSystem& sys) {
    for (std::size_t i = 0; i < sys.branches.size(); ++i)
        for (std::size_t j = i + 1; j < sys.branches.size(); ++j) {
            auto& u = sys.branches[i].corner;
            auto& v = sys.branches[j].corner;
            long long dx = u[0] > v[0] ? u[0] - v[0] : v[0] - u[0];
            long long dy = u[1] > v[1] ? u[1] - v[1] : v[1] - u[1];
            if (dx <= 1 && dy <= 1) return false;
        }
    return true;
}

// Half-width C of the carry box [-C, C]^2: generous enough to contain
// every carry the floor-error analysis of the level coloring can produce.
inline Rational carry_box(const AffineSystem& sys, GroupParams p, long long denom) {
    require_valid(p);
    if (denom < 1) throw ValidationError("carry denominator must be positive");
    Rational best = 2; // the M = 0, b = 0 base case
    for (const auto& br : sys.branches) {
        Rational row0 = abs(br.M[0][0]) + abs(br.M[0][1]);
        Rational row1 = abs(br.M[1][0]) + abs(br.M[1][1]);
        Rational norm = row0 > row1 ? row0 : row1;
        Rational boff = abs(br.b[0]) > abs(br.b[1]) ? abs(br.b[0]) : abs(br.b[1]);
        Rational c = norm + boff + 2;
        if (c > best) best = c;
    }
    return best;
}

// Digit vectors representing points of a unit square: each component is
// the corner coordinate or the corner coordinate plus one.
inline std::vector<Vec2> square_digits(const std::array<long long, 2>& corner) {
    std::vector<Vec2> out;
    for (int dx = 0; dx <= 1; ++dx)
        for (int dy = 0; dy <= 1; ++dy)
            out.push_back({Rational(corner[0] + dx), Rational(corner[1] + dy)});
    return out;
}

// A tile with vector colors; the vertical edges carry (carry, branch), so
// two tiles can sit side by side only within the same affine branch.
struct VectorTile {
    std::vector<Vec2> top;
    std::vector<Vec2> bottom;
    Vec2 left;
    Vec2 right;
    int branch = 0;

    friend bool operator==(const VectorTile&, const VectorTile&) = default;
};

inline bool vecseq_less(const std::vector<Vec2>& x, const std::vector<Vec2>& y) {
    return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end(), vec_less);
}

inline bool operator<(const VectorTile& x, const VectorTile& y) {
    if (x.branch != y.branch) return x.branch < y.branch;
    if (x.top != y.top) return vecseq_less(x.top, y.top);
    if (x.bottom != y.bottom) return vecseq_less(x.bottom, y.bottom);
    if (x.left != y.left) return vec_less(x.left, y.left);
    return vec_less(x.right, y.right);
}

struct VectorTileSet {
    GroupParams group;
    std::vector<VectorTile> tiles;

    std::size_t size() const { return tiles.size(); }
};

// Smallest carry grid that can express the system's arithmetic: lcm of m
// and every denominator appearing in the maps.
inline long long default_denominator(const AffineSystem& sys, GroupParams p) {
    BigInt l = p.m;
    auto fold = [&](const Rational& r) { l = lcm(l, denominator(r)); };
    for (const auto& br : sys.branches) {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) fold(br.M[i][j]);
        fold(br.b[0]);
        fold(br.b[1]);
    }
    return l.convert_to<long long>();
}

// Compiles the system into vector tiles on BS(m,n): per branch i, tops
// are digit vectors of U_i, bottoms are digit vectors of any domain
// square (the successor level must land in some square), carries lie on
// the (1/denom)-grid inside the carry box, and
//     M_i * avg(top) + b_i + c = avg(bottom) + d
// holds exactly, componentwise.
inline VectorTileSet compile(const AffineSystem& sys, GroupParams p, long long denom) {
    require_valid(p);
    if (!validate_system(sys)) throw ValidationError("domain squares must be disjoint");
    if (denom < 1) throw ValidationError("carry denominator must be positive");
    Rational box = carry_box(sys, p, denom);
    BigInt grid_hi = floor_rat(box * denom);      // carries are g/denom, |g| <= grid_hi
    long long ghi = grid_hi.convert_to<long long>();

    std::set<Vec2, bool (*)(const Vec2&, const Vec2&)> bottom_set(vec_less);
    for (const auto& br : sys.branches)
        for (const auto& d : square_digits(br.corner)) bottom_set.insert(d);
    std::vector<Vec2> bottom_alphabet(bottom_set.begin(), bottom_set.end());

    VectorTileSet out{p, {}};
    for (std::size_t bi = 0; bi < sys.branches.size(); ++bi) {
        const auto& br = sys.branches[bi];
        std::vector<Vec2> top_alphabet = square_digits(br.corner);
        std::vector<std::size_t> tidx(static_cast<std::size_t>(p.n), 0);
        bool tops_done = false;
        while (!tops_done) {
            std::vector<Vec2> top;
            Vec2 top_sum{0, 0};
            for (int i = 0; i < p.n; ++i) {
                top.push_back(top_alphabet[tidx[static_cast<std::size_t>(i)]]);
                top_sum = add(top_sum, top.back());
            }
            Vec2 lhs = add(scale(Rational(1, p.n), mat_apply(br.M, top_sum)), br.b);

            std::vector<std::size_t> bidx(static_cast<std::size_t>(p.m), 0);
            bool bottoms_done = bottom_alphabet.empty();
            while (!bottoms_done) {
                std::vector<Vec2> bottom;
                Vec2 bottom_sum{0, 0};
                for (int i = 0; i < p.m; ++i) {
                    bottom.push_back(bottom_alphabet[bidx[static_cast<std::size_t>(i)]]);
                    bottom_sum = add(bottom_sum, bottom.back());
                }
                // d - c is pinned; it must land on the carry grid.
                Vec2 delta = sub(lhs, scale(Rational(1, p.m), bottom_sum));
                Rational d0 = delta[0] * denom, d1 = delta[1] * denom;
                if (denominator(d0) == 1 && denominator(d1) == 1) {
                    long long g0 = numerator(d0).convert_to<long long>();
                    long long g1 = numerator(d1).convert_to<long long>();
                    for (long long c0 = -ghi; c0 <= ghi; ++c0) {
                        long long e0 = c0 + g0;
                        if (e0 < -ghi || e0 > ghi) continue;
                        for (long long c1 = -ghi; c1 <= ghi; ++c1) {
                            long long e1 = c1 + g1;
                            if (e1 < -ghi || e1 > ghi) continue;
                            out.tiles.push_back({top,
                                                 bottom,
                                                 {Rational(c0, denom), Rational(c1, denom)},
                                                 {Rational(e0, denom), Rational(e1, denom)},
                                                 static_cast<int>(bi)});
                        }
                    }
                }
                int pos = p.m - 1;
                while (pos >= 0 && ++bidx[static_cast<std::size_t>(pos)] ==
                                       bottom_alphabet.size())
                    bidx[static_cast<std::size_t>(pos--)] = 0;
                if (pos < 0) bottoms_done = true;
            }
            int pos = p.n - 1;
            while (pos >= 0 &&
                   ++tidx[static_cast<std::size_t>(pos)] == top_alphabet.size())
                tidx[static_cast<std::size_t>(pos--)] = 0;
            if (pos < 0) tops_done = true;
        }
    }
    std::sort(out.tiles.begin(), out.tiles.end());
    out.tiles.erase(std::unique(out.tiles.begin(), out.tiles.end()), out.tiles.end());
    return out;
}

inline VectorTileSet compile(const AffineSystem& sys, GroupParams p) {
    return compile(sys, p, default_denominator(sys, p));
}

inline nlohmann::json vec_to_json(const Vec2& v) {
    return nlohmann::json{format_rational(v[0]), format_rational(v[1])};
}

inline Vec2 vec_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2)
        throw ParseError("vector color must have 2 components");
    return {parse_rational(j[0].get<std::string>()),
            parse_rational(j[1].get<std::string>())};
}

inline nlohmann::json vector_tileset_to_json(const VectorTileSet& ts) {
    nlohmann::json tiles = nlohmann::json::array();
    for (const auto& t : ts.tiles) {
        nlohmann::json top = nlohmann::json::array();
        for (const auto& c : t.top) top.push_back(vec_to_json(c));
        nlohmann::json bottom = nlohmann::json::array();
        for (const auto& c : t.bottom) bottom.push_back(vec_to_json(c));
        tiles.push_back(nlohmann::json{{"top", std::move(top)},
                                       {"bottom", std::move(bottom)},
                                       {"left", vec_to_json(t.left)},
                                       {"right", vec_to_json(t.right)},
                                       {"branch", t.branch}});
    }
    return nlohmann::json{{"group", {{"m", ts.group.m}, {"n", ts.group.n}}},
                          {"tiles", std::move(tiles)}};
}

inline std::string serialize_vector_tileset(const VectorTileSet& ts) {
    return vector_tileset_to_json(ts).dump(2) + "\n";
}

inline VectorTileSet vector_tileset_from_json(const nlohmann::json& j) {
    try {
        VectorTileSet ts;
        ts.group.m = j.at("group").at("m").get<int>();
        ts.group.n = j.at("group").at("n").get<int>();
        require_valid(ts.group);
        for (const auto& jt : j.at("tiles")) {
            VectorTile t;
            for (const auto& c : jt.at("top")) t.top.push_back(vec_from_json(c));
            for (const auto& c : jt.at("bottom")) t.bottom.push_back(vec_from_json(c));
            if (t.top.size() != static_cast<std::size_t>(ts.group.n) ||
                t.bottom.size() != static_cast<std::size_t>(ts.group.m))
                throw ParseError("vector tile arity does not match the group order");
            t.left = vec_from_json(jt.at("left"));
            t.right = vec_from_json(jt.at("right"));
            t.branch = jt.value("branch", 0);
            ts.tiles.push_back(std::move(t));
        }
        std::sort(ts.tiles.begin(), ts.tiles.end());
        ts.tiles.erase(std::unique(ts.tiles.begin(), ts.tiles.end()), ts.tiles.end());
        return ts;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("vector tile set: ") + e.what());
    }
}

inline VectorTileSet parse_vector_tileset(const std::string& text) {
    try {
        return vector_tileset_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("vector tile set: ") + e.what());
    }
}

struct ProbeResult {
    bool survived = false;
    std::optional<long long> escaped_at; // first iterate outside the domain
};

// Iterates the system from x0; not a decision procedure, just a bounded
// orbit check.
inline ProbeResult immortality_probe(const AffineSystem& sys, const Vec2& x0,
                                     long long steps) {
    Vec2 x = x0;
    for (long long i = 0; i <= steps; ++i) {
        const AffineBranch* hit = nullptr;
        for (const auto& br : sys.branches)
            if (br.domain_contains(x)) {
                hit = &br;
                break;
            }
        if (!hit) return {false, i};
        if (i == steps) break;
        x = hit->apply(x);
    }
    return {true, std::nullopt};
}

// Embeds a one-dimensional system x -> q*x + c on unit intervals with
// integer endpoints as a planar system acting trivially on the second
// coordinate.
inline AffineSystem
system_from_1d(const std::vector<std::tuple<Rational, Rational, long long>>& branches) {
    AffineSystem sys;
    for (const auto& [q, c, u] : branches) {
        AffineBranch br;
        br.M = {{{q, Rational(0)}, {Rational(0), Rational(1)}}};
        br.b = {c, Rational(0)};
        br.corner = {u, 0};
        sys.branches.push_back(br);
    }
    return sys;
}

inline nlohmann::json affine_system_to_json(const AffineSystem& sys) {
    nlohmann::json branches = nlohmann::json::array();
    for (const auto& br : sys.branches) {
        nlohmann::json jm = nlohmann::json::array();
        for (int i = 0; i < 2; ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (int j = 0; j < 2; ++j) row.push_back(format_rational(br.M[i][j]));
            jm.push_back(std::move(row));
        }
        branches.push_back(nlohmann::json{
            {"M", std::move(jm)},
            {"b", {format_rational(br.b[0]), format_rational(br.b[1])}},
            {"corner", {br.corner[0], br.corner[1]}}});
    }
    return nlohmann::json{{"branches", std::move(branches)}};
}

inline std::string serialize_affine_system(const AffineSystem& sys) {
    return affine_system_to_json(sys).dump(2) + "\n";
}

inline AffineSystem affine_system_from_json(const nlohmann::json& j) {
    try {
        AffineSystem sys;
        for (const auto& jb : j.at("branches")) {
            AffineBranch br;
            const auto& jm = jb.at("M");
            if (jm.size() != 2) throw ParseError("matrix must be 2x2");
            for (int i = 0; i < 2; ++i) {
                if (jm[i].size() != 2) throw ParseError("matrix must be 2x2");
                for (int jj = 0; jj < 2; ++jj)
                    br.M[i][jj] = parse_rational(jm[i][jj].get<std::string>());
            }
            const auto& bv = jb.at("b");
            if (bv.size() != 2) throw ParseError("offset must have 2 components");
            br.b = {parse_rational(bv[0].get<std::string>()),
                    parse_rational(bv[1].get<std::string>())};
            const auto& cv = jb.at("corner");
            if (cv.size() != 2) throw ParseError("corner must have 2 components");
            br.corner = {cv[0].get<long long>(), cv[1].get<long long>()};
            sys.branches.push_back(std::move(br));
        }
        return sys;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("affine system: ") + e.what());
    }
}

inline AffineSystem parse_affine_system(const std::string& text) {
    try {
        return affine_system_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("affine system: ") + e.what());
    }
}

struct VectorSolveOutcome {
    SolveStatus status = SolveStatus::Unsat;
    SolveStats stats;
    std::optional<nlohmann::json> witness;
};

// Tileability of a region by vector tiles, through the same search core
// as the scalar solver. The witness lists every edge with its vector
// color; b-edges additionally name the branch.
inline VectorSolveOutcome solve(const Region& region, const VectorTileSet& ts,
                                const SolverConfig& cfg = {}) {
    std::set<Vec2, bool (*)(const Vec2&, const Vec2&)> a_set(vec_less);
    auto b_less = [](const std::pair<Vec2, int>& x, const std::pair<Vec2, int>& y) {
        if (vec_less(x.first, y.first)) return true;
        if (vec_less(y.first, x.first)) return false;
        return x.second < y.second;
    };
    std::set<std::pair<Vec2, int>, decltype(b_less)> b_set(b_less);
    for (const auto& t : ts.tiles) {
        for (const auto& c : t.top) a_set.insert(c);
        for (const auto& c : t.bottom) a_set.insert(c);
        b_set.insert({t.left, t.branch});
        b_set.insert({t.right, t.branch});
    }
    std::vector<Vec2> a_colors(a_set.begin(), a_set.end());
    std::vector<std::pair<Vec2, int>> b_colors(b_set.begin(), b_set.end());
    auto a_id = [&](const Vec2& c) {
        return static_cast<int>(
            std::lower_bound(a_colors.begin(), a_colors.end(), c, vec_less) -
            a_colors.begin());
    };
    auto b_id = [&](const Vec2& c, int branch) {
        auto key = std::make_pair(c, branch);
        return static_cast<int>(
            std::lower_bound(b_colors.begin(), b_colors.end(), key, b_less) -
            b_colors.begin());
    };
    detail::CoreProblem problem;
    problem.m = region.group.m;
    problem.n = region.group.n;
    problem.num_a_colors = static_cast<int>(a_colors.size());
    problem.num_b_colors = static_cast<int>(b_colors.size());
    for (const auto& t : ts.tiles) {
        detail::CoreTile ct;
        for (const auto& c : t.top) ct.top.push_back(a_id(c));
        for (const auto& c : t.bottom) ct.bottom.push_back(a_id(c));
        ct.left = b_id(t.left, t.branch);
        ct.right = b_id(t.right, t.branch);
        problem.tiles.push_back(std::move(ct));
    }
    detail::CoreOutcome core = detail::core_solve(region, problem, cfg, {});
    VectorSolveOutcome out;
    out.status = core.status;
    out.stats = core.stats;
    if (core.status == SolveStatus::Sat) {
        nlohmann::json edges = nlohmann::json::array();
        for (std::size_t i = 0; i < region.elements.size(); ++i) {
            const std::string name = region.elements[i].str();
            const Vec2& av = a_colors[static_cast<std::size_t>(core.assignment[i * 2])];
            const auto& bv = b_colors[static_cast<std::size_t>(core.assignment[i * 2 + 1])];
            edges.push_back(nlohmann::json{
                {"source", name},
                {"gen", "a"},
                {"color", {format_rational(av[0]), format_rational(av[1])}}});
            edges.push_back(nlohmann::json{
                {"source", name},
                {"gen", "b"},
                {"color", {format_rational(bv.first[0]), format_rational(bv.first[1])}},
                {"branch", bv.second}});
        }
        out.witness = nlohmann::json{
            {"group", {{"m", region.group.m}, {"n", region.group.n}}},
            {"edges", std::move(edges)}};
    }
    return out;
}

} // namespace bstiles
