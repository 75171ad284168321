#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "bstiles/dynsys.hpp"
#include "bstiles/projection.hpp"
#include "bstiles/tiles.hpp"

namespace bstiles {

// Vertical-edge tag naming the level multiplier.
inline std::string mode_for_multiplier(const Rational& q) {
    if (q == 2) return "q2";
    if (q == Rational(2, 3)) return "q23";
    return "q:" + format_rational(q);
}

// Color of one Cayley-graph edge. a-edges carry a bare number; b-edges
// carry a number plus the mode tag.
struct EdgeColor {
    Rational value;
    std::optional<std::string> mode;

    friend bool operator==(const EdgeColor&, const EdgeColor&) = default;
};

// Edges are keyed by (source element, generator); elements are named by
// their normal-form string so that every group element has exactly one key.
using EdgeKey = std::pair<std::string, char>;

struct Patch {
    GroupParams group;
    std::map<EdgeKey, EdgeColor> edges;
};

namespace detail {

// Lattice abscissa of a point: (m/n)^beta * alpha. Consecutive vertices
// along a level differ by exactly 1 in this coordinate.
inline Rational lattice_abscissa(GroupParams p, const PlanePoint& pt) {
    return pow_ratio(p.m, p.n, pt.beta) * pt.alpha;
}

} // namespace detail

// Label of the edge g -> ga at the projected point pt: the balanced digit
// floor((A+1)x) - floor(Ax) of x = x_beta at lattice abscissa A.
inline Rational gamma_a_label(GroupParams p, const Orbit& orbit, const PlanePoint& pt) {
    const Rational& x = orbit.x_at(pt.beta);
    Rational u = detail::lattice_abscissa(p, pt) * x;
    return Rational(floor_rat(u + x) - floor_rat(u));
}

// Label of the edge g -> gb, paired with the mode tag of the level
// multiplier q = q_beta. With u = A*x_beta and v the corresponding
// product one level up, the label is
//     (q/n)(floor(v)+1) - (1/m)(floor(u)+1),
// which lies in (-1/m, q/n); the one-past offsets cancel in the
// telescoping across a tile, so the multiply-by-q relation is unaffected.
inline EdgeColor gamma_b_label(GroupParams p, const Orbit& orbit, const PlanePoint& pt) {
    const Rational& x = orbit.x_at(pt.beta);
    const Rational& q = orbit.q_at(pt.beta);
    Rational a = detail::lattice_abscissa(p, pt);
    Rational u = a * x;
    Rational v = Rational(p.n) / p.m * a * (x / q);
    Rational value = q / p.n * Rational(floor_rat(v) + 1) -
                     Rational(floor_rat(u) + 1, p.m);
    return {value, mode_for_multiplier(q)};
}

struct PatchOptions {
    // The explicit construction is stated for (m,n) = (3,2); the same
    // formulas for other orders are provided behind this flag and are
    // validated only by the multiply-by-q identity.
    bool allow_general = false;
};

// Colors every a-edge and b-edge whose source lies in the region. Edges
// that project to the same point receive the same color by construction.
inline Patch build_patch(GroupParams p, const Orbit& orbit,
                         const std::vector<NormalForm>& region,
                         const PatchOptions& options = {}) {
    require_valid(p);
    if (!options.allow_general && !(p.m == 3 && p.n == 2))
        throw ValidationError(
            "coloring is defined for order (3,2); pass allow_general to "
            "use the generalized formulas");
    Patch patch{p, {}};
    for (const auto& g : region) {
        PlanePoint pt = project(p, g);
        std::string name = g.str();
        patch.edges[{name, 'a'}] = {gamma_a_label(p, orbit, pt), std::nullopt};
        patch.edges[{name, 'b'}] = gamma_b_label(p, orbit, pt);
    }
    return patch;
}

// The 2+m+n edge colors of the tile shape anchored at one element.
struct AnchorPattern {
    std::vector<Rational> top;
    std::vector<Rational> bottom;
    Rational left;
    Rational right;
    std::string left_mode;
    std::string right_mode;
};

inline AnchorPattern extract_pattern(const Patch& patch, const NormalForm& anchor) {
    GroupParams p = patch.group;
    AnchorPattern out;
    std::vector<std::string> missing;
    auto lookup = [&](const NormalForm& g, char gen) -> const EdgeColor* {
        auto it = patch.edges.find({g.str(), gen});
        if (it == patch.edges.end()) {
            missing.push_back(g.str() + std::string(1, ':') + gen);
            return nullptr;
        }
        return &it->second;
    };
    NormalForm walk = anchor;
    std::vector<const EdgeColor*> bottom;
    for (int i = 0; i < p.m; ++i) {
        bottom.push_back(lookup(walk, 'a'));
        walk.append_a(1);
    }
    const EdgeColor* left = lookup(anchor, 'b');
    const EdgeColor* right = lookup(walk, 'b'); // walk == anchor * a^m
    NormalForm top_walk = anchor;
    top_walk.append_b(false);
    std::vector<const EdgeColor*> top;
    for (int j = 0; j < p.n; ++j) {
        top.push_back(lookup(top_walk, 'a'));
        top_walk.append_a(1);
    }
    if (!missing.empty()) {
        std::string msg = "pattern at '" + anchor.str() + "' is missing edges:";
        for (const auto& m : missing) msg += " " + m;
        throw IncompletePatternError(msg);
    }
    for (const auto* c : top) out.top.push_back(c->value);
    for (const auto* c : bottom) out.bottom.push_back(c->value);
    out.left = left->value;
    out.right = right->value;
    out.left_mode = left->mode.value_or("");
    out.right_mode = right->mode.value_or("");
    return out;
}

inline bool pattern_matches_tile(const AnchorPattern& pat, const Tile& t) {
    return pat.left_mode == t.mode && pat.right_mode == t.mode &&
           pat.top == t.top && pat.bottom == t.bottom && pat.left == t.left &&
           pat.right == t.right;
}

inline bool pattern_in_set(const AnchorPattern& pat, const TileSet& ts) {
    for (const auto& t : ts.tiles)
        if (pattern_matches_tile(pat, t)) return true;
    return false;
}

struct VerifyReport {
    struct Violation {
        std::string anchor;
        AnchorPattern pattern;
    };
    std::vector<Violation> violations;
    std::size_t anchors_checked = 0;

    bool ok() const { return violations.empty(); }
};

// Sorted unique source elements of a patch.
inline std::vector<std::string> patch_elements(const Patch& patch) {
    std::set<std::string> names;
    for (const auto& [key, color] : patch.edges) names.insert(key.first);
    return {names.begin(), names.end()};
}

// Checks every element whose full tile shape is colored; elements with
// missing edges do not constrain.
inline VerifyReport verify_patch(const Patch& patch, const TileSet& ts) {
    VerifyReport report;
    for (const auto& name : patch_elements(patch)) {
        NormalForm anchor = normalize(patch.group, name);
        AnchorPattern pat;
        try {
            pat = extract_pattern(patch, anchor);
        } catch (const IncompletePatternError&) {
            continue;
        }
        ++report.anchors_checked;
        if (!pattern_in_set(pat, ts)) report.violations.push_back({name, pat});
    }
    return report;
}

inline nlohmann::json patch_to_json(const Patch& patch) {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [key, color] : patch.edges) {
        nlohmann::json je;
        je["source"] = key.first;
        je["gen"] = std::string(1, key.second);
        je["color"] = format_rational(color.value);
        if (color.mode) je["mode"] = *color.mode;
        edges.push_back(std::move(je));
    }
    return nlohmann::json{{"group", {{"m", patch.group.m}, {"n", patch.group.n}}},
                          {"edges", std::move(edges)}};
}

inline std::string serialize_patch(const Patch& patch) {
    return patch_to_json(patch).dump(2) + "\n";
}

inline Patch patch_from_json(const nlohmann::json& j) {
    try {
        Patch patch;
        patch.group.m = j.at("group").at("m").get<int>();
        patch.group.n = j.at("group").at("n").get<int>();
        require_valid(patch.group);
        for (const auto& je : j.at("edges")) {
            std::string gen = je.at("gen").get<std::string>();
            if (gen != "a" && gen != "b")
                throw ParseError("patch edge generator must be 'a' or 'b'");
            // Keys are renormalized so that any word naming the element maps
            // to the same edge.
            std::string source =
                normalize(patch.group, je.at("source").get<std::string>()).str();
            EdgeColor color{parse_rational(je.at("color").get<std::string>()),
                            std::nullopt};
            if (je.contains("mode")) color.mode = je.at("mode").get<std::string>();
            if (gen == "b" && !color.mode)
                throw ParseError("b-edge at '" + source + "' is missing its mode");
            patch.edges[{source, gen[0]}] = std::move(color);
        }
        return patch;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("patch: ") + e.what());
    }
}

inline Patch parse_patch(const std::string& text) {
    try {
        return patch_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("patch: ") + e.what());
    }
}

} // namespace bstiles
