#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bstiles/coloring.hpp"
#include "bstiles/projection.hpp"

namespace bstiles {

namespace detail {

struct SceneVertex {
    std::string name;
    Rational x; // alpha * scale
    Rational y; // beta * scale (screen-down)
};

struct SceneEdge {
    std::string from;
    std::string to;
    char gen = 'a';
    std::string label;
};

struct Scene {
    std::vector<SceneVertex> vertices; // sorted by name
    std::vector<SceneEdge> edges;      // sorted by (from, gen)
};

inline std::string display_name(const std::string& word) {
    return word.empty() ? "\xCE\xB5" : word; // identity prints as epsilon
}

inline Scene scene_from_region(GroupParams p, const std::vector<NormalForm>& elements) {
    Scene scene;
    std::map<std::string, PlanePoint> pts;
    for (const auto& g : elements) pts[g.str()] = project(p, g);
    for (const auto& [name, pt] : pts)
        scene.vertices.push_back({name, pt.alpha, Rational(pt.beta)});
    for (const auto& g : elements) {
        for (char gen : {'a', 'b'}) {
            NormalForm h = g;
            h.append_letter(gen == 'a' ? Letter{Gen::A, false} : Letter{Gen::B, false});
            if (pts.count(h.str()))
                scene.edges.push_back({g.str(), h.str(), gen, std::string(1, gen)});
        }
    }
    std::sort(scene.edges.begin(), scene.edges.end(),
              [](const SceneEdge& a, const SceneEdge& b) {
                  return std::tie(a.from, a.gen) < std::tie(b.from, b.gen);
              });
    return scene;
}

inline Scene scene_from_patch(const Patch& patch) {
    GroupParams p = patch.group;
    Scene scene;
    std::map<std::string, PlanePoint> pts;
    auto note = [&](const NormalForm& g) {
        std::string name = g.str();
        if (!pts.count(name)) pts[name] = project(p, g);
        return name;
    };
    for (const auto& [key, color] : patch.edges) {
        NormalForm g = normalize(p, key.first);
        NormalForm h = g;
        h.append_letter(key.second == 'a' ? Letter{Gen::A, false} : Letter{Gen::B, false});
        std::string label = format_rational(color.value);
        if (color.mode) label += " [" + *color.mode + "]";
        scene.edges.push_back({note(g), note(h), key.second, std::move(label)});
    }
    for (const auto& [name, pt] : pts)
        scene.vertices.push_back({name, pt.alpha, Rational(pt.beta)});
    std::sort(scene.edges.begin(), scene.edges.end(),
              [](const SceneEdge& a, const SceneEdge& b) {
                  return std::tie(a.from, a.gen) < std::tie(b.from, b.gen);
              });
    return scene;
}

inline std::string dot_from_scene(const Scene& scene, int scale) {
    std::string out = "digraph bstiles {\n  node [shape=circle fontsize=10];\n";
    for (const auto& v : scene.vertices) {
        out += "  \"" + display_name(v.name) + "\" [pos=\"" +
               format_decimal(v.x * scale) + "," + format_decimal(-v.y * scale) +
               "!\"];\n";
    }
    for (const auto& e : scene.edges) {
        out += "  \"" + display_name(e.from) + "\" -> \"" + display_name(e.to) +
               "\" [label=\"" + e.label + "\"];\n";
    }
    out += "}\n";
    return out;
}

inline std::string svg_from_scene(const Scene& scene, int scale) {
    if (scene.vertices.empty())
        return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"80\" "
               "height=\"80\"></svg>\n";
    Rational min_x = scene.vertices[0].x, max_x = min_x;
    Rational min_y = scene.vertices[0].y, max_y = min_y;
    for (const auto& v : scene.vertices) {
        min_x = std::min(min_x, v.x);
        max_x = std::max(max_x, v.x);
        min_y = std::min(min_y, v.y);
        max_y = std::max(max_y, v.y);
    }
    const int margin = 40;
    auto sx = [&](const Rational& x) {
        return format_decimal((x - min_x) * scale + margin);
    };
    auto sy = [&](const Rational& y) {
        return format_decimal((y - min_y) * scale + margin);
    };
    std::string width = format_decimal((max_x - min_x) * scale + 2 * margin);
    std::string height = format_decimal((max_y - min_y) * scale + 2 * margin);
    std::map<std::string, const SceneVertex*> by_name;
    for (const auto& v : scene.vertices) by_name[v.name] = &v;
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + width +
                      "\" height=\"" + height + "\">\n";
    for (const auto& e : scene.edges) {
        const auto* f = by_name.at(e.from);
        const auto* t = by_name.at(e.to);
        out += "  <line x1=\"" + sx(f->x) + "\" y1=\"" + sy(f->y) + "\" x2=\"" +
               sx(t->x) + "\" y2=\"" + sy(t->y) +
               "\" stroke=\"black\" stroke-width=\"1\"/>\n";
        Rational mx = (f->x + t->x) / 2, my = (f->y + t->y) / 2;
        out += "  <text x=\"" + sx(mx) + "\" y=\"" + sy(my) +
               "\" font-size=\"10\" fill=\"blue\" dy=\"-3\">" + e.label + "</text>\n";
    }
    for (const auto& v : scene.vertices) {
        out += "  <circle cx=\"" + sx(v.x) + "\" cy=\"" + sy(v.y) +
               "\" r=\"3\" fill=\"black\"/>\n";
        out += "  <text x=\"" + sx(v.x) + "\" y=\"" + sy(v.y) +
               "\" font-size=\"9\" fill=\"gray\" dx=\"4\" dy=\"10\">" +
               display_name(v.name) + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

} // namespace detail

// Vertices sit at their plane projection: x = alpha, y grows downward
// with the height beta. Output bytes are deterministic for fixed input.
inline std::string render_dot(GroupParams p, const std::vector<NormalForm>& elements,
                              int scale = 60) {
    return detail::dot_from_scene(detail::scene_from_region(p, elements), scale);
}

inline std::string render_dot(const Patch& patch, int scale = 60) {
    return detail::dot_from_scene(detail::scene_from_patch(patch), scale);
}

inline std::string render_svg(GroupParams p, const std::vector<NormalForm>& elements,
                              int scale = 60) {
    return detail::svg_from_scene(detail::scene_from_region(p, elements), scale);
}

inline std::string render_svg(const Patch& patch, int scale = 60) {
    return detail::svg_from_scene(detail::scene_from_patch(patch), scale);
}

} // namespace bstiles
