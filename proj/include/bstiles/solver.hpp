#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <future>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "bstiles/coloring.hpp"
#include "bstiles/group.hpp"
#include "bstiles/tiles.hpp"

namespace bstiles {

// A finite set of group elements. Edge variables are the (element,
// generator) pairs with the element in the set; the anchors are the
// elements whose whole tile shape has its edge sources inside.
struct Region {
    GroupParams group;
    std::vector<NormalForm> elements; // sorted by normal-form string

    std::size_t size() const { return elements.size(); }
};

inline Region region_ball(GroupParams p, int r) { return {p, ball(p, r)}; }

// `levels` consecutive heights starting at the identity's level, `width`
// consecutive elements per level. Row t+1 is reached from row t through
// the successor sheet at column `sheet_column` (one of the n sheets).
inline Region region_slab(GroupParams p, int width, int levels, int sheet_column = 0) {
    require_valid(p);
    if (width < 1 || levels < 1) throw ValidationError("slab extents must be positive");
    if (sheet_column < 0 || sheet_column >= p.n)
        throw ValidationError("sheet column must lie in [0, n)");
    std::vector<NormalForm> elems;
    NormalForm row_start(p);
    for (int t = 0; t < levels; ++t) {
        NormalForm g = row_start;
        for (int j = 0; j < width; ++j) {
            elems.push_back(g);
            g.append_a(1);
        }
        row_start.append_a(sheet_column);
        row_start.append_b(true);
    }
    std::sort(elems.begin(), elems.end(), [](const NormalForm& x, const NormalForm& y) {
        return x.str() < y.str();
    });
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    return {p, std::move(elems)};
}

// Elements of the region whose full tile shape lies inside: g with
// g a^i (i <= m), g b a^j (j < n) all in the region.
inline std::vector<NormalForm> region_anchors(const Region& region) {
    std::set<std::string> names;
    for (const auto& g : region.elements) names.insert(g.str());
    std::vector<NormalForm> anchors;
    for (const auto& g : region.elements) {
        bool ok = true;
        NormalForm walk = g;
        for (int i = 1; i <= region.group.m && ok; ++i) {
            walk.append_a(1);
            ok = names.count(walk.str()) > 0;
        }
        NormalForm top = g;
        top.append_b(false);
        for (int j = 0; j < region.group.n && ok; ++j) {
            ok = names.count(top.str()) > 0;
            top.append_a(1);
        }
        if (ok) anchors.push_back(g);
    }
    return anchors;
}

enum class SolveStatus { Sat, Unsat, BudgetExhausted };

struct SolveStats {
    std::uint64_t nodes = 0;        // value assignments tried
    std::uint64_t propagations = 0; // anchor-constraint passes
    double wall_ms = 0.0;
};

struct SolverConfig {
    enum class VarOrder { MinRemainingValues, Lexicographic };
    enum class ValueOrder { Ascending, PreferHint };

    VarOrder var_order = VarOrder::MinRemainingValues;
    ValueOrder value_order = ValueOrder::Ascending;
    bool deterministic = true; // forces sequential search with full tie order
    std::uint64_t node_budget = 10'000'000;
    bool parallel = false;            // only honored when deterministic is off
    const Patch* hint = nullptr;      // color preferences for PreferHint
};

struct SolveOutcome {
    SolveStatus status = SolveStatus::Unsat;
    std::optional<Patch> witness;
    SolveStats stats;
};

namespace detail {

// Tiles and colors reduced to dense integer ids. Variables alternate
// (element, a) and (element, b); colors of the two kinds are interned
// separately, in ascending order so that value id order is color order.
struct CoreTile {
    std::vector<int> top;
    std::vector<int> bottom;
    int left = 0;
    int right = 0;
};

struct CoreProblem {
    int m = 0, n = 0;
    int num_a_colors = 0;
    int num_b_colors = 0;
    std::vector<CoreTile> tiles;
};

struct CoreAnchor {
    // Variable indices by role: first n tops, then m bottoms, then left,
    // then right.
    std::vector<int> vars;
};

class CoreSolver {
public:
    CoreSolver(const Region& region, const CoreProblem& problem)
        : problem_(problem) {
        const GroupParams p = region.group;
        std::map<std::string, int> elem_index;
        for (const auto& g : region.elements) {
            int idx = static_cast<int>(names_.size());
            names_.push_back(g.str());
            elem_index[names_.back()] = idx;
        }
        num_vars_ = static_cast<int>(names_.size()) * 2;
        auto var_of = [&](const std::string& name, char gen) -> int {
            auto it = elem_index.find(name);
            if (it == elem_index.end()) return -1;
            return it->second * 2 + (gen == 'b' ? 1 : 0);
        };
        for (const auto& g : region_anchors(region)) {
            CoreAnchor anchor;
            NormalForm top = g;
            top.append_b(false);
            for (int j = 0; j < p.n; ++j) {
                anchor.vars.push_back(var_of(top.str(), 'a'));
                top.append_a(1);
            }
            NormalForm walk = g;
            for (int i = 0; i < p.m; ++i) {
                anchor.vars.push_back(var_of(walk.str(), 'a'));
                walk.append_a(1);
            }
            anchor.vars.push_back(var_of(g.str(), 'b'));
            anchor.vars.push_back(var_of(walk.str(), 'b'));
            anchors_.push_back(std::move(anchor));
        }
        var_anchors_.assign(num_vars_, {});
        for (std::size_t ai = 0; ai < anchors_.size(); ++ai)
            for (int v : anchors_[ai].vars) var_anchors_[v].push_back(static_cast<int>(ai));
        domains_.resize(num_vars_);
        domain_size_.assign(num_vars_, 0);
        for (int v = 0; v < num_vars_; ++v) {
            int count = is_b_var(v) ? problem_.num_b_colors : problem_.num_a_colors;
            domains_[v].assign(static_cast<std::size_t>(count), 1);
            domain_size_[v] = count;
        }
    }

    bool is_b_var(int v) const { return (v & 1) != 0; }
    int element_of(int v) const { return v / 2; }
    const std::string& name_of(int v) const { return names_[static_cast<std::size_t>(v / 2)]; }

    int tile_color(const CoreTile& t, std::size_t role) const {
        std::size_t n = static_cast<std::size_t>(problem_.n);
        std::size_t m = static_cast<std::size_t>(problem_.m);
        if (role < n) return t.top[role];
        if (role < n + m) return t.bottom[role - n];
        return role == n + m ? t.left : t.right;
    }

    // Single GAC pass over one anchor. Returns false on a domain wipeout.
    bool revise_anchor(int ai, std::vector<int>& changed_vars) {
        const CoreAnchor& anchor = anchors_[static_cast<std::size_t>(ai)];
        std::size_t arity = anchor.vars.size();
        support_.assign(arity, {});
        for (std::size_t r = 0; r < arity; ++r)
            support_[r].assign(domains_[anchor.vars[r]].size(), 0);
        for (const auto& tile : problem_.tiles) {
            bool alive = true;
            for (std::size_t r = 0; r < arity && alive; ++r)
                alive = domains_[anchor.vars[r]]
                                [static_cast<std::size_t>(tile_color(tile, r))] != 0;
            if (!alive) continue;
            for (std::size_t r = 0; r < arity; ++r)
                support_[r][static_cast<std::size_t>(tile_color(tile, r))] = 1;
        }
        for (std::size_t r = 0; r < arity; ++r) {
            int v = anchor.vars[r];
            bool shrunk = false;
            auto& dom = domains_[v];
            for (std::size_t c = 0; c < dom.size(); ++c) {
                if (dom[c] && !support_[r][c]) {
                    dom[c] = 0;
                    --domain_size_[v];
                    trail_.emplace_back(v, static_cast<int>(c));
                    shrunk = true;
                }
            }
            if (domain_size_[v] == 0) return false;
            if (shrunk) changed_vars.push_back(v);
        }
        return true;
    }

    bool propagate(std::vector<int> dirty_anchors, SolveStats& stats) {
        std::vector<char> queued(anchors_.size(), 0);
        std::vector<int> queue = std::move(dirty_anchors);
        for (int ai : queue) queued[static_cast<std::size_t>(ai)] = 1;
        std::size_t head = 0;
        while (head < queue.size()) {
            int ai = queue[head++];
            queued[static_cast<std::size_t>(ai)] = 0;
            if (head > 4096 && head * 2 > queue.size()) {
                queue.erase(queue.begin(), queue.begin() + static_cast<long>(head));
                head = 0;
            }
            ++stats.propagations;
            std::vector<int> changed;
            if (!revise_anchor(ai, changed)) return false;
            for (int v : changed)
                for (int other : var_anchors_[v])
                    if (!queued[static_cast<std::size_t>(other)]) {
                        queued[static_cast<std::size_t>(other)] = 1;
                        queue.push_back(other);
                    }
        }
        return true;
    }

    std::size_t trail_mark() const { return trail_.size(); }

    void undo_to(std::size_t mark) {
        while (trail_.size() > mark) {
            auto [v, c] = trail_.back();
            trail_.pop_back();
            domains_[v][static_cast<std::size_t>(c)] = 1;
            ++domain_size_[v];
        }
    }

    // Removes all values but `value` from var's domain.
    void assign(int v, int value) {
        auto& dom = domains_[v];
        for (std::size_t c = 0; c < dom.size(); ++c) {
            if (dom[c] && static_cast<int>(c) != value) {
                dom[c] = 0;
                --domain_size_[v];
                trail_.emplace_back(v, static_cast<int>(c));
            }
        }
    }

    // Search variables: those touched by at least one anchor.
    std::vector<int> constrained_vars() const {
        std::vector<int> vars;
        for (int v = 0; v < num_vars_; ++v)
            if (!var_anchors_[v].empty()) vars.push_back(v);
        return vars;
    }

    int pick_var(const std::vector<int>& vars, SolverConfig::VarOrder order) const {
        int best = -1;
        for (int v : vars) {
            if (domain_size_[v] <= 1) continue;
            if (best == -1) {
                best = v;
                continue;
            }
            if (order == SolverConfig::VarOrder::MinRemainingValues) {
                if (domain_size_[v] < domain_size_[best]) best = v;
                // Ties fall through to the index order below.
                else if (domain_size_[v] == domain_size_[best] && var_key_less(v, best))
                    best = v;
            } else if (var_key_less(v, best)) {
                best = v;
            }
        }
        return best;
    }

    // Lexicographic on (element name, generator), a before b.
    bool var_key_less(int x, int y) const {
        const std::string& nx = name_of(x);
        const std::string& ny = name_of(y);
        if (nx != ny) return nx < ny;
        return !is_b_var(x) && is_b_var(y);
    }

    std::vector<int> ordered_values(int v, const SolverConfig& cfg,
                                    const std::vector<int>& hint_values) const {
        std::vector<int> values;
        const auto& dom = domains_[v];
        for (std::size_t c = 0; c < dom.size(); ++c)
            if (dom[c]) values.push_back(static_cast<int>(c));
        if (cfg.value_order == SolverConfig::ValueOrder::PreferHint && !hint_values.empty()) {
            int preferred = hint_values[static_cast<std::size_t>(v)];
            auto it = std::find(values.begin(), values.end(), preferred);
            if (it != values.end()) std::rotate(values.begin(), it, it + 1);
        }
        return values;
    }

    enum class SearchResult { Sat, Unsat, Budget };

    SearchResult search(const std::vector<int>& vars, const SolverConfig& cfg,
                        const std::vector<int>& hint_values, SolveStats& stats) {
        int v = pick_var(vars, cfg.var_order);
        if (v == -1) return SearchResult::Sat; // every constrained var is singleton
        for (int value : ordered_values(v, cfg, hint_values)) {
            if (stats.nodes >= cfg.node_budget) return SearchResult::Budget;
            ++stats.nodes;
            std::size_t mark = trail_mark();
            assign(v, value);
            if (propagate(var_anchors_[v], stats)) {
                SearchResult r = search(vars, cfg, hint_values, stats);
                if (r != SearchResult::Unsat) return r;
            }
            undo_to(mark);
        }
        return SearchResult::Unsat;
    }

    const std::vector<std::vector<std::uint8_t>>& domains() const { return domains_; }
    const std::vector<std::string>& names() const { return names_; }
    int num_vars() const { return num_vars_; }
    const std::vector<CoreAnchor>& anchors() const { return anchors_; }
    const std::vector<std::vector<int>>& var_anchors() const { return var_anchors_; }
    int domain_size(int v) const { return domain_size_[v]; }

    int first_value(int v) const {
        const auto& dom = domains_[v];
        for (std::size_t c = 0; c < dom.size(); ++c)
            if (dom[c]) return static_cast<int>(c);
        return -1;
    }

    // Value to emit in a witness: the assigned value, or the hint when the
    // variable was never constrained to a single color.
    int materialize_value(int v, const std::vector<int>& hint_values) const {
        if (domain_size_[v] > 1 && !hint_values.empty()) {
            int h = hint_values[static_cast<std::size_t>(v)];
            if (h >= 0 && h < static_cast<int>(domains_[v].size()) &&
                domains_[v][static_cast<std::size_t>(h)])
                return h;
        }
        return first_value(v);
    }

private:
    const CoreProblem& problem_;
    std::vector<std::string> names_;
    int num_vars_ = 0;
    std::vector<CoreAnchor> anchors_;
    std::vector<std::vector<int>> var_anchors_;
    std::vector<std::vector<std::uint8_t>> domains_;
    std::vector<int> domain_size_;
    std::vector<std::pair<int, int>> trail_;
    std::vector<std::vector<std::uint8_t>> support_;
};

struct CoreOutcome {
    SolveStatus status = SolveStatus::Unsat;
    std::vector<int> assignment; // per var, -1 when absent
    SolveStats stats;
};

inline CoreOutcome core_solve_sequential(const Region& region, const CoreProblem& problem,
                                         const SolverConfig& cfg,
                                         const std::vector<int>& hint_values) {
    CoreSolver solver(region, problem);
    CoreOutcome out;
    auto t0 = std::chrono::steady_clock::now();
    auto finish = [&](SolveStatus status) {
        out.status = status;
        out.stats.wall_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        return out;
    };
    if ((problem.num_a_colors == 0 || problem.num_b_colors == 0) &&
        !solver.constrained_vars().empty())
        return finish(SolveStatus::Unsat);
    std::vector<int> all_anchors(solver.anchors().size());
    for (std::size_t i = 0; i < all_anchors.size(); ++i) all_anchors[i] = static_cast<int>(i);
    if (!solver.propagate(all_anchors, out.stats)) return finish(SolveStatus::Unsat);
    auto vars = solver.constrained_vars();
    auto r = solver.search(vars, cfg, hint_values, out.stats);
    if (r == CoreSolver::SearchResult::Budget) return finish(SolveStatus::BudgetExhausted);
    if (r == CoreSolver::SearchResult::Unsat) return finish(SolveStatus::Unsat);
    out.assignment.assign(static_cast<std::size_t>(solver.num_vars()), -1);
    for (int v = 0; v < solver.num_vars(); ++v)
        out.assignment[v] = solver.materialize_value(v, hint_values);
    return finish(SolveStatus::Sat);
}

// Optional root-level value splitting. Only the SAT/UNSAT status is
// guaranteed to match the sequential search; witnesses may differ.
inline CoreOutcome core_solve_parallel(const Region& region, const CoreProblem& problem,
                                       const SolverConfig& cfg,
                                       const std::vector<int>& hint_values) {
    CoreSolver probe(region, problem);
    SolveStats root_stats;
    auto t0 = std::chrono::steady_clock::now();
    std::vector<int> all_anchors(probe.anchors().size());
    for (std::size_t i = 0; i < all_anchors.size(); ++i) all_anchors[i] = static_cast<int>(i);
    CoreOutcome out;
    auto finish = [&](SolveStatus status) {
        out.status = status;
        out.stats.wall_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        return out;
    };
    out.stats = root_stats;
    if (!probe.propagate(all_anchors, out.stats)) return finish(SolveStatus::Unsat);
    auto vars = probe.constrained_vars();
    int v = probe.pick_var(vars, cfg.var_order);
    if (v == -1) {
        out.assignment.assign(static_cast<std::size_t>(probe.num_vars()), -1);
        for (int w = 0; w < probe.num_vars(); ++w)
            out.assignment[w] = probe.materialize_value(w, hint_values);
        return finish(SolveStatus::Sat);
    }
    auto values = probe.ordered_values(v, cfg, hint_values);
    std::uint64_t per_budget = cfg.node_budget / std::max<std::size_t>(1, values.size());
    std::vector<std::future<CoreOutcome>> futures;
    for (int value : values) {
        futures.push_back(std::async(std::launch::async, [&, value] {
                CoreSolver worker(region, problem);
                CoreOutcome sub;
                std::vector<int> roots(worker.anchors().size());
                for (std::size_t i = 0; i < roots.size(); ++i) roots[i] = static_cast<int>(i);
                if (!worker.propagate(roots, sub.stats)) {
                    sub.status = SolveStatus::Unsat;
                    return sub;
                }
                worker.assign(v, value);
                ++sub.stats.nodes;
                SolverConfig sub_cfg = cfg;
                sub_cfg.node_budget = std::max<std::uint64_t>(1, per_budget);
                if (!worker.propagate(worker.var_anchors()[v], sub.stats)) {
                    sub.status = SolveStatus::Unsat;
                    return sub;
                }
                auto worker_vars = worker.constrained_vars();
                auto r = worker.search(worker_vars, sub_cfg, hint_values, sub.stats);
                if (r == CoreSolver::SearchResult::Budget)
                    sub.status = SolveStatus::BudgetExhausted;
                else if (r == CoreSolver::SearchResult::Unsat)
                    sub.status = SolveStatus::Unsat;
                else {
                    sub.status = SolveStatus::Sat;
                    sub.assignment.assign(static_cast<std::size_t>(worker.num_vars()), -1);
                    for (int w = 0; w < worker.num_vars(); ++w)
                        sub.assignment[w] = worker.materialize_value(w, hint_values);
                }
                return sub;
            }));
    }
    bool budget_hit = false;
    std::optional<CoreOutcome> sat;
    for (auto& f : futures) {
        CoreOutcome sub = f.get();
        out.stats.nodes += sub.stats.nodes;
        out.stats.propagations += sub.stats.propagations;
        if (sub.status == SolveStatus::Sat && !sat) sat = std::move(sub);
        if (sub.status == SolveStatus::BudgetExhausted) budget_hit = true;
    }
    if (sat) {
        out.assignment = std::move(sat->assignment);
        return finish(SolveStatus::Sat);
    }
    return finish(budget_hit ? SolveStatus::BudgetExhausted : SolveStatus::Unsat);
}

inline CoreOutcome core_solve(const Region& region, const CoreProblem& problem,
                              const SolverConfig& cfg, const std::vector<int>& hint_values) {
    if (!cfg.deterministic && cfg.parallel)
        return core_solve_parallel(region, problem, cfg, hint_values);
    return core_solve_sequential(region, problem, cfg, hint_values);
}

} // namespace detail

// Decides whether the region can be edge-colored so that every complete
// anchor shows a pattern of the tile set. SAT outcomes carry a witness
// patch; UNSAT is reported only after exhaustive refutation.
inline SolveOutcome solve(const Region& region, const TileSet& ts,
                          const SolverConfig& cfg = {}) {
    // Intern colors in ascending order; ids then double as value order.
    std::set<Rational> a_color_set;
    std::set<std::pair<Rational, std::string>> b_color_set;
    for (const auto& t : ts.tiles) {
        for (const auto& c : t.top) a_color_set.insert(c);
        for (const auto& c : t.bottom) a_color_set.insert(c);
        b_color_set.insert({t.left, t.mode});
        b_color_set.insert({t.right, t.mode});
    }
    std::vector<Rational> a_colors(a_color_set.begin(), a_color_set.end());
    std::vector<std::pair<Rational, std::string>> b_colors(b_color_set.begin(),
                                                           b_color_set.end());
    auto a_id = [&](const Rational& c) {
        return static_cast<int>(std::lower_bound(a_colors.begin(), a_colors.end(), c) -
                                a_colors.begin());
    };
    auto b_id = [&](const Rational& c, const std::string& mode) {
        auto key = std::make_pair(c, mode);
        return static_cast<int>(std::lower_bound(b_colors.begin(), b_colors.end(), key) -
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
        ct.left = b_id(t.left, t.mode);
        ct.right = b_id(t.right, t.mode);
        problem.tiles.push_back(std::move(ct));
    }
    // Distinct tiles can intern to the same colored pattern (branch ids do
    // not color edges); duplicates only slow the support scan.
    std::sort(problem.tiles.begin(), problem.tiles.end(),
              [](const detail::CoreTile& x, const detail::CoreTile& y) {
                  return std::tie(x.top, x.bottom, x.left, x.right) <
                         std::tie(y.top, y.bottom, y.left, y.right);
              });
    problem.tiles.erase(std::unique(problem.tiles.begin(), problem.tiles.end(),
                                    [](const detail::CoreTile& x, const detail::CoreTile& y) {
                                        return x.top == y.top && x.bottom == y.bottom &&
                                               x.left == y.left && x.right == y.right;
                                    }),
                        problem.tiles.end());

    // Hint colors mapped to value ids, -1 where absent.
    std::vector<int> hint_values;
    if (cfg.value_order == SolverConfig::ValueOrder::PreferHint && cfg.hint) {
        hint_values.assign(region.elements.size() * 2, -1);
        for (std::size_t i = 0; i < region.elements.size(); ++i) {
            const std::string name = region.elements[i].str();
            if (auto it = cfg.hint->edges.find({name, 'a'}); it != cfg.hint->edges.end()) {
                if (a_color_set.count(it->second.value))
                    hint_values[i * 2] = a_id(it->second.value);
            }
            if (auto it = cfg.hint->edges.find({name, 'b'}); it != cfg.hint->edges.end()) {
                auto key = std::make_pair(it->second.value, it->second.mode.value_or(""));
                if (b_color_set.count(key)) hint_values[i * 2 + 1] = b_id(key.first, key.second);
            }
        }
    }

    detail::CoreOutcome core = detail::core_solve(region, problem, cfg, hint_values);
    SolveOutcome out;
    out.status = core.status;
    out.stats = core.stats;
    if (core.status == SolveStatus::Sat) {
        Patch witness{region.group, {}};
        for (std::size_t i = 0; i < region.elements.size(); ++i) {
            const std::string name = region.elements[i].str();
            int av = core.assignment[i * 2];
            int bv = core.assignment[i * 2 + 1];
            witness.edges[{name, 'a'}] = {a_colors[static_cast<std::size_t>(av)],
                                          std::nullopt};
            const auto& bc = b_colors[static_cast<std::size_t>(bv)];
            witness.edges[{name, 'b'}] = {bc.first, bc.second};
        }
        out.witness = std::move(witness);
    }
    return out;
}

// Left translation of a patch: the color of (g, gen) in the result is the
// color of (h*g, gen) in the input.
inline Patch shift_patch(GroupParams p, const Patch& patch, const NormalForm& h) {
    NormalForm h_inv = invert(p, h);
    Patch out{p, {}};
    for (const auto& [key, color] : patch.edges) {
        NormalForm g = multiply(p, h_inv, normalize(p, key.first));
        out.edges[{g.str(), key.second}] = color;
    }
    return out;
}

// Necessary-condition probe for h being a period: the patch and its
// h-shift agree wherever both are defined. Not a proof of global
// periodicity, which no finite patch can give.
inline bool is_period_on(const Patch& patch, const NormalForm& h) {
    GroupParams p = patch.group;
    for (const auto& [key, color] : patch.edges) {
        NormalForm shifted = multiply(p, h, normalize(p, key.first));
        auto it = patch.edges.find({shifted.str(), key.second});
        if (it != patch.edges.end() && !(it->second == color)) return false;
    }
    return true;
}

} // namespace bstiles
