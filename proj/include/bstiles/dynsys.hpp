#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bstiles/rational.hpp"

namespace bstiles {

// Half-open/closed rational interval.
struct Interval {
    Rational lo;
    Rational hi;
    bool lo_open = false;
    bool hi_open = false;

    bool contains(const Rational& x) const {
        if (lo_open ? !(x > lo) : !(x >= lo)) return false;
        if (hi_open ? !(x < hi) : !(x <= hi)) return false;
        return true;
    }
};

struct Branch {
    Interval domain;
    Rational slope;
};

// A piecewise linear map x -> slope * x on a finite union of intervals.
struct PiecewiseLinearMap {
    std::vector<Branch> branches;

    const Branch* branch_containing(const Rational& x) const {
        for (const auto& b : branches)
            if (b.domain.contains(x)) return &b;
        return nullptr;
    }

    bool in_domain(const Rational& x) const { return branch_containing(x) != nullptr; }

    // (q*x, q) for the unique branch containing x.
    std::pair<Rational, Rational> apply(const Rational& x) const {
        const Branch* b = branch_containing(x);
        if (!b) throw DomainError("point " + format_rational(x) + " outside map domain");
        return {b->slope * x, b->slope};
    }
};

// T on [2/3, 2]: doubling on [2/3, 1], times 2/3 on ]1, 2]. The point 1
// belongs to the doubling branch.
inline PiecewiseLinearMap kari_map() {
    PiecewiseLinearMap t;
    t.branches.push_back({{Rational(2, 3), Rational(1), false, false}, Rational(2)});
    t.branches.push_back({{Rational(1), Rational(2), true, false}, Rational(2, 3)});
    return t;
}

inline std::pair<Rational, Rational> apply(const PiecewiseLinearMap& map, const Rational& x) {
    return map.apply(x);
}

// Finite window of a bi-infinite orbit: x_k for k_min <= k <= k_max and
// the multiplier q_k with x_k = q_k * x_{k-1} for k_min < k <= k_max.
// q at the window's lower end is unknown by construction.
class Orbit {
public:
    Orbit(long long k_min, std::vector<Rational> xs, std::vector<Rational> qs)
        : k_min_(k_min), xs_(std::move(xs)), qs_(std::move(qs)) {}

    long long k_min() const { return k_min_; }
    long long k_max() const { return k_min_ + static_cast<long long>(xs_.size()) - 1; }

    bool covers(long long k) const { return k >= k_min() && k <= k_max(); }

    const Rational& x_at(long long k) const {
        if (!covers(k))
            throw OrbitWindowError("orbit window does not cover height " + std::to_string(k));
        return xs_[static_cast<std::size_t>(k - k_min_)];
    }

    // Requires k_min < k <= k_max.
    const Rational& q_at(long long k) const {
        if (k <= k_min() || k > k_max())
            throw OrbitWindowError("orbit window has no multiplier at height " +
                                   std::to_string(k));
        return qs_[static_cast<std::size_t>(k - k_min_ - 1)];
    }

private:
    long long k_min_;
    std::vector<Rational> xs_; // x_{k_min} .. x_{k_max}
    std::vector<Rational> qs_; // q_{k_min+1} .. q_{k_max}
};

inline Orbit orbit_forward(const PiecewiseLinearMap& map, const Rational& x0,
                           long long steps) {
    if (!map.in_domain(x0))
        throw DomainError("orbit start " + format_rational(x0) + " outside map domain");
    std::vector<Rational> xs{x0};
    std::vector<Rational> qs;
    Rational x = x0;
    for (long long i = 0; i < steps; ++i) {
        auto [next, q] = map.apply(x);
        if (!map.in_domain(next))
            throw DomainError("orbit left the domain at " + format_rational(next));
        xs.push_back(next);
        qs.push_back(q);
        x = next;
    }
    return Orbit(0, std::move(xs), std::move(qs));
}

// Preimage choice when several branches could have produced x.
enum class BackwardPolicy {
    PreferHalving,     // try larger slopes first (undo doubling first)
    PreferThreeHalves, // try smaller slopes first
    FailIfAmbiguous,
};

namespace detail {

// Candidate preimages of x, one per branch whose interval admits x/slope,
// ordered by descending slope.
inline std::vector<std::pair<Rational, Rational>> preimages(const PiecewiseLinearMap& map,
                                                            const Rational& x) {
    std::vector<std::pair<Rational, Rational>> cands; // (x_{k-1}, q_k)
    for (const auto& b : map.branches) {
        Rational pre = x / b.slope;
        if (b.domain.contains(pre)) cands.emplace_back(pre, b.slope);
    }
    std::sort(cands.begin(), cands.end(),
              [](const auto& l, const auto& r) { return l.second > r.second; });
    return cands;
}

} // namespace detail

inline Orbit orbit_backward(const PiecewiseLinearMap& map, const Rational& x0,
                            long long steps,
                            BackwardPolicy policy = BackwardPolicy::PreferHalving) {
    if (!map.in_domain(x0))
        throw DomainError("orbit start " + format_rational(x0) + " outside map domain");
    std::vector<Rational> xs{x0}; // built back to front
    std::vector<Rational> qs;
    Rational x = x0;
    for (long long i = 0; i < steps; ++i) {
        auto cands = detail::preimages(map, x);
        if (cands.empty())
            throw NoPreimageError("no branch preimage for " + format_rational(x));
        if (policy == BackwardPolicy::FailIfAmbiguous && cands.size() > 1)
            throw NoPreimageError("ambiguous preimage for " + format_rational(x));
        auto chosen = (policy == BackwardPolicy::PreferThreeHalves) ? cands.back()
                                                                    : cands.front();
        xs.push_back(chosen.first);
        qs.push_back(chosen.second);
        x = chosen.first;
    }
    std::reverse(xs.begin(), xs.end());
    std::reverse(qs.begin(), qs.end());
    return Orbit(-steps, std::move(xs), std::move(qs));
}

// Backward then forward from x0; the usual way to cover a range of heights.
inline Orbit orbit_window(const PiecewiseLinearMap& map, const Rational& x0,
                          long long back, long long fwd,
                          BackwardPolicy policy = BackwardPolicy::PreferHalving) {
    Orbit b = orbit_backward(map, x0, back, policy);
    Orbit f = orbit_forward(map, x0, fwd);
    std::vector<Rational> xs, qs;
    for (long long k = b.k_min(); k <= 0; ++k) xs.push_back(b.x_at(k));
    for (long long k = 1; k <= f.k_max(); ++k) xs.push_back(f.x_at(k));
    for (long long k = b.k_min() + 1; k <= 0; ++k) qs.push_back(b.q_at(k));
    for (long long k = 1; k <= f.k_max(); ++k) qs.push_back(f.q_at(k));
    return Orbit(-back, std::move(xs), std::move(qs));
}

// Digits of the balanced representation of x with phase r:
// B_k = floor((r+k)x) - floor((r+k-1)x).
struct BalancedRepSpec {
    Rational x;
    Rational r;
};

inline BigInt balanced_digit(const BalancedRepSpec& spec, long long k) {
    return floor_rat((spec.r + k) * spec.x) - floor_rat((spec.r + k - 1) * spec.x);
}

// Average of B_{k_start+1} .. B_{k_start+length}.
inline Rational interval_average(const BalancedRepSpec& spec, long long k_start,
                                 long long length) {
    if (length < 1) throw ValidationError("window length must be positive");
    BigInt sum = 0;
    for (long long j = 1; j <= length; ++j) sum += balanced_digit(spec, k_start + j);
    return Rational(sum) / length;
}

// Orbit file format: a list of (k, x_k, q_k); the multiplier is absent at
// the window's lower end.
inline nlohmann::json orbit_to_json(const Orbit& orbit) {
    nlohmann::json points = nlohmann::json::array();
    for (long long k = orbit.k_min(); k <= orbit.k_max(); ++k) {
        nlohmann::json jp{{"k", k}, {"x", format_rational(orbit.x_at(k))}};
        if (k > orbit.k_min()) jp["q"] = format_rational(orbit.q_at(k));
        points.push_back(std::move(jp));
    }
    return nlohmann::json{{"points", std::move(points)}};
}

inline std::string serialize_orbit(const Orbit& orbit) {
    return orbit_to_json(orbit).dump(2) + "\n";
}

inline Orbit orbit_from_json(const nlohmann::json& j) {
    try {
        std::vector<std::pair<long long, std::pair<Rational, std::optional<Rational>>>> pts;
        for (const auto& jp : j.at("points")) {
            std::optional<Rational> q;
            if (jp.contains("q")) q = parse_rational(jp.at("q").get<std::string>());
            pts.push_back({jp.at("k").get<long long>(),
                           {parse_rational(jp.at("x").get<std::string>()), q}});
        }
        if (pts.empty()) throw ParseError("orbit needs at least one point");
        std::sort(pts.begin(), pts.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<Rational> xs, qs;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i > 0) {
                if (pts[i].first != pts[i - 1].first + 1)
                    throw ParseError("orbit heights must be consecutive");
                if (!pts[i].second.second)
                    throw ParseError("orbit point above the window bottom needs q");
                qs.push_back(*pts[i].second.second);
            }
            xs.push_back(pts[i].second.first);
        }
        return Orbit(pts.front().first, std::move(xs), std::move(qs));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("orbit: ") + e.what());
    }
}

inline Orbit parse_orbit(const std::string& text) {
    try {
        return orbit_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("orbit: ") + e.what());
    }
}

// Whether some multiset of at most N branch slopes multiplies to 1 - the
// slope-product obstruction to periodic points of a piecewise linear map.
inline bool has_periodic_point_upto(const PiecewiseLinearMap& map, long long budget) {
    if (budget < 1) throw ValidationError("budget must be positive");
    // Products of exactly k slopes, k = 1..budget, deduplicated per level.
    std::vector<Rational> level{Rational(1)};
    for (long long k = 1; k <= budget; ++k) {
        std::vector<Rational> next;
        for (const auto& prod : level)
            for (const auto& b : map.branches) next.push_back(prod * b.slope);
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        for (const auto& prod : next)
            if (prod == 1) return true;
        level = std::move(next);
    }
    return false;
}

} // namespace bstiles
