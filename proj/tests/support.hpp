#pragma once

// Test-side generators and independent reference computations.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "pinfix/closure.hpp"
#include "pinfix/fixture.hpp"
#include "pinfix/geometry.hpp"

namespace pinfix::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
inline int uniform_int(Rng& rng, int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); }

/// Convex polygon with vertices on a circle at sorted random angles.
inline std::vector<Vec2> random_convex_vertices(Rng& rng, int n, double radius) {
    std::vector<double> angles;
    while (true) {
        angles.clear();
        for (int i = 0; i < n; ++i) angles.push_back(uniform(rng, 0.0, 2.0 * std::numbers::pi));
        std::sort(angles.begin(), angles.end());
        double min_gap = 2.0 * std::numbers::pi - angles.back() + angles.front();
        for (int i = 1; i < n; ++i) min_gap = std::min(min_gap, angles[i] - angles[i - 1]);
        if (min_gap > 0.05) break;
    }
    std::vector<Vec2> v;
    for (const double a : angles) v.push_back({radius * std::cos(a), radius * std::sin(a)});
    return v;
}

/// Contacts on the edges of a random convex polygon, normals from the edges.
/// Some sets draw from only a few edges so that both verdicts occur.
inline ContactSet random_contact_set(Rng& rng) {
    const int n = uniform_int(rng, 3, 9);
    const auto v = random_convex_vertices(rng, n, uniform(rng, 5.0, 40.0));
    const Vec2 shift{uniform(rng, -50.0, 50.0), uniform(rng, -50.0, 50.0)};
    std::vector<int> edges(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) edges[static_cast<std::size_t>(i)] = i;
    std::shuffle(edges.begin(), edges.end(), rng);
    const int used = uniform_int(rng, 1, n);
    const int count = uniform_int(rng, 4, 30);
    ContactSet out;
    for (int k = 0; k < count; ++k) {
        const int e = edges[static_cast<std::size_t>(uniform_int(rng, 0, used - 1))];
        const Vec2 a = v[static_cast<std::size_t>(e)];
        const Vec2 b = v[static_cast<std::size_t>((e + 1) % n)];
        const double t = uniform(rng, 0.02, 0.98);
        const Vec2 normal = normalized(perp(b - a));  // inward for CCW vertices
        out.push_back({a + (b - a) * t + shift, normal, std::nullopt});
    }
    return out;
}

/// Signed distance by winding number and brute-force segment distances.
inline double reference_signed_distance(std::span<const Vec2> poly, Vec2 q) {
    double best = std::numeric_limits<double>::infinity();
    int winding = 0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = poly[i];
        const Vec2 b = poly[(i + 1) % n];
        const Vec2 ab = b - a;
        const double t = std::clamp(dot(q - a, ab) / dot(ab, ab), 0.0, 1.0);
        best = std::min(best, std::hypot(q.x - a.x - ab.x * t, q.y - a.y - ab.y * t));
        const double side = cross(ab, q - a);
        if (a.y <= q.y && b.y > q.y && side > 0) ++winding;
        if (a.y > q.y && b.y <= q.y && side < 0) --winding;
    }
    return winding != 0 ? -best : best;
}

/// Elastic energy from first principles for a polygon part and fixed pin points.
inline double reference_energy(std::span<const Vec2> local_poly, const Pose2& pose, const std::vector<Vec2>& pins,
                               double k) {
    std::vector<Vec2> world;
    for (const auto& v : local_poly) world.push_back(pose.apply(v));
    double e = 0.0;
    for (const auto& q : pins) {
        const double sd = reference_signed_distance(world, q);
        if (sd < 0.0) e += 0.5 * k * sd * sd;
    }
    return e;
}

struct GridSearchResult {
    Pose2 pose;
    double energy = std::numeric_limits<double>::infinity();
};

/// Exhaustive pose search on a regular lattice of (dx, dy, dtheta): a 0.25 mm /
/// 0.025 rad pass over the whole region, then a 0.05 mm / 0.005 rad pass around
/// each of the `refine` lowest coarse cells.
inline GridSearchResult grid_search_settle(std::span<const Vec2> local_poly, const Pose2& initial,
                                           const std::vector<Vec2>& pins, double k, double max_shift,
                                           double max_turn, int refine = 8) {
    struct Cell {
        Vec2 d;
        double th = 0.0;
        double energy = 0.0;
    };
    auto scan = [&](Vec2 c, double turn_c, double half, double half_turn, double step, double turn_step,
                    std::vector<Cell>& out) {
        const int nx = static_cast<int>(std::round(half / step));
        const int nt = static_cast<int>(std::round(half_turn / turn_step));
        for (int i = -nx; i <= nx; ++i)
            for (int j = -nx; j <= nx; ++j) {
                // Lattice points beyond the region limits are clipped onto the limit, so
                // the search covers the same closed region as the minimizer.
                Vec2 d = c + Vec2{i * step, j * step};
                if (norm(d) > max_shift) d = d * (max_shift / norm(d));
                for (int t = -nt; t <= nt; ++t) {
                    const double th = std::clamp(turn_c + t * turn_step, -max_turn, max_turn);
                    const Pose2 p{initial.translation + d, initial.rotation + th};
                    out.push_back({d, th, reference_energy(local_poly, p, pins, k)});
                }
            }
    };
    std::vector<Cell> coarse;
    scan({}, 0.0, max_shift, max_turn, 0.25, 0.025, coarse);
    const auto n = std::min<std::size_t>(coarse.size(), static_cast<std::size_t>(refine));
    std::partial_sort(coarse.begin(), coarse.begin() + static_cast<std::ptrdiff_t>(n), coarse.end(),
                      [](const Cell& a, const Cell& b) { return a.energy < b.energy; });
    GridSearchResult best;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<Cell> fine;
        scan(coarse[i].d, coarse[i].th, 0.5, 0.05, 0.05, 0.005, fine);
        for (const auto& c : fine)
            if (c.energy < best.energy) best = {Pose2{initial.translation + c.d, initial.rotation + c.th}, c.energy};
    }
    return best;
}

}  // namespace pinfix::testing
