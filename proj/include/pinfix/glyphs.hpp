#pragma once

// Cross-sections of the test parts: block letters with a 15 mm stroke, chord
// approximated cylinders and the prism/pillar bottoms used in the distance study.

#include <cmath>
#include <numbers>
#include <string_view>
#include <vector>

#include "pinfix/geometry.hpp"

namespace pinfix::glyphs {

inline constexpr double stroke = 15.0;
inline constexpr double letter_height = 75.0;

namespace detail {

inline double deg(double d) { return d * std::numbers::pi / 180.0; }

/// Points on an arc from a0 to a1 (radians), both ends included.
inline void arc(std::vector<Vec2>& out, double r, double a0, double a1, int segments) {
    for (int i = 0; i <= segments; ++i) {
        const double a = a0 + (a1 - a0) * i / segments;
        out.push_back({r * std::cos(a), r * std::sin(a)});
    }
}

inline PartShape centered(std::vector<Vec2> v) {
    Vec2 lo = v.front();
    Vec2 hi = v.front();
    for (const auto& p : v) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    const Vec2 mid = (lo + hi) * 0.5;
    for (auto& p : v) p -= mid;
    return PartShape::polygon(std::move(v));
}

}  // namespace detail

inline PartShape letter_l() {
    return detail::centered({{0, 0}, {50, 0}, {50, stroke}, {stroke, stroke}, {stroke, letter_height}, {0, letter_height}});
}

inline PartShape letter_t() {
    const double w = 60.0;
    const double x0 = (w - stroke) / 2.0;
    const double y0 = letter_height - stroke;
    return detail::centered({{x0, 0}, {x0 + stroke, 0}, {x0 + stroke, y0}, {w, y0}, {w, letter_height},
                             {0, letter_height}, {0, y0}, {x0, y0}});
}

/// Two crossing diagonal strokes: a plus sign turned by 45 degrees.
inline PartShape letter_x() {
    const double a = 40.0;
    const double h = stroke / 2.0;
    std::vector<Vec2> v{{a, -h}, {a, h}, {h, h}, {h, a}, {-h, a}, {-h, h},
                        {-a, h}, {-a, -h}, {-h, -h}, {-h, -a}, {h, -a}, {h, -h}};
    for (auto& p : v) p = rotate(p, std::numbers::pi / 4.0);
    return PartShape::polygon(std::move(v));
}

inline PartShape letter_f() {
    const double top = letter_height - stroke;
    return detail::centered({{0, 0}, {stroke, 0}, {stroke, 30}, {40, 30}, {40, 30 + stroke}, {stroke, 30 + stroke},
                             {stroke, top}, {50, top}, {50, letter_height}, {0, letter_height}});
}

/// Open ring band, opening to the right.
inline PartShape letter_c() {
    const double ro = letter_height / 2.0;
    const double ri = ro - stroke;
    std::vector<Vec2> v;
    detail::arc(v, ro, detail::deg(45), detail::deg(315), 27);
    detail::arc(v, ri, detail::deg(315), detail::deg(45), 18);
    return PartShape::polygon(std::move(v));
}

/// Ring band with a spur running inward from the lower end.
inline PartShape letter_g() {
    const double ro = letter_height / 2.0;
    const double ri = ro - stroke;
    std::vector<Vec2> v;
    detail::arc(v, ro, detail::deg(45), detail::deg(360), 32);
    v.push_back({stroke / 2.0, 0.0});
    v.push_back({stroke / 2.0, -stroke});
    const double a_low = 2.0 * std::numbers::pi - std::asin(stroke / ri);
    detail::arc(v, ri, a_low, detail::deg(45), 21);
    return PartShape::polygon(std::move(v));
}

/// Cylinder cross-section as a regular polygon (24 chords by default).
inline PartShape cylinder(double radius, int chords = 24) { return regular_polygon(radius, chords); }

/// Isosceles triangle with base `width` and height `height`, base down,
/// centred on its bounding box.
inline PartShape triangle(double width, double height) {
    return detail::centered({{0, 0}, {width, 0}, {width / 2.0, height}});
}

inline PartShape equilateral_triangle(double side) { return triangle(side, side * std::sqrt(3.0) / 2.0); }

inline PartShape square(double side) { return detail::centered({{0, 0}, {side, 0}, {side, side}, {0, side}}); }

}  // namespace pinfix::glyphs
