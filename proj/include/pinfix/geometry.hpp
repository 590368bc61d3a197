#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "pinfix/error.hpp"

namespace pinfix {

/// Planar vector in mm.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
    friend constexpr Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
    friend constexpr Vec2 operator*(double s, Vec2 a) { return {a.x * s, a.y * s}; }
    friend constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
    friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
/// Scalar planar cross product a x b.
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
/// Counter-clockwise quarter turn.
constexpr Vec2 perp(Vec2 a) { return {-a.y, a.x}; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline Vec2 normalized(Vec2 a) {
    const double n = norm(a);
    return n > 0.0 ? a / n : Vec2{};
}
inline bool is_finite(Vec2 a) { return std::isfinite(a.x) && std::isfinite(a.y); }

inline Vec2 rotate(Vec2 a, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * a.x - s * a.y, s * a.x + c * a.y};
}

/// Wraps an angle into (-pi, pi].
inline double normalize_angle(double a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    a = std::fmod(a, two_pi);
    if (a <= -std::numbers::pi) a += two_pi;
    if (a > std::numbers::pi) a -= two_pi;
    return a;
}

/// Rigid planar placement: local point p maps to R(rotation) p + translation.
struct Pose2 {
    Vec2 translation;
    double rotation = 0.0;

    Pose2() = default;
    Pose2(Vec2 t, double r) : translation(t), rotation(normalize_angle(r)) {}

    Vec2 apply(Vec2 local) const { return rotate(local, rotation) + translation; }
    Vec2 apply_direction(Vec2 local) const { return rotate(local, rotation); }
    Vec2 to_local(Vec2 world) const { return rotate(world - translation, -rotation); }

    /// (*this) after `inner`: first apply inner, then this.
    Pose2 compose(const Pose2& inner) const {
        return {apply(inner.translation), rotation + inner.rotation};
    }

    friend bool operator==(const Pose2&, const Pose2&) = default;
};

inline constexpr double boundary_tolerance = 1e-9;

struct BoundaryPoint {
    Vec2 point;
    Vec2 inner_normal;
};

/// Simple polygon, stored counter-clockwise. Clockwise input is reversed.
class Polygon {
public:
    explicit Polygon(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
        if (vertices_.size() < 3) throw GeometryError("polygon needs at least 3 vertices");
        for (const auto& v : vertices_)
            if (!is_finite(v)) throw GeometryError("polygon vertex is not finite");
        const double a = signed_area_of(vertices_);
        if (std::abs(a) < 1e-9) throw GeometryError("polygon area is degenerate");
        if (a < 0.0) std::reverse(vertices_.begin(), vertices_.end());
        if (!is_simple()) throw GeometryError("polygon is not simple");
    }

    std::span<const Vec2> vertices() const { return vertices_; }
    std::size_t size() const { return vertices_.size(); }
    double area() const { return signed_area_of(vertices_); }

    Vec2 centroid() const {
        double a = 0.0;
        Vec2 c;
        for (std::size_t i = 0, n = size(); i < n; ++i) {
            const Vec2 p = vertices_[i];
            const Vec2 q = vertices_[(i + 1) % n];
            const double w = cross(p, q);
            a += w;
            c += (p + q) * w;
        }
        return c / (3.0 * a);
    }

    bool contains_even_odd(Vec2 q) const {
        bool inside = false;
        for (std::size_t i = 0, j = size() - 1; i < size(); j = i++) {
            const Vec2 a = vertices_[i];
            const Vec2 b = vertices_[j];
            if ((a.y > q.y) != (b.y > q.y)) {
                const double x = a.x + (q.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if (q.x < x) inside = !inside;
            }
        }
        return inside;
    }

    /// Unsigned distance and closest point in local coordinates.
    BoundaryPoint closest(Vec2 q, double* dist = nullptr) const {
        const std::size_t n = size();
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_edge = 0;
        double best_t = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 a = vertices_[i];
            const Vec2 e = vertices_[(i + 1) % n] - a;
            const double t = std::clamp(dot(q - a, e) / dot(e, e), 0.0, 1.0);
            const double d = norm(q - (a + e * t));
            if (d < best) {
                best = d;
                best_edge = i;
                best_t = t;
            }
        }
        if (dist) *dist = best;
        const Vec2 a = vertices_[best_edge];
        const Vec2 b = vertices_[(best_edge + 1) % n];
        if (best_t <= 0.0 || best_t >= 1.0) {
            const std::size_t v = best_t <= 0.0 ? best_edge : (best_edge + 1) % n;
            return {vertices_[v], vertex_normal(v)};
        }
        return {a + (b - a) * best_t, edge_normal(best_edge)};
    }

    /// Inward unit normal of edge i (from vertex i to i+1).
    Vec2 edge_normal(std::size_t i) const {
        return normalized(perp(vertices_[(i + 1) % size()] - vertices_[i]));
    }

    /// Inward bisector of the normals of the two edges meeting at vertex v.
    Vec2 vertex_normal(std::size_t v) const {
        const std::size_t n = size();
        const Vec2 a = edge_normal((v + n - 1) % n);
        const Vec2 b = edge_normal(v);
        const Vec2 s = a + b;
        return norm(s) > 1e-12 ? normalized(s) : b;
    }

private:
    static double signed_area_of(std::span<const Vec2> v) {
        double a = 0.0;
        for (std::size_t i = 0, n = v.size(); i < n; ++i) a += cross(v[i], v[(i + 1) % n]);
        return 0.5 * a;
    }

    static bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
        const auto orient = [](Vec2 p, Vec2 q, Vec2 r) { return cross(q - p, r - p); };
        const double d1 = orient(c, d, a);
        const double d2 = orient(c, d, b);
        const double d3 = orient(a, b, c);
        const double d4 = orient(a, b, d);
        if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
            return true;
        const auto on_segment = [](Vec2 p, Vec2 q, Vec2 r) {
            return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) &&
                   std::min(p.y, q.y) <= r.y && r.y <= std::max(p.y, q.y);
        };
        return (d1 == 0 && on_segment(c, d, a)) || (d2 == 0 && on_segment(c, d, b)) ||
               (d3 == 0 && on_segment(a, b, c)) || (d4 == 0 && on_segment(a, b, d));
    }

    bool is_simple() const {
        const std::size_t n = size();
        for (std::size_t i = 0; i < n; ++i) {
            if (vertices_[i] == vertices_[(i + 1) % n]) return false;
            for (std::size_t j = i + 1; j < n; ++j) {
                if (j == i + 1 || (i == 0 && j == n - 1)) continue;
                if (segments_cross(vertices_[i], vertices_[(i + 1) % n], vertices_[j],
                                   vertices_[(j + 1) % n]))
                    return false;
            }
        }
        return true;
    }

    std::vector<Vec2> vertices_;
};

struct Circle {
    double radius;

    explicit Circle(double r) : radius(r) {
        if (!(r > 0.0) || !std::isfinite(r)) throw GeometryError("circle radius must be positive");
    }
};

/// Part cross-section in its local frame.
class PartShape {
public:
    PartShape(Polygon p) : shape_(std::move(p)) {}
    PartShape(Circle c) : shape_(c) {}

    static PartShape polygon(std::vector<Vec2> vertices) { return Polygon(std::move(vertices)); }
    static PartShape circle(double radius) { return Circle(radius); }

    bool is_circle() const { return std::holds_alternative<Circle>(shape_); }
    const Polygon* as_polygon() const { return std::get_if<Polygon>(&shape_); }
    const Circle* as_circle() const { return std::get_if<Circle>(&shape_); }

    Vec2 centroid() const {
        if (const auto* p = as_polygon()) return p->centroid();
        return {};
    }

    double area() const {
        if (const auto* p = as_polygon()) return p->area();
        const double r = as_circle()->radius;
        return std::numbers::pi * r * r;
    }

    /// Radius of the smallest centroid-centred circle enclosing the shape.
    double bounding_radius() const {
        if (const auto* c = as_circle()) return c->radius;
        const Vec2 c = centroid();
        double r = 0.0;
        for (const auto& v : as_polygon()->vertices()) r = std::max(r, distance(v, c));
        return r;
    }

    /// Support value max over the shape of dot(x, dir), local frame.
    double support(Vec2 dir) const {
        if (const auto* c = as_circle()) return c->radius * norm(dir);
        double s = -std::numeric_limits<double>::infinity();
        for (const auto& v : as_polygon()->vertices()) s = std::max(s, dot(v, dir));
        return s;
    }

    double signed_distance_local(Vec2 q) const {
        if (const auto* c = as_circle()) return norm(q) - c->radius;
        const auto* p = as_polygon();
        double d = 0.0;
        p->closest(q, &d);
        return p->contains_even_odd(q) ? -d : d;
    }

    BoundaryPoint closest_local(Vec2 q) const {
        if (const auto* c = as_circle()) {
            const double n = norm(q);
            const Vec2 dir = n > 0.0 ? q / n : Vec2{1.0, 0.0};
            return {dir * c->radius, -dir};
        }
        return as_polygon()->closest(q);
    }

    friend bool operator==(const PartShape& a, const PartShape& b) {
        if (a.is_circle() != b.is_circle()) return false;
        if (a.is_circle()) return a.as_circle()->radius == b.as_circle()->radius;
        const auto va = a.as_polygon()->vertices();
        const auto vb = b.as_polygon()->vertices();
        return std::equal(va.begin(), va.end(), vb.begin(), vb.end());
    }

private:
    std::variant<Polygon, Circle> shape_;
};

struct PlacedPart {
    std::string id;
    PartShape shape;
    Pose2 pose;

    Vec2 centroid() const { return pose.apply(shape.centroid()); }
    friend bool operator==(const PlacedPart&, const PlacedPart&) = default;
};

/// Negative inside, positive outside, zero on the contour.
inline double signed_distance(const PartShape& shape, const Pose2& pose, Vec2 q) {
    return shape.signed_distance_local(pose.to_local(q));
}

/// Closest contour point and the unit inner normal there, in world coordinates.
/// At a polygon vertex the normal is the inward bisector of the adjacent edges.
inline BoundaryPoint closest_boundary_point(const PartShape& shape, const Pose2& pose, Vec2 q) {
    const BoundaryPoint local = shape.closest_local(pose.to_local(q));
    return {pose.apply(local.point), pose.apply_direction(local.inner_normal)};
}

/// Footprint membership; points on the contour count as contained.
inline bool contains(const PartShape& shape, const Pose2& pose, Vec2 q,
                     double tolerance = boundary_tolerance) {
    return signed_distance(shape, pose, q) <= tolerance;
}

inline double signed_distance(const PlacedPart& part, Vec2 q) {
    return signed_distance(part.shape, part.pose, q);
}
inline bool contains(const PlacedPart& part, Vec2 q) { return contains(part.shape, part.pose, q); }

/// Extent of a placed part along a world direction, measured from its centroid.
inline double extent_along(const PlacedPart& part, Vec2 world_dir) {
    const Vec2 local_dir = rotate(world_dir, -part.pose.rotation);
    return part.shape.support(local_dir) - dot(part.shape.centroid(), local_dir);
}

struct Box {
    Vec2 min;
    Vec2 max;
};

inline Box bounding_box(const PlacedPart& part) {
    if (const auto* c = part.shape.as_circle()) {
        const Vec2 r{c->radius, c->radius};
        return {part.pose.translation - r, part.pose.translation + r};
    }
    Box b{{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()},
          {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()}};
    for (const auto& v : part.shape.as_polygon()->vertices()) {
        const Vec2 w = part.pose.apply(v);
        b.min = {std::min(b.min.x, w.x), std::min(b.min.y, w.y)};
        b.max = {std::max(b.max.x, w.x), std::max(b.max.y, w.y)};
    }
    return b;
}

/// Regular n-gon inscribed in a circle of the given radius, first vertex on +x.
inline PartShape regular_polygon(double radius, int sides, double phase = 0.0) {
    std::vector<Vec2> v;
    v.reserve(static_cast<std::size_t>(sides));
    for (int i = 0; i < sides; ++i) {
        const double a = phase + 2.0 * std::numbers::pi * i / sides;
        v.push_back({radius * std::cos(a), radius * std::sin(a)});
    }
    return PartShape::polygon(std::move(v));
}

}  // namespace pinfix
