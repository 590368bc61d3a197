#include <catch2/catch_amalgamated.hpp>

#include <numbers>

#include "pinfix/geometry.hpp"
#include "pinfix/glyphs.hpp"
#include "support.hpp"

using namespace pinfix;
using Catch::Approx;

namespace {

PartShape square10() { return PartShape::polygon({{0, 0}, {10, 0}, {10, 10}, {0, 10}}); }

}  // namespace

TEST_CASE("signed distance of an axis-aligned square", "[geometry]") {
    const PartShape s = square10();
    const Pose2 id;
    CHECK(signed_distance(s, id, {5, 5}) == Approx(-5.0));
    CHECK(signed_distance(s, id, {15, 5}) == Approx(5.0));
    CHECK(signed_distance(s, id, {10, 5}) == Approx(0.0).margin(1e-12));
    CHECK(signed_distance(s, id, {13, 14}) == Approx(5.0));
    CHECK(signed_distance(s, id, {2, 5}) == Approx(-2.0));
}

TEST_CASE("closest boundary point and inner normal", "[geometry]") {
    const PartShape s = square10();
    const Pose2 id;

    const BoundaryPoint edge = closest_boundary_point(s, id, {12, 5});
    CHECK(edge.point.x == Approx(10.0));
    CHECK(edge.point.y == Approx(5.0));
    CHECK(edge.inner_normal.x == Approx(-1.0));
    CHECK(edge.inner_normal.y == Approx(0.0).margin(1e-12));

    const BoundaryPoint inside = closest_boundary_point(s, id, {5, 1});
    CHECK(inside.point.y == Approx(0.0).margin(1e-12));
    CHECK(inside.inner_normal.y == Approx(1.0));

    // Vertex region: inward bisector.
    const BoundaryPoint corner = closest_boundary_point(s, id, {12, 12});
    CHECK(corner.point == Vec2{10, 10});
    CHECK(corner.inner_normal.x == Approx(-std::numbers::sqrt2 / 2));
    CHECK(corner.inner_normal.y == Approx(-std::numbers::sqrt2 / 2));
}

TEST_CASE("circle signed distance and normal", "[geometry]") {
    const PartShape c = PartShape::circle(10.0);
    const Pose2 p{{100, 50}, 0.3};
    CHECK(signed_distance(c, p, {100, 50}) == Approx(-10.0));
    CHECK(signed_distance(c, p, {113, 50}) == Approx(3.0));
    const BoundaryPoint b = closest_boundary_point(c, p, {100, 70});
    CHECK(b.point.x == Approx(100.0));
    CHECK(b.point.y == Approx(60.0));
    CHECK(b.inner_normal.y == Approx(-1.0));
}

TEST_CASE("containment counts the contour as inside", "[geometry]") {
    const PlacedPart p{"sq", square10(), {}};
    CHECK(contains(p, {0, 5}));
    CHECK(contains(p, {10, 10}));
    CHECK(contains(p, {10 + 5e-10, 5}));
    CHECK_FALSE(contains(p, {10 + 1e-6, 5}));
}

TEST_CASE("polygon construction rejects bad input", "[geometry]") {
    CHECK_THROWS_AS(PartShape::polygon({{0, 0}, {1, 0}}), GeometryError);
    CHECK_THROWS_AS(PartShape::polygon({{0, 0}, {1, 0}, {2, 0}}), GeometryError);
    CHECK_THROWS_AS(PartShape::polygon({{0, 0}, {10, 10}, {10, 0}, {0, 10}}), GeometryError);  // bow-tie
    CHECK_THROWS_AS(PartShape::polygon({{0, 0}, {1, 0}, {0, std::nan("")}}), GeometryError);
    CHECK_THROWS_AS(PartShape::circle(0.0), GeometryError);
    CHECK_THROWS_AS(PartShape::circle(-1.0), GeometryError);
}

TEST_CASE("clockwise input is stored counter-clockwise", "[geometry]") {
    const PartShape cw = PartShape::polygon({{0, 0}, {0, 10}, {10, 10}, {10, 0}});
    CHECK(cw.area() == Approx(100.0));
    CHECK(signed_distance(cw, {}, {5, 5}) == Approx(-5.0));
    CHECK(closest_boundary_point(cw, {}, {-1, 5}).inner_normal.x == Approx(1.0));
}

TEST_CASE("pose round trip and composition", "[geometry]") {
    const Pose2 a{{3, -4}, 0.7};
    const Pose2 b{{-1, 2}, -2.1};
    const Vec2 q{1.5, 2.5};
    const Vec2 back = a.to_local(a.apply(q));
    CHECK(back.x == Approx(q.x));
    CHECK(back.y == Approx(q.y));
    const Vec2 direct = a.compose(b).apply(q);
    const Vec2 stepwise = a.apply(b.apply(q));
    CHECK(direct.x == Approx(stepwise.x));
    CHECK(direct.y == Approx(stepwise.y));
    CHECK(Pose2({}, 3 * std::numbers::pi).rotation == Approx(std::numbers::pi));
}

TEST_CASE("signed distance agrees with a winding-number and dense-sampling oracle", "[geometry][property]") {
    testing::Rng rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        std::vector<Vec2> v = testing::random_convex_vertices(rng, testing::uniform_int(rng, 3, 10), 20.0);
        // Dent one vertex inward to get non-convex shapes as well.
        if (trial % 2 == 1 && v.size() > 4) v[0] = v[0] * 0.3;
        const PartShape s = PartShape::polygon(v);
        const Pose2 pose{{testing::uniform(rng, -30, 30), testing::uniform(rng, -30, 30)},
                         testing::uniform(rng, -3, 3)};
        std::vector<Vec2> world;
        for (const auto& p : s.as_polygon()->vertices()) world.push_back(pose.apply(p));

        // Dense boundary samples bound the distance from above within the sample spacing.
        std::vector<Vec2> samples;
        for (std::size_t i = 0; i < world.size(); ++i) {
            const Vec2 a = world[i];
            const Vec2 b = world[(i + 1) % world.size()];
            for (int k = 0; k < 400; ++k) samples.push_back(a + (b - a) * (k / 400.0));
        }
        for (int k = 0; k < 50; ++k) {
            const Vec2 q = pose.translation + Vec2{testing::uniform(rng, -30, 30), testing::uniform(rng, -30, 30)};
            const double sd = signed_distance(s, pose, q);
            const double ref = testing::reference_signed_distance(world, q);
            REQUIRE(sd == Approx(ref).margin(1e-9));
            double dense = std::numeric_limits<double>::infinity();
            for (const auto& p : samples) dense = std::min(dense, distance(p, q));
            CHECK(std::abs(sd) <= dense + 1e-9);
            CHECK(std::abs(sd) >= dense - 0.15);
        }
    }
}

TEST_CASE("signed distance is invariant under rigid motion", "[geometry][property]") {
    testing::Rng rng(5);
    const PartShape s = glyphs::letter_g();
    for (int k = 0; k < 200; ++k) {
        const Vec2 local{testing::uniform(rng, -50, 50), testing::uniform(rng, -50, 50)};
        const Pose2 pose{{testing::uniform(rng, -100, 100), testing::uniform(rng, -100, 100)},
                         testing::uniform(rng, -3, 3)};
        CHECK(signed_distance(s, pose, pose.apply(local)) == Approx(s.signed_distance_local(local)).margin(1e-9));
        const BoundaryPoint lb = s.closest_local(local);
        const BoundaryPoint wb = closest_boundary_point(s, pose, pose.apply(local));
        CHECK(distance(wb.point, pose.apply(lb.point)) < 1e-9);
        CHECK(distance(wb.inner_normal, pose.apply_direction(lb.inner_normal)) < 1e-9);
    }
}

TEST_CASE("inner normals are unit length and point into the part", "[geometry][property]") {
    testing::Rng rng(8);
    for (const PartShape& s : {glyphs::letter_l(), glyphs::letter_x(), glyphs::letter_c(), glyphs::cylinder(20),
                               PartShape::circle(7.0)}) {
        for (int k = 0; k < 300; ++k) {
            const Vec2 q{testing::uniform(rng, -60, 60), testing::uniform(rng, -60, 60)};
            const BoundaryPoint b = closest_boundary_point(s, {}, q);
            REQUIRE(norm(b.inner_normal) == Approx(1.0));
            CHECK(std::abs(signed_distance(s, {}, b.point)) < 1e-9);
            CHECK(signed_distance(s, {}, b.point + b.inner_normal * 1e-4) < 0.0);
        }
    }
}

TEST_CASE("glyph outlines have the expected size", "[geometry][glyphs]") {
    CHECK(glyphs::letter_l().area() == Approx(50 * 15 + 15 * 60));
    CHECK(glyphs::letter_t().area() == Approx(60 * 15 + 15 * 60));
    CHECK(glyphs::letter_f().area() == Approx(75 * 15 + 35 * 15 + 25 * 15));
    CHECK(glyphs::square(45).area() == Approx(2025));
    CHECK(glyphs::triangle(45, 45).area() == Approx(0.5 * 45 * 45));
    CHECK(glyphs::equilateral_triangle(45).area() == Approx(std::sqrt(3.0) / 4 * 45 * 45));
    for (const auto& s : {glyphs::letter_l(), glyphs::letter_t(), glyphs::letter_f()}) {
        const PlacedPart p{"g", s, {}};
        const Box b = bounding_box(p);
        CHECK(b.max.y - b.min.y == Approx(glyphs::letter_height));
        CHECK(b.min.y + b.max.y == Approx(0.0).margin(1e-12));
    }
}

TEST_CASE("extent along a direction is measured from the centroid", "[geometry]") {
    const PlacedPart sq{"sq", glyphs::square(45), Pose2{{100, 100}, 0}};
    CHECK(extent_along(sq, {1, 0}) == Approx(22.5));
    CHECK(extent_along(sq, {0, -1}) == Approx(22.5));
    const PlacedPart tri{"tri", glyphs::triangle(45, 45), Pose2{{0, 0}, 0}};
    // Apex 45 above the base, centroid 15 above it.
    CHECK(extent_along(tri, {0, 1}) == Approx(30.0));
    CHECK(extent_along(tri, {0, -1}) == Approx(15.0));
}
