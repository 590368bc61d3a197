#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numbers>

#include "pinfix/closure.hpp"
#include "support.hpp"

using namespace pinfix;
using Catch::Approx;

namespace {

/// Contacts on the 10 x 10 square [0,10]^2, each at (edge, position along edge).
ContactSet square_contacts(std::initializer_list<std::pair<int, double>> spec) {
    ContactSet out;
    for (const auto& [edge, t] : spec) {
        switch (edge) {
        case 0: out.push_back({{t, 0}, {0, 1}, std::nullopt}); break;     // bottom
        case 1: out.push_back({{10, t}, {-1, 0}, std::nullopt}); break;   // right
        case 2: out.push_back({{t, 10}, {0, -1}, std::nullopt}); break;   // top
        default: out.push_back({{0, t}, {1, 0}, std::nullopt}); break;    // left
        }
    }
    return out;
}

/// Largest violation of n_i . (v + w x (p_i - ref)) >= 0 over the contacts.
double worst_violation(const ContactSet& cs, const Twist& t, Vec2 ref) {
    double worst = 0.0;
    for (const auto& c : cs) {
        const Vec2 r = c.point - ref;
        const Vec2 vel = t.v + Vec2{-t.w * r.y, t.w * r.x};
        worst = std::min(worst, dot(c.normal, vel));
    }
    return -worst;
}

Vec2 mean_point(const ContactSet& cs) {
    Vec2 m;
    for (const auto& c : cs) m += c.point;
    return m / static_cast<double>(cs.size());
}

}  // namespace

TEST_CASE("wrench columns", "[closure]") {
    const ContactSet cs{{{1, 0}, {-1, 0}, std::nullopt}, {{0, 1}, {1, 0}, std::nullopt}};
    const auto w = build_contact_wrenches(cs, {0, 0});
    REQUIRE(w.size() == 2);
    CHECK(w[0](0) == -1.0);
    CHECK(w[0](1) == 0.0);
    CHECK(w[0](2) == 0.0);
    CHECK(w[1](0) == 1.0);
    CHECK(w[1](2) == -1.0);
}

TEST_CASE("rank of G N", "[closure]") {
    CHECK(gn_rank(ContactSet{}) == 0);
    // All normals parallel: no torque about a point on their common line, no y force.
    CHECK(gn_rank(square_contacts({{3, 2}, {3, 8}, {1, 5}}), {0, 5}) == 2);
    CHECK(gn_rank(square_contacts({{3, 5}, {1, 5}}), {5, 5}) == 1);
    CHECK(gn_rank(square_contacts({{0, 5}, {1, 5}, {2, 2}})) == 3);
}

TEST_CASE("edge midpoints of a square do not hold it", "[closure]") {
    const ContactSet cs = square_contacts({{0, 5}, {1, 5}, {2, 5}, {3, 5}});
    const auto v = form_closure_lp(cs);
    CHECK(v.contact_count == 4);
    CHECK(v.gn_rank == 2);  // every normal passes through the centre
    CHECK_FALSE(v.form_closure);
    REQUIRE(v.escape_twist);
    CHECK(std::abs(v.escape_twist->w) > 0.0);
    CHECK(worst_violation(cs, *v.escape_twist, mean_point(cs)) < 1e-9);
}

TEST_CASE("two offset contacts per edge hold a square", "[closure]") {
    const ContactSet cs = square_contacts({{0, 2}, {0, 8}, {1, 2}, {1, 8}, {2, 2}, {2, 8}, {3, 2}, {3, 8}});
    const auto v = form_closure_lp(cs);
    CHECK(v.gn_rank == 3);
    CHECK(v.form_closure);
    CHECK(v.lp_margin > 0.0);
    CHECK_FALSE(v.escape_twist);
    CHECK(form_closure_bruteforce(cs).form_closure);
}

TEST_CASE("four contacts hold a square only when their torques can cancel", "[closure]") {
    const ContactSet cs = square_contacts({{0, 2}, {1, 8}, {2, 8}, {3, 2}});
    CHECK(form_closure_lp(cs).form_closure);
    const ContactSet mirrored = square_contacts({{0, 8}, {1, 2}, {2, 2}, {3, 8}});
    CHECK(form_closure_lp(mirrored).form_closure);
    // Pinwheel: every contact pushes the same way round, so the square can spin.
    const ContactSet pinwheel = square_contacts({{0, 2}, {1, 2}, {2, 8}, {3, 8}});
    const auto v = form_closure_lp(pinwheel);
    CHECK(v.gn_rank == 3);
    CHECK_FALSE(v.form_closure);
    REQUIRE(v.escape_twist);
    CHECK(worst_violation(pinwheel, *v.escape_twist, mean_point(pinwheel)) < 1e-9);
}

TEST_CASE("fewer than four contacts never hold", "[closure]") {
    const auto v = form_closure_lp(square_contacts({{0, 2}, {1, 7}, {3, 5}}));
    CHECK(v.gn_rank == 3);
    CHECK_FALSE(v.form_closure);
    REQUIRE(v.escape_twist);
}

TEST_CASE("full rank but one-sided contacts give an escape twist", "[closure]") {
    const ContactSet cs = square_contacts({{0, 2}, {0, 8}, {3, 2}, {3, 8}, {1, 5}});
    const auto v = form_closure_lp(cs);
    CHECK(v.gn_rank == 3);
    CHECK_FALSE(v.form_closure);
    REQUIRE(v.escape_twist);
    CHECK(worst_violation(cs, *v.escape_twist, mean_point(cs)) < 1e-9);
    CHECK(v.escape_twist->v.y > 0.0);  // nothing on the top edge
}

TEST_CASE("empty contact set", "[closure]") {
    const auto v = form_closure_lp(ContactSet{});
    CHECK(v.contact_count == 0);
    CHECK(v.gn_rank == 0);
    CHECK_FALSE(v.form_closure);
    CHECK(v.lp_margin == -1.0);
}

TEST_CASE("brute-force oracle rejects too few samples", "[closure]") {
    CHECK_THROWS_AS(form_closure_bruteforce(square_contacts({{0, 1}}), {}, 10), ArgumentError);
}

TEST_CASE("verdict is invariant under contact permutation", "[closure][property]") {
    testing::Rng rng(21);
    for (int k = 0; k < 100; ++k) {
        ContactSet cs = testing::random_contact_set(rng);
        const auto a = form_closure_lp(cs);
        std::shuffle(cs.begin(), cs.end(), rng);
        const auto b = form_closure_lp(cs);
        CHECK(a.form_closure == b.form_closure);
        CHECK(a.gn_rank == b.gn_rank);
        CHECK(a.lp_margin == Approx(b.lp_margin).margin(1e-9));
    }
}

TEST_CASE("verdict is invariant under rigid motion of the contact set", "[closure][property]") {
    testing::Rng rng(22);
    for (int k = 0; k < 100; ++k) {
        const ContactSet cs = testing::random_contact_set(rng);
        const Pose2 pose{{testing::uniform(rng, -100, 100), testing::uniform(rng, -100, 100)},
                         testing::uniform(rng, -3, 3)};
        ContactSet moved;
        for (const auto& c : cs) moved.push_back({pose.apply(c.point), pose.apply_direction(c.normal), std::nullopt});
        const auto a = form_closure_lp(cs);
        const auto b = form_closure_lp(moved);
        CHECK(a.form_closure == b.form_closure);
        CHECK(a.gn_rank == b.gn_rank);
        CHECK(a.lp_margin == Approx(b.lp_margin).margin(1e-7));
    }
}

TEST_CASE("adding contacts never breaks closure", "[closure][property]") {
    testing::Rng rng(23);
    int held = 0;
    for (int k = 0; k < 150; ++k) {
        ContactSet cs = testing::random_contact_set(rng);
        ContactSet more = testing::random_contact_set(rng);
        // Same frame before and after.
        const ClosureOptions frame{mean_point(cs), 50.0};
        const bool before = form_closure_lp(cs, frame).form_closure;
        cs.insert(cs.end(), more.begin(), more.end());
        const bool after = form_closure_lp(cs, frame).form_closure;
        if (before) {
            ++held;
            CHECK(after);
        }
    }
    CHECK(held > 10);
}

TEST_CASE("reference point and length scale do not change the verdict", "[closure][property]") {
    testing::Rng rng(24);
    for (int k = 0; k < 100; ++k) {
        const ContactSet cs = testing::random_contact_set(rng);
        const auto a = form_closure_lp(cs);
        const ClosureOptions other{Vec2{testing::uniform(rng, -50, 50), testing::uniform(rng, -50, 50)},
                                   testing::uniform(rng, 5, 80)};
        const auto b = form_closure_lp(cs, other);
        if (std::abs(a.lp_margin) > 1e-6) CHECK(a.form_closure == b.form_closure);
        CHECK(a.gn_rank == b.gn_rank);
    }
}

TEST_CASE("escape twists satisfy every contact constraint", "[closure][property]") {
    testing::Rng rng(25);
    int failures = 0;
    for (int k = 0; k < 200; ++k) {
        const ContactSet cs = testing::random_contact_set(rng);
        const auto v = form_closure_lp(cs);
        if (v.form_closure) continue;
        ++failures;
        REQUIRE(v.escape_twist);
        const double size = norm(v.escape_twist->v) + std::abs(v.escape_twist->w);
        CHECK(size > 0.0);
        if (v.lp_margin < -1e-6) CHECK(worst_violation(cs, *v.escape_twist, mean_point(cs)) < 1e-7);
    }
    CHECK(failures > 10);
}

TEST_CASE("LP and brute-force oracle agree on random sets", "[closure][oracle]") {
    testing::Rng rng(26);
    for (int k = 0; k < 60; ++k) {
        const ContactSet cs = testing::random_contact_set(rng);
        const auto lp = form_closure_lp(cs);
        if (std::abs(lp.lp_margin) <= 1e-8) continue;
        CHECK(lp.form_closure == form_closure_bruteforce(cs).form_closure);
    }
}

TEST_CASE("every verdict in this run respects the necessity chain", "[closure][audit]") {
    const auto& audit = verdict_audit();
    CHECK(audit.verdicts.load() > 0);
    CHECK(audit.violations.load() == 0);
}
