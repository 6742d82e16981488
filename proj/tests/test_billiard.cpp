#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "pbill/billiard.hpp"
#include "pbill/catalog.hpp"
#include "pbill/unfolding.hpp"

using namespace pbill;

namespace {

Polygon random_triangle(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    while (true) {
        std::vector<Vec2> pts{{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}};
        try {
            Polygon p = Polygon::from_vertices(pts);
            bool fat = true;
            for (int i = 0; i < 3; ++i) fat = fat && p.angle(i) > 0.15;
            if (fat) return p;
        } catch (const GeometryError&) {
        }
    }
}

PhasePoint random_point(const Polygon& p, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> s(0.001, 0.999);
    std::uniform_real_distribution<double> t(-1.5, 1.5);
    std::uniform_int_distribution<int> side(0, p.k() - 1);
    return {side(rng), s(rng), t(rng)};
}

}  // namespace

TEST_CASE("square single steps") {
    const Polygon sq = catalog::unit_square();
    SUBCASE("perpendicular bounce") {
        const StepResult r = step(sq, {0, 0.5, 0.0});
        REQUIRE(r.ok());
        CHECK(r.point.side == 2);
        CHECK(r.point.s == doctest::Approx(0.5));
        CHECK(r.point.theta == doctest::Approx(0.0));
    }
    SUBCASE("aimed at a corner") {
        const double theta = std::atan2(0.5, 1.0);  // from (0.5,0) toward (1,1)
        const StepResult r = step(sq, {0, 0.5, theta});
        CHECK(r.status == StepStatus::CornerHit);
        CHECK(r.corner == 2);
    }
    SUBCASE("pi/4 lands mid right side") {
        // Hand computation: from (0.5,0) along (1,1)/sqrt2 the ray meets x=1
        // at y=0.5; the reflected direction (-1,1)/sqrt2 is pi/4 from the
        // right side's inward normal (-1,0) toward its tangent (0,1).
        const StepResult r = step(sq, {0, 0.5, kPi / 4});
        REQUIRE(r.ok());
        CHECK(r.point.side == 1);
        CHECK(r.point.s == doctest::Approx(0.5));
        CHECK(r.point.theta == doctest::Approx(kPi / 4));
    }
}

TEST_CASE("inverse step") {
    const Polygon sq = catalog::unit_square();
    const StepResult back = inverse_step(sq, {2, 0.5, 0.0});
    REQUIRE(back.ok());
    CHECK(back.point.side == 0);
    CHECK(back.point.s == doctest::Approx(0.5));
    CHECK(back.point.theta == doctest::Approx(0.0));

    // The incoming ray of (side 1 bottom, s=0.5, theta) came from (0,1).
    const double theta = std::atan2(0.5, 1.0);
    CHECK(inverse_step(sq, {0, 0.5, theta}).status == StepStatus::CornerHit);

    std::mt19937_64 rng(3);
    for (int t = 0; t < 2000; ++t) {
        const Polygon p = random_triangle(rng);
        const PhasePoint u = random_point(p, rng);
        const StepResult f = step(p, u);
        if (!f.ok()) continue;
        const StepResult b = inverse_step(p, f.point);
        REQUIRE(b.ok());
        CHECK(b.point.side == u.side);
        CHECK(std::abs(b.point.s - u.s) < 1e-9);
        CHECK(std::abs(b.point.theta - u.theta) < 1e-9);
        // time reversal: f^-1 = R f R
        const StepResult r = step(p, reversed(f.point));
        REQUIRE(r.ok());
        CHECK(std::abs(reversed(r.point).s - u.s) < 1e-9);
        CHECK(std::abs(reversed(r.point).theta - u.theta) < 1e-9);
    }
}

TEST_CASE("orbits") {
    const Polygon sq = catalog::unit_square();
    const OrbitResult o = orbit(sq, {0, 0.5, 0.0}, 10);
    REQUIRE(o.points.size() == 10);
    for (int i = 0; i < 10; ++i) CHECK(o.points[i].side == (i % 2 == 0 ? 2 : 0));
    CHECK(o.termination.kind == Termination::Kind::Completed);

    const OrbitResult d = orbit(sq, {0, 0.5, kPi / 4}, 4);
    REQUIRE(d.points.size() == 4);
    CHECK(d.points[3].side == 0);
    CHECK(d.points[3].s == doctest::Approx(0.5));
    CHECK(d.points[3].theta == doctest::Approx(kPi / 4));

    const OrbitResult c = orbit(sq, {0, 0.5, std::atan2(-0.5, 1.0)}, 5);
    CHECK(c.termination.kind == Termination::Kind::CornerHit);
    CHECK(c.termination.step == 1);
    CHECK(c.termination.corner == 3);
    CHECK(c.points.empty());

    const OrbitResult b = orbit(sq, {0, 0.5, 0.0}, 3, TimeDirection::Backward);
    CHECK(b.points.size() == 3);
    CHECK(iterate(sq, {0, 0.5, 0.3}, -5).has_value());
}

TEST_CASE("corner hit later in the orbit") {
    // Square: (0.25, theta) with tan theta = 3/4 runs (0.25,0)->(1,1)
    const Polygon sq = catalog::unit_square();
    const double theta = std::atan2(0.75, 1.0);
    const OrbitResult o = orbit(sq, {0, 0.25, theta}, 5);
    CHECK(o.termination.kind == Termination::Kind::CornerHit);
    CHECK(o.termination.step == 1);
    // (0.5, atan(1/4)) reaches x=1 at y=2 after unfolding: corner (1,1)... in copy 2
    const OrbitResult q = orbit(sq, {0, 0.5, std::atan2(0.5, 2.0)}, 5);
    CHECK(q.termination.kind == Termination::Kind::CornerHit);
    CHECK(q.termination.step == 2);
    CHECK(q.points.size() == 1);
}

TEST_CASE("flow") {
    const Polygon sq = catalog::unit_square();
    const FlowResult a = flow_point(sq, {0, 0.5, 0.0}, 0.5);
    REQUIRE(a.state);
    CHECK(a.state->position.x == doctest::Approx(0.5));
    CHECK(a.state->position.y == doctest::Approx(0.5));
    CHECK(a.state->direction.y == doctest::Approx(1.0));

    const FlowResult z = flow_point(sq, {0, 0.3, 0.2}, 0.0);
    REQUIRE(z.state);
    CHECK(z.state->position.x == doctest::Approx(0.3));
    CHECK(z.state->direction.x == doctest::Approx(std::sin(0.2)));

    const FlowResult w = flow_point(sq, {0, 0.5, 0.0}, 1.0);
    REQUIRE(w.state);
    CHECK(w.state->position.y == doctest::Approx(1.0));
    CHECK(w.state->direction.y == doctest::Approx(-1.0));
}

TEST_CASE("unfolded oracle agrees with direct step") {
    const Polygon sq = catalog::unit_square();
    const StepResult u = step_unfolded(sq, {0, 0.5, 0.0});
    REQUIRE(u.ok());
    CHECK(u.point.side == 2);

    std::mt19937_64 rng(11);
    int corner_agree = 0;
    for (int t = 0; t < 10000; ++t) {
        const Polygon p = random_triangle(rng);
        PhasePoint pt = random_point(p, rng);
        if (t % 50 == 0) {
            // aim exactly at the opposite vertex
            const int v = p.wrap(pt.side + 2);
            pt.theta = theta_in_frame(p, pt.side, (p.vertex(v) - position(p, pt)).normalized());
        }
        const StepResult a = step(p, pt);
        const StepResult b = step_unfolded(p, pt);
        REQUIRE(a.status == b.status);
        if (a.status == StepStatus::CornerHit) {
            CHECK(a.corner == b.corner);
            ++corner_agree;
        }
        if (!a.ok()) continue;
        CHECK(a.point.side == b.point.side);
        CHECK(std::abs(a.point.s - b.point.s) < 1e-9);
        CHECK(std::abs(a.point.theta - b.point.theta) < 1e-9);
    }
    CHECK(corner_agree >= 200);
}

TEST_CASE("unfolded orbit matches the iterated map") {
    const Polygon p = catalog::pi8_triangle();
    const PhasePoint u{0, 0.37, 0.41};
    const OrbitResult o = orbit(p, u, 50);
    const UnfoldedOrbit uo = orbit_unfolded(p, u, 50);
    REQUIRE(uo.points.size() == o.points.size());
    for (std::size_t i = 0; i < o.points.size(); ++i) {
        CHECK(uo.points[i].side == o.points[i].side);
        CHECK(std::abs(uo.points[i].s - o.points[i].s) < 1e-9);
        CHECK(std::abs(uo.points[i].theta - o.points[i].theta) < 1e-9);
    }
}

TEST_CASE("batch iteration matches the serial reference") {
    const Polygon p = catalog::pi8_triangle();
    std::mt19937_64 rng(21);
    std::vector<PhasePoint> starts;
    for (int i = 0; i < 500; ++i) starts.push_back(random_point(p, rng));
    const auto a = iterate_batch(p, starts, 100);
    const auto b = iterate_batch_serial(p, starts, 100);
    REQUIRE(a.size() == starts.size());
    CHECK(a == b);
    for (std::size_t i = 0; i < starts.size(); i += 50) CHECK(a[i] == iterate(p, starts[i], 100));
}
