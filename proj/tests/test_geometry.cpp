#include <catch2/catch_amalgamated.hpp>

#include "billiard/fixtures.hpp"
#include "billiard/table.hpp"
#include "helpers.hpp"

using namespace billiard;
using nlohmann::json;

TEST_CASE("full circle table: curvature bounds and combinatorics") {
    BilliardTable tb = fixtures::table("circle04");
    REQUIRE(tb.scatterers.size() == 1);
    REQUIRE(tb.scatterers[0].arcs.size() == 1);
    CHECK(tb.kappa_max == Catch::Approx(2.5).epsilon(1e-9));
    CHECK(tb.kappa_min == Catch::Approx(2.5).epsilon(1e-9));
    CHECK(tb.scatterers[0].corners.empty());
    CHECK(tb.total_length == Catch::Approx(2 * M_PI * 0.4).epsilon(1e-12));
}

TEST_CASE("tangent circles produce a cusp") {
    json cfg;
    cfg["scatterers"] = {json{{"arcs", {fixtures::circle_arc(0.3, 0.5, 0.2, 0.0, -2 * M_PI),
                                        fixtures::circle_arc(0.7, 0.5, 0.2, M_PI, -M_PI)}}}};
    CHECK_THROWS_AS(build_table(cfg), CuspDetected);
}

TEST_CASE("reversed circle orientation is rejected") {
    json cfg;
    cfg["scatterers"] = {json{{"arcs", {fixtures::circle_arc(0.5, 0.5, 0.4, 0.0, 2 * M_PI)}}}};
    CHECK_THROWS_AS(build_table(cfg), ConfigError);
}

TEST_CASE("overlapping scatterers are rejected") {
    json cfg;
    cfg["scatterers"] = {fixtures::disk(0.3, 0.5, 0.25), fixtures::disk(0.6, 0.5, 0.25)};
    CHECK_THROWS_AS(build_table(cfg), OverlappingScatterers);
}

TEST_CASE("open chains are rejected") {
    json cfg;
    // two quarter arcs that do not meet
    cfg["scatterers"] = {json{{"arcs", {fixtures::circle_arc(0.5, 0.5, 0.2, M_PI / 2, 0.0),
                                        fixtures::circle_arc(0.5, 0.5, 0.2, -M_PI / 2, -M_PI)}}}};
    CHECK_THROWS_AS(build_table(cfg), OpenBoundaryChain);
}

TEST_CASE("flat junction with matching jets is not a corner") {
    json cfg;  // circle split into two half arcs
    cfg["scatterers"] = {json{{"arcs", {fixtures::circle_arc(0.5, 0.5, 0.3, M_PI, 0.0),
                                        fixtures::circle_arc(0.5, 0.5, 0.3, 0.0, -M_PI)}}}};
    CHECK_THROWS_AS(build_table(cfg), DegenerateCorner);
}

TEST_CASE("fig1 fixture is admissible; distance oracle agrees") {
    BilliardTable tb = fixtures::table("fig1");
    REQUIRE(tb.scatterers.size() == 4);
    CHECK(tb.kappa_max == Catch::Approx(5.0).epsilon(1e-9));  // blocker disks r = 0.2
    CHECK(tb.alpha0 == Catch::Approx(2.0 * M_PI / 3.0).epsilon(1e-6));  // Reuleaux corners
    CHECK(tb.has_corners());

    double gap = testing_oracles::pairwise_distance_sampled(tb, 400);
    CHECK(tb.min_gap > 1e-2);
    CHECK(std::abs(gap - tb.min_gap) < 5e-3);
}

TEST_CASE("all fixtures build") {
    for (const auto& name : fixtures::names()) {
        INFO(name);
        CHECK_NOTHROW(fixtures::table(name));
    }
}

TEST_CASE("cubic squircle with flat corners is admissible") {
    // four Bezier quarter turns; junction tangents match but second
    // derivatives differ, so the flat corners are genuine
    const double R = 0.35, k = 0.5522847498307936;
    auto quarter = [&](Vec2 p0, Vec2 p1, Vec2 p2, Vec2 p3) {
        json a;
        a["kind"] = "cubic";
        a["cx"] = {p0.x, 3 * (p1.x - p0.x), 3 * (p2.x - 2 * p1.x + p0.x),
                   p3.x - 3 * p2.x + 3 * p1.x - p0.x};
        a["cy"] = {p0.y, 3 * (p1.y - p0.y), 3 * (p2.y - 2 * p1.y + p0.y),
                   p3.y - 3 * p2.y + 3 * p1.y - p0.y};
        return a;
    };
    Vec2 c(0.5, 0.5);
    json arcs = json::array();
    arcs.push_back(quarter({c.x, c.y + R}, {c.x + k * R, c.y + R}, {c.x + R, c.y + k * R},
                           {c.x + R, c.y}));
    arcs.push_back(quarter({c.x + R, c.y}, {c.x + R, c.y - k * R}, {c.x + k * R, c.y - R},
                           {c.x, c.y - R}));
    arcs.push_back(quarter({c.x, c.y - R}, {c.x - k * R, c.y - R}, {c.x - R, c.y - k * R},
                           {c.x - R, c.y}));
    arcs.push_back(quarter({c.x - R, c.y}, {c.x - R, c.y + k * R}, {c.x - k * R, c.y + R},
                           {c.x, c.y + R}));
    json cfg;
    cfg["scatterers"] = {json{{"arcs", arcs}}};
    BilliardTable tb = build_table(cfg);
    CHECK(tb.scatterers[0].corners.size() == 4);
    // curvature of the Bezier circle approximation stays within 4% of 1/R
    CHECK(tb.kappa_max < 1.04 / R);
    CHECK(tb.kappa_min > 0.96 / R);
}

TEST_CASE("boundary_point basics on circle04") {
    BilliardTable tb = fixtures::table("circle04");
    // arc parametrized from the leftmost point
    BoundaryPoint bp = tb.boundary_point(0.0);
    CHECK(bp.pos.x == Catch::Approx(0.1).margin(1e-12));
    CHECK(bp.pos.y == Catch::Approx(0.5).margin(1e-12));
    CHECK(bp.normal.x == Catch::Approx(-1.0).margin(1e-12));
    CHECK(bp.normal.y == Catch::Approx(0.0).margin(1e-12));
    CHECK(bp.curvature == Catch::Approx(2.5).epsilon(1e-10));

    CHECK_THROWS_AS(tb.boundary_point(tb.total_length + 0.5), OutOfRange);
}

TEST_CASE("boundary_point orthonormality and continuity") {
    BilliardTable tb = fixtures::table("fig1");
    RngStream rng(12, 0);
    for (int i = 0; i < 300; ++i) {
        double r = rng.u01() * tb.total_length;
        BoundaryPoint bp = tb.boundary_point(r);
        CHECK(std::abs(bp.tangent.norm() - 1.0) < 1e-12);
        CHECK(std::abs(bp.normal.norm() - 1.0) < 1e-12);
        CHECK(std::abs(dot(bp.tangent, bp.normal)) < 1e-12);
    }
    // continuity in the interior of an arc
    double r0 = tb.arc_start(0, 0) + 0.3 * tb.scatterers[0].arcs[0].length();
    Vec2 p0 = tb.boundary_point(r0).pos;
    Vec2 p1 = tb.boundary_point(r0 + 1e-7).pos;
    CHECK(dist(p0, p1) < 2e-7);
    CHECK(dist(p0, p1) > 0.5e-7);
}

TEST_CASE("corner arclength coordinate belongs to the next arc") {
    BilliardTable tb = fixtures::table("fig1");
    double r_junction = tb.arc_start(0, 1);  // shared by arcs 0 and 1
    BoundaryPoint bp = tb.boundary_point(r_junction);
    CHECK(bp.arc == 1);
    // one-sided tangent of arc 1, not of arc 0
    Vec2 t1 = tb.scatterers[0].arcs[1].tangent_unit(0.0);
    CHECK(dist(bp.tangent, t1) < 1e-12);
}

TEST_CASE("arc-length offsets match an independent quadrature") {
    for (const auto& name : {"fig1", "circle04", "degenerate_a2"}) {
        BilliardTable tb = fixtures::table(name);
        for (size_t si = 0; si < tb.scatterers.size(); ++si)
            for (size_t ai = 0; ai < tb.scatterers[si].arcs.size(); ++ai) {
                const auto& a = tb.scatterers[si].arcs[ai];
                double len_b = tb.arc_end(si, ai) - tb.arc_start(si, ai);
                double len_g = testing_oracles::arclength_gauss(a);
                CHECK(std::abs(len_b - len_g) < 1e-9 * std::max(1.0, len_g));
            }
    }
}

TEST_CASE("config round-trip is bit exact") {
    for (const auto& name : fixtures::names()) {
        INFO(name);
        json cfg = fixtures::config(name);
        BilliardTable t1 = build_table(cfg);
        std::string dumped = t1.emit_config().dump();
        BilliardTable t2 = build_table(json::parse(dumped));
        REQUIRE(t2.emit_config().dump() == dumped);
        // derived data identical to the bit
        REQUIRE(std::memcmp(&t1.kappa_max, &t2.kappa_max, sizeof(double)) == 0);
        REQUIRE(std::memcmp(&t1.total_length, &t2.total_length, sizeof(double)) == 0);
        REQUIRE(t1.arc_offsets == t2.arc_offsets);
    }
}

TEST_CASE("kappa_max equals the grid maximum over all arcs") {
    BilliardTable tb = fixtures::table("degenerate_a2");
    double kmax = 0.0;
    for (const auto& s : tb.scatterers)
        for (const auto& a : s.arcs)
            for (int i = 0; i <= 1024; ++i)
                kmax = std::max(kmax, a.curvature(i / 1024.0));
    CHECK(tb.kappa_max == Catch::Approx(kmax).epsilon(1e-9));
}

TEST_CASE("table_distance: identity, combinatorics, concentric circles") {
    BilliardTable a = fixtures::table("circle04");
    CHECK(table_distance(a, a) == 0.0);

    BilliardTable b = fixtures::table("fig1");
    CHECK(std::isinf(table_distance(a, b)));

    json cfg;
    cfg["scatterers"] = {fixtures::disk(0.5, 0.5, 0.41)};
    BilliardTable c = build_table(cfg);
    double d = table_distance(a, c);
    CHECK(d >= 0.01 - 1e-12);
    CHECK(d <= 0.011);
}
