#include <catch2/catch_amalgamated.hpp>

#include "billiard/dynamics.hpp"
#include "billiard/fixtures.hpp"
#include "billiard/stats_util.hpp"
#include "helpers.hpp"

using namespace billiard;

static CollisionPoint at_r(const BilliardTable& tb, double r, double phi) {
    CollisionPoint x;
    x.r = r;
    x.phi = phi;
    double t;
    tb.locate(r, x.scatterer, x.arc, t);
    return x;
}

TEST_CASE("normal incidence across the lattice") {
    BilliardTable tb = fixtures::table("circle04");
    CollisionEvent ev = next_collision(tb, {0.05, 0.5}, {-1.0, 0.0});
    REQUIRE(ev.ok());
    CHECK(ev.tau == Catch::Approx(0.15).margin(1e-12));
    // reflected back
    Vec2 n = boundary_of(tb, ev.next).normal;
    Vec2 vr = outgoing_velocity(n, ev.next.phi);
    CHECK(vr.x == Catch::Approx(1.0).margin(1e-12));
    CHECK(vr.y == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("period-two diameter orbit") {
    BilliardTable tb = fixtures::table("circle04");
    CollisionPoint x = at_r(tb, 0.0, 0.0);  // leftmost point, normal shot
    CollisionEvent ev = billiard_map(tb, x);
    REQUIRE(ev.ok());
    CHECK(ev.tau == Catch::Approx(0.2).margin(1e-12));
    CHECK(ev.next.r == Catch::Approx(tb.total_length / 2).margin(1e-9));
    CHECK(ev.next.phi == Catch::Approx(0.0).margin(1e-12));
    CollisionEvent ev2 = billiard_map(tb, ev.next);
    CHECK(ev2.next.r == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("grazing flag at exact tangency") {
    BilliardTable tb = fixtures::table("circle04");
    CollisionEvent ev = next_collision(tb, {0.05, 0.9}, {1.0, 0.0});
    REQUIRE(ev.status != CollisionEvent::Status::NoCollision);
    CHECK(ev.grazing);
    CHECK(std::abs(ev.next.phi) == Catch::Approx(M_PI / 2).margin(1e-9));
}

TEST_CASE("corridor axis ray reaches the flight cap") {
    BilliardTable tb = fixtures::table("fig1");
    FlightOptions opt;
    opt.t_max = 2000.0;
    CollisionEvent ev = next_collision(tb, {0.0, 0.5}, {1.0, 0.0}, opt);
    CHECK(ev.status == CollisionEvent::Status::NoCollision);
}

TEST_CASE("corner hit reports both branches") {
    BilliardTable tb = fixtures::table("fig1");
    // shoot straight at the lower scatterer's tip (0.25, 0.45) from above
    CollisionEvent ev = next_collision(tb, {0.25, 0.5}, {0.0, -1.0});
    REQUIRE(ev.status == CollisionEvent::Status::CornerHit);
    REQUIRE(ev.branches.size() == 2);
    CHECK(ev.tau == Catch::Approx(0.05).margin(1e-9));
    CHECK(ev.branches[0].arc != ev.branches[1].arc);
}

TEST_CASE("displacement equals tau times direction") {
    BilliardTable tb = fixtures::table("circle03");
    RngStream rng(5, 0);
    for (int i = 0; i < 50; ++i) {
        CollisionPoint x = sample_one(tb, rng);
        CollisionEvent ev = billiard_map(tb, x);
        if (!ev.ok()) continue;
        CHECK(ev.displacement.norm() == Catch::Approx(ev.tau).epsilon(1e-12));
        CHECK(ev.tau > 0.0);
    }
}

TEST_CASE("involution identity (I F)^2 = id") {
    for (const char* name : {"circle04", "fig1"}) {
        BilliardTable tb = fixtures::table(name);
        RngStream rng(7, 1);
        int checked = 0;
        for (int i = 0; i < 400 && checked < 200; ++i) {
            CollisionPoint x = sample_one(tb, rng);
            CollisionEvent e1 = billiard_map(tb, x);
            if (!e1.ok() || e1.grazing) continue;
            CollisionEvent e2 = billiard_map(tb, involution(e1.next));
            if (!e2.ok() || e2.grazing) continue;
            CollisionPoint back = involution(e2.next);
            ++checked;
            CHECK(tb.r_distance(back.r, x.r, x.scatterer) < 1e-9);
            CHECK(std::abs(back.phi - x.phi) < 1e-9);
        }
        CHECK(checked >= 150);
    }
}

TEST_CASE("tangent map matches finite differences") {
    for (const char* name : {"circle04", "fig1"}) {
        BilliardTable tb = fixtures::table(name);
        RngStream rng(11, 2);
        int checked = 0;
        for (int i = 0; i < 4000 && checked < 1000; ++i) {
            CollisionPoint x = sample_one(tb, rng);
            if (std::cos(x.phi) < 0.05) continue;
            CollisionEvent ev = billiard_map(tb, x);
            if (!ev.ok() || std::cos(ev.next.phi) < 0.05) continue;
            auto fd = testing_oracles::tangent_fd(tb, x);
            if (!fd) continue;
            Mat2 an;
            try {
                an = tangent_map(tb, x, &ev);
            } catch (const SingularityTooClose&) {
                continue;
            }
            ++checked;
            for (auto [av, fv] : {std::pair{an.a, fd->a}, {an.b, fd->b},
                                  {an.c, fd->c}, {an.d, fd->d}}) {
                REQUIRE(std::abs(av - fv) < 1e-5 * (std::abs(av) + 1.0));
            }
        }
        INFO(name);
        CHECK(checked >= 900);
    }
}

TEST_CASE("diameter orbit tangent map has unit determinant") {
    BilliardTable tb = fixtures::table("circle04");
    CollisionPoint x = at_r(tb, 0.0, 0.0);
    Mat2 m = tangent_map(tb, x);
    CHECK(std::abs(m.det()) == Catch::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("measure Jacobian: |det DF| cos(phi') = cos(phi)") {
    BilliardTable tb = fixtures::table("fig1");
    RngStream rng(13, 3);
    int checked = 0;
    for (int i = 0; i < 2000 && checked < 500; ++i) {
        CollisionPoint x = sample_one(tb, rng);
        CollisionEvent ev = billiard_map(tb, x);
        if (!ev.ok() || std::cos(ev.next.phi) < 1e-6) continue;
        Mat2 m;
        try {
            m = tangent_map(tb, x, &ev);
        } catch (const SingularityTooClose&) {
            continue;
        }
        ++checked;
        double lhs = std::abs(m.det()) * std::cos(ev.next.phi);
        REQUIRE(lhs == Catch::Approx(std::cos(x.phi)).epsilon(1e-8));
    }
    CHECK(checked >= 400);
}

TEST_CASE("flat wavefront expands into the unstable cone") {
    BilliardTable tb = fixtures::table("circle04");
    RngStream rng(17, 4);
    for (int i = 0; i < 200; ++i) {
        CollisionPoint x = sample_one(tb, rng);
        CollisionEvent ev = billiard_map(tb, x);
        if (!ev.ok() || std::cos(ev.next.phi) < 1e-4) continue;
        double k = boundary_of(tb, x).curvature;
        double k1 = boundary_of(tb, ev.next).curvature;
        Mat2 m = tangent_map(tb, x, &ev);
        auto img = m.apply(1.0, k);
        double slope = img[1] / img[0];
        CHECK(slope >= k1 - 1e-9);
    }
}

TEST_CASE("invariant sampler: phi marginal follows cos density") {
    BilliardTable tb = fixtures::table("circle04");
    auto pts = sample_invariant(tb, 100000, 42);
    const int bins = 40;
    std::vector<double> counts(bins, 0.0);
    for (const auto& p : pts) {
        int b = std::min(bins - 1, static_cast<int>((std::sin(p.phi) + 1.0) / 2.0 * bins));
        counts[b] += 1.0;  // sin(phi) should be uniform
    }
    double expect = static_cast<double>(pts.size()) / bins;
    double chi2 = 0.0;
    for (double c : counts) chi2 += (c - expect) * (c - expect) / expect;
    CHECK(chi2_tail(chi2, bins - 1) > 0.01);
}

TEST_CASE("pushforward preserves the invariant measure (moderate n)") {
    BilliardTable tb = fixtures::table("circle04");
    int n = 30000;
    auto fresh = sample_invariant(tb, n, 101);
    auto moved = sample_invariant(tb, n, 202, 1u << 20);
    std::vector<double> fr, fs, mr, ms;
    for (const auto& p : fresh) {
        fr.push_back(p.r);
        fs.push_back(std::sin(p.phi));
    }
    for (const auto& p : moved) {
        CollisionEvent ev = billiard_map(tb, p);
        if (!ev.ok()) continue;
        mr.push_back(ev.next.r);
        ms.push_back(std::sin(ev.next.phi));
    }
    CHECK(ks_two_sample(fr, mr) < 0.02);
    CHECK(ks_two_sample(fs, ms) < 0.02);
}

TEST_CASE("mean free flight matches pi |D| / |boundary|") {
    BilliardTable tb = fixtures::table("circle04");
    double analytic = tb.mean_free_path();
    for (uint64_t seed : {91u, 92u}) {
        auto pts = sample_invariant(tb, 20000, seed);
        std::vector<double> taus;
        for (const auto& p : pts) {
            CollisionEvent ev = billiard_map(tb, p);
            if (ev.ok()) taus.push_back(ev.tau);
        }
        double m = mean_of(taus);
        double se = std::sqrt(variance_of(taus) / taus.size());
        INFO("seed " << seed << " mean " << m << " analytic " << analytic);
        CHECK(std::abs(m - analytic) < 3.0 * se);
    }
}

TEST_CASE("minimal flight between distinct scatterers stays positive") {
    BilliardTable tb = fixtures::table("fig1");
    RngStream rng(23, 5);
    double tau_min = 1e9;
    for (int i = 0; i < 3000; ++i) {
        CollisionPoint x = sample_one(tb, rng);
        CollisionEvent ev = billiard_map(tb, x);
        if (!ev.ok()) continue;
        if (ev.next.scatterer != x.scatterer) tau_min = std::min(tau_min, ev.tau);
    }
    CHECK(tau_min > 1e-4);
    CHECK(tau_min >= tb.min_gap - 1e-9);
}
