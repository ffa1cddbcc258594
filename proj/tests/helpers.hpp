#pragma once

// Test-only oracles, kept independent of the implementation paths they check.

#include <cmath>
#include <optional>
#include <vector>

#include "billiard/dynamics.hpp"
#include "billiard/fixtures.hpp"
#include "billiard/table.hpp"

namespace testing_oracles {

using namespace billiard;

// arc length by Gauss-Legendre 5-point panels (independent of the arc's own
// Simpson cache)
inline double arclength_gauss(const BoundaryArc& a, int panels = 256) {
    static const double xs[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                 0.5384693101056831, 0.9061798459386640};
    static const double ws[5] = {0.2369268850561891, 0.4786286704993665,
                                 0.5688888888888889, 0.4786286704993665,
                                 0.2369268850561891};
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        double lo = static_cast<double>(p) / panels, hi = static_cast<double>(p + 1) / panels;
        double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (int k = 0; k < 5; ++k)
            total += ws[k] * half * a.velocity(mid + half * xs[k]).norm();
    }
    return total;
}

// minimum distance between boundaries of different scatterers by dense
// sampling plus local refinement; independent of build_table's check
inline double pairwise_distance_sampled(const BilliardTable& tb, int per_arc = 800) {
    std::vector<std::vector<Vec2>> pts(tb.scatterers.size());
    for (size_t si = 0; si < tb.scatterers.size(); ++si)
        for (const auto& a : tb.scatterers[si].arcs)
            for (int i = 0; i < per_arc; ++i)
                pts[si].push_back(a.position((i + 0.5) / per_arc));
    double best = 1e9;
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = 0; j < pts.size(); ++j)
            for (int mx = -1; mx <= 1; ++mx)
                for (int my = -1; my <= 1; ++my) {
                    if (i == j && mx == 0 && my == 0) continue;
                    Vec2 sh(mx, my);
                    for (const auto& p : pts[i])
                        for (const auto& q : pts[j]) best = std::min(best, dist(p, q + sh));
                }
    return best;
}

// central finite differences of the billiard map; returns nothing when the
// stencil straddles an arc change or a singularity
inline std::optional<Mat2> tangent_fd(const BilliardTable& tb, const CollisionPoint& x,
                                      double h = 1e-6) {
    auto eval = [&](double r, double phi) -> std::optional<CollisionPoint> {
        CollisionPoint y;
        y.r = r;
        y.phi = phi;
        int si, ai;
        double t;
        double rr = r;
        if (tb.scatterers[x.scatterer].arcs.size() == 1 &&
            tb.scatterers[x.scatterer].arcs[0].is_full_circle())
            rr = tb.wrap_r(r, x.scatterer);
        try {
            tb.locate(rr, si, ai, t);
        } catch (const OutOfRange&) {
            return std::nullopt;
        }
        y.r = rr;
        y.scatterer = si;
        y.arc = ai;
        CollisionEvent ev = billiard_map(tb, y);
        if (!ev.ok() || ev.grazing) return std::nullopt;
        return ev.next;
    };
    auto rp = eval(x.r + h, x.phi), rm = eval(x.r - h, x.phi);
    auto pp = eval(x.r, x.phi + h), pm = eval(x.r, x.phi - h);
    if (!rp || !rm || !pp || !pm) return std::nullopt;
    if (rp->scatterer != rm->scatterer || rp->arc != rm->arc) return std::nullopt;
    if (pp->scatterer != pm->scatterer || pp->arc != pm->arc) return std::nullopt;
    if (rp->scatterer != pp->scatterer || rp->arc != pp->arc) return std::nullopt;

    auto dr = [&](double a, double b, int si) {
        double d = a - b;
        const auto& s = tb.scatterers[si];
        if (s.arcs.size() == 1 && s.arcs[0].is_full_circle()) {
            double L = s.arcs[0].length();
            if (d > L / 2) d -= L;
            if (d < -L / 2) d += L;
        }
        return d;
    };
    Mat2 m;
    m.a = dr(rp->r, rm->r, rp->scatterer) / (2 * h);
    m.c = (rp->phi - rm->phi) / (2 * h);
    m.b = dr(pp->r, pm->r, pp->scatterer) / (2 * h);
    m.d = (pp->phi - pm->phi) / (2 * h);
    return m;
}

}  // namespace testing_oracles
