#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "billiard/errors.hpp"
#include "billiard/rng.hpp"
#include "billiard/table.hpp"
#include "billiard/vec.hpp"

namespace billiard {

// point of the collision space M in (r, phi) coordinates
struct CollisionPoint {
    double r = 0.0;
    double phi = 0.0;  // clockwise from the inward normal, in [-pi/2, pi/2]
    int scatterer = 0;
    int arc = 0;
};

// time reversal involution; I o F o I o F = id away from singularities
inline CollisionPoint involution(const CollisionPoint& x) {
    return {x.r, -x.phi, x.scatterer, x.arc};
}

struct CollisionEvent {
    enum class Status { Ok, CornerHit, NoCollision };
    Status status = Status::Ok;
    CollisionPoint next;
    double tau = 0.0;        // free flight length (unit speed)
    Vec2 displacement;       // lift of the flight to the plane
    bool grazing = false;
    // at a proper corner hit the continuation is multivalued; both limit
    // branches are reported and the caller chooses (or discards the orbit)
    std::vector<CollisionPoint> branches;

    bool ok() const { return status == Status::Ok; }
};

struct FlightOptions {
    double t_max = 1e6;        // exceeding this signals a corridor direction
    double corner_tol = 1e-11; // configuration-space distance for corner hits
    double grazing_tol = 1e-11;
    double t_skip = 1e-12;     // ignore the departure point itself
};

namespace detail {

// real roots of c3 x^3 + c2 x^2 + c1 x + c0, appended to out
inline int solve_cubic(double c3, double c2, double c1, double c0,
                       std::array<double, 3>& out) {
    int n = 0;
    if (std::abs(c3) < 1e-14 * (std::abs(c2) + std::abs(c1) + std::abs(c0))) {
        if (std::abs(c2) < 1e-300) {
            if (std::abs(c1) > 1e-300) out[n++] = -c0 / c1;
            return n;
        }
        double disc = c1 * c1 - 4.0 * c2 * c0;
        if (disc < 0) return 0;
        double sq = std::sqrt(disc);
        out[n++] = (-c1 + sq) / (2.0 * c2);
        out[n++] = (-c1 - sq) / (2.0 * c2);
        return n;
    }
    double a = c2 / c3, b = c1 / c3, c = c0 / c3;
    double p = b - a * a / 3.0;
    double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    double off = -a / 3.0;
    double disc = q * q / 4.0 + p * p * p / 27.0;
    if (disc > 0) {
        double sq = std::sqrt(disc);
        double u = std::cbrt(-q / 2.0 + sq), v = std::cbrt(-q / 2.0 - sq);
        out[n++] = u + v + off;
    } else {
        double rr = std::sqrt(std::max(-p * p * p / 27.0, 0.0));
        double phi = std::acos(std::clamp(-q / (2.0 * rr), -1.0, 1.0));
        double m = 2.0 * std::sqrt(std::max(-p / 3.0, 0.0));
        out[n++] = m * std::cos(phi / 3.0) + off;
        out[n++] = m * std::cos((phi + 2.0 * M_PI) / 3.0) + off;
        out[n++] = m * std::cos((phi + 4.0 * M_PI) / 3.0) + off;
    }
    // Newton polish
    for (int i = 0; i < n; ++i) {
        double x = out[i];
        for (int it = 0; it < 3; ++it) {
            double f = ((c3 * x + c2) * x + c1) * x + c0;
            double fp = (3.0 * c3 * x + 2.0 * c2) * x + c1;
            if (std::abs(fp) < 1e-300) break;
            x -= f / fp;
        }
        out[i] = x;
    }
    return n;
}

struct ArcHit {
    double t = std::numeric_limits<double>::infinity();  // flight parameter
    int scatterer = -1;
    int arc = -1;
    double u = 0.0;  // arc parameter
    Vec2 point;      // in plane (unwrapped) coordinates
};

// intersection of the ray q + t v with one arc translated by shift
inline void intersect_arc(const BoundaryArc& a, int si, int ai, const Vec2& shift,
                          const Vec2& q, const Vec2& v, double t_skip, double t_best,
                          ArcHit& best) {
    if (a.kind == ArcKind::Circle && a.bumps.empty()) {
        Vec2 c = a.center + shift;
        Vec2 w = q - c;
        double bq = dot(w, v);
        double cq = w.norm2() - a.radius * a.radius;
        double disc = bq * bq - cq;
        if (disc < 0) return;
        double sq = std::sqrt(disc);
        for (double t : {-bq - sq, -bq + sq}) {
            if (t <= t_skip || t >= std::min(t_best, best.t)) continue;
            Vec2 hit = q + v * t;
            double th = std::atan2(hit.y - c.y, hit.x - c.x);
            double raw = std::fmod(th - a.theta0, 2.0 * M_PI);
            if (raw > 1e-12) raw -= 2.0 * M_PI;
            double u = raw / (a.theta1 - a.theta0);
            if (u < -1e-9 || u > 1.0 + 1e-9) continue;
            u = std::clamp(u, 0.0, 1.0);
            best = {t, si, ai, u, hit};
        }
        return;
    }
    if (a.kind == ArcKind::Cubic && a.bumps.empty()) {
        // cross(v, f(u) - q) is cubic in u
        Vec2 q0 = q - shift;
        double d0 = v.x * (a.cy[0] - q0.y) - v.y * (a.cx[0] - q0.x);
        double d1 = v.x * a.cy[1] - v.y * a.cx[1];
        double d2 = v.x * a.cy[2] - v.y * a.cx[2];
        double d3 = v.x * a.cy[3] - v.y * a.cx[3];
        std::array<double, 3> roots;
        int n = solve_cubic(d3, d2, d1, d0, roots);
        for (int i = 0; i < n; ++i) {
            double u = roots[i];
            if (u < -1e-9 || u > 1.0 + 1e-9) continue;
            u = std::clamp(u, 0.0, 1.0);
            Vec2 p = a.position(u) + shift;
            double t = dot(p - q, v);
            if (t <= t_skip || t >= std::min(t_best, best.t)) continue;
            if (std::abs(cross(p - q, v)) > 1e-9 * std::max(1.0, t)) continue;
            best = {t, si, ai, u, p};
        }
        return;
    }
    // bumped arc: sample the signed side function and bisect sign changes
    const int N = 512;
    Vec2 q0 = q - shift;
    auto side = [&](double u) { return cross(v, a.position(u) - q0); };
    double prev = side(0.0);
    for (int i = 1; i <= N; ++i) {
        double u1 = static_cast<double>(i) / N;
        double cur = side(u1);
        if (prev == 0.0 || prev * cur < 0.0) {
            double lo = static_cast<double>(i - 1) / N, hi = u1, flo = prev;
            for (int it = 0; it < 60; ++it) {
                double mid = 0.5 * (lo + hi);
                double fm = side(mid);
                if (flo * fm <= 0.0) hi = mid; else { lo = mid; flo = fm; }
            }
            double u = 0.5 * (lo + hi);
            Vec2 p = a.position(u) + shift;
            double t = dot(p - q, v);
            if (t > t_skip && t < std::min(t_best, best.t)) best = {t, si, ai, u, p};
        }
        prev = cur;
    }
}

}  // namespace detail

// first boundary hit along q + t v, marching through lattice cells
inline CollisionEvent next_collision(const BilliardTable& tb, Vec2 q, Vec2 v,
                                     const FlightOptions& opt = {}) {
    detail::ArcHit best;

    // Amanatides-Woo grid traversal
    double cx = std::floor(q.x), cy = std::floor(q.y);
    int sx = (v.x > 0) - (v.x < 0), sy = (v.y > 0) - (v.y < 0);
    double tdx = (v.x != 0) ? std::abs(1.0 / v.x) : std::numeric_limits<double>::infinity();
    double tdy = (v.y != 0) ? std::abs(1.0 / v.y) : std::numeric_limits<double>::infinity();
    double tmx = (v.x > 0) ? (cx + 1.0 - q.x) / v.x
                           : (v.x < 0 ? (cx - q.x) / v.x : std::numeric_limits<double>::infinity());
    double tmy = (v.y > 0) ? (cy + 1.0 - q.y) / v.y
                           : (v.y < 0 ? (cy - q.y) / v.y : std::numeric_limits<double>::infinity());

    double t_entry = 0.0;
    while (true) {
        if (t_entry > best.t || t_entry > opt.t_max) break;
        for (size_t si = 0; si < tb.scatterers.size(); ++si) {
            const Scatterer& s = tb.scatterers[si];
            for (auto [dx, dy] : s.ray_offsets) {
                Vec2 shift(cx + dx, cy + dy);
                Vec2 c = s.hull_center + shift;
                // bounding-circle prune; t_ca is the closest approach along the ray
                double t_ca = -dot(q - c, v);
                double d2 = (q - c).norm2() - t_ca * t_ca;
                if (d2 > s.hull_radius * s.hull_radius) continue;
                if (t_ca + s.hull_radius < 0.0) continue;
                if (t_ca - s.hull_radius > std::min(best.t, opt.t_max)) continue;
                for (size_t ai = 0; ai < s.arcs.size(); ++ai)
                    detail::intersect_arc(s.arcs[ai], static_cast<int>(si),
                                          static_cast<int>(ai), shift, q, v,
                                          opt.t_skip, opt.t_max, best);
            }
        }
        // advance to the next cell
        if (tmx < tmy) {
            t_entry = tmx;
            tmx += tdx;
            cx += sx;
        } else {
            t_entry = tmy;
            tmy += tdy;
            cy += sy;
        }
    }

    CollisionEvent ev;
    if (best.arc < 0 || best.t > opt.t_max) {
        ev.status = CollisionEvent::Status::NoCollision;
        ev.tau = opt.t_max;
        ev.displacement = v * opt.t_max;
        return ev;
    }

    ev.tau = best.t;
    ev.displacement = v * best.t;

    const Scatterer& s = tb.scatterers[best.scatterer];
    Vec2 hit_local = best.point;  // meaningful modulo Z^2

    // corner proximity (in configuration space)
    for (const auto& c : s.corners) {
        Vec2 d = hit_local - c.pos;
        d.x -= std::round(d.x);
        d.y -= std::round(d.y);
        if (d.norm() < opt.corner_tol) {
            ev.status = CollisionEvent::Status::CornerHit;
            // both one-sided continuations
            int j_next = c.arc_next;
            int j_prev = (j_next + static_cast<int>(s.arcs.size()) - 1) %
                         static_cast<int>(s.arcs.size());
            for (int k = 0; k < 2; ++k) {
                int aj = (k == 0) ? j_prev : j_next;
                double tpar = (k == 0) ? 1.0 : 0.0;
                Vec2 n = s.arcs[aj].normal_unit(tpar);
                Vec2 vr = v - n * (2.0 * dot(v, n));
                CollisionPoint cp;
                cp.scatterer = best.scatterer;
                cp.arc = aj;
                cp.r = tb.arc_offsets[best.scatterer][aj] +
                       ((k == 0) ? s.arcs[aj].length() : 0.0);
                cp.phi = angle_from(n, vr);
                ev.branches.push_back(cp);
            }
            ev.next = ev.branches.front();
            return ev;
        }
    }

    Vec2 n = s.arcs[best.arc].normal_unit(best.u);
    double vn = dot(v, n);
    Vec2 vr = v - n * (2.0 * vn);
    ev.next.scatterer = best.scatterer;
    ev.next.arc = best.arc;
    ev.next.r = tb.arc_offsets[best.scatterer][best.arc] +
                s.arcs[best.arc].arclength_at(best.u);
    ev.next.phi = angle_from(n, vr);
    ev.grazing = (M_PI / 2.0 - std::abs(ev.next.phi)) < opt.grazing_tol;
    return ev;
}

// post-collisional unit velocity of a phase point: rotate the inward normal
// clockwise by phi
inline Vec2 outgoing_velocity(const Vec2& n, double phi) {
    double c = std::cos(phi), s = std::sin(phi);
    return {n.x * c + n.y * s, -n.x * s + n.y * c};
}

inline BoundaryPoint boundary_of(const BilliardTable& tb, const CollisionPoint& x) {
    const BoundaryArc& a = tb.arc(x.scatterer, x.arc);
    double s = x.r - tb.arc_offsets[x.scatterer][x.arc];
    double t = a.param_at_arclength(s);
    return tb.boundary_point_local(x.scatterer, x.arc, t);
}

inline CollisionEvent billiard_map(const BilliardTable& tb, const CollisionPoint& x,
                                   const FlightOptions& opt = {}) {
    BoundaryPoint bp = boundary_of(tb, x);
    Vec2 v = outgoing_velocity(bp.normal, x.phi);
    return next_collision(tb, bp.pos, v, opt);
}

struct Mat2 {
    double a = 0, b = 0, c = 0, d = 0;  // [[a, b], [c, d]]
    double det() const { return a * d - b * c; }
    std::array<double, 2> apply(double u, double w) const { return {a * u + b * w, c * u + d * w}; }
};

// analytic derivative of the billiard map in (r, phi); the event for x may be
// passed in to avoid recomputing the flight
inline Mat2 tangent_map(const BilliardTable& tb, const CollisionPoint& x,
                        const CollisionEvent* precomputed = nullptr,
                        const FlightOptions& opt = {}) {
    CollisionEvent ev = precomputed ? *precomputed : billiard_map(tb, x, opt);
    if (ev.status == CollisionEvent::Status::CornerHit)
        throw SingularityTooClose("tangent map undefined: flight hits a corner");
    if (ev.status == CollisionEvent::Status::NoCollision)
        throw SingularityTooClose("tangent map undefined: no collision within cap");
    double cphi = std::cos(x.phi);
    double cphi1 = std::cos(ev.next.phi);
    if (cphi < 1e-12 || cphi1 < 1e-12)
        throw SingularityTooClose("tangent map undefined: grazing collision");
    double tau = ev.tau;
    double k = boundary_of(tb, x).curvature;
    double k1 = boundary_of(tb, ev.next).curvature;
    Mat2 m;
    double inv = -1.0 / cphi1;
    m.a = inv * (tau * k + cphi);
    m.b = inv * tau;
    m.c = inv * (tau * k * k1 + k * cphi1 + k1 * cphi);
    m.d = inv * (tau * k1 + cphi1);
    return m;
}

// i.i.d. draws from the invariant measure d mu = C cos(phi) dr dphi
inline std::vector<CollisionPoint> sample_invariant(const BilliardTable& tb, int n,
                                                    uint64_t seed, uint64_t stream0 = 0) {
    std::vector<CollisionPoint> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        RngStream rng(seed, stream0 + static_cast<uint64_t>(i));
        CollisionPoint x;
        x.r = rng.u01() * tb.total_length;
        x.phi = std::asin(2.0 * rng.u01() - 1.0);
        int si, ai;
        double t;
        tb.locate(x.r, si, ai, t);
        x.scatterer = si;
        x.arc = ai;
        out.push_back(x);
    }
    return out;
}

inline CollisionPoint sample_one(const BilliardTable& tb, RngStream& rng) {
    CollisionPoint x;
    x.r = rng.u01() * tb.total_length;
    x.phi = std::asin(2.0 * rng.u01() - 1.0);
    int si, ai;
    double t;
    tb.locate(x.r, si, ai, t);
    x.scatterer = si;
    x.arc = ai;
    return x;
}

}  // namespace billiard
