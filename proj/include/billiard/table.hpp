#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "billiard/arc.hpp"
#include "billiard/errors.hpp"
#include "billiard/vec.hpp"

namespace billiard {

struct Corner {
    Vec2 pos;
    double gamma = 0.0;       // interior angle at the table side, in (0, 2pi)
    Vec2 ray_prev;            // unit half-tangent back along the previous arc
    Vec2 ray_next;            // unit half-tangent forward along the next arc
    int scatterer = 0;
    int arc_next = 0;         // the corner sits at the start of this arc
};

struct Scatterer {
    std::vector<BoundaryArc> arcs;
    std::vector<Corner> corners;  // empty for smooth scatterers
    Vec2 hull_center;             // bounding circle
    double hull_radius = 0.0;
    double area = 0.0;
    std::vector<Vec2> polyline;   // dense boundary sample, one pass around
    std::vector<double> polyline_t;  // global param: arc_index + t
    // lattice offsets d such that this scatterer translated by d can reach
    // the unit cell; the ray marcher instantiates candidates from these
    std::vector<std::pair<int, int>> ray_offsets;
};

struct BoundaryPoint {
    Vec2 pos;
    Vec2 tangent;   // clockwise unit tangent
    Vec2 normal;    // inward unit normal (into the table)
    double curvature = 0.0;
    int scatterer = 0;
    int arc = 0;
    double t = 0.0;  // parameter within the arc
};

struct AdmissibilityConfig {
    double cusp_tol = 1e-6;          // corner angle below this is a cusp
    double corner_match_tol = 1e-9;  // chain closure tolerance
    double flat_corner_deriv_tol = 1e-8;  // gamma = pi corners must differ in 2nd/3rd derivative
    double disjoint_tol = 1e-9;      // minimal allowed gap between scatterers
    int curvature_grid = 1024;
    int polyline_per_arc = 512;
};

class BilliardTable {
public:
    std::vector<Scatterer> scatterers;
    double kappa_max = 0.0;
    double kappa_min = 0.0;
    double alpha0 = M_PI;  // min corner angle; pi when there are no corners
    double min_gap = 0.0;  // smallest measured distance between scatterer pieces
    double total_length = 0.0;

    // arc_offsets[i][j] = a_{i,j}; arc j spans [a, a + length]
    std::vector<std::vector<double>> arc_offsets;

    bool has_corners() const {
        for (const auto& s : scatterers)
            if (!s.corners.empty()) return true;
        return false;
    }

    int arc_count() const {
        int n = 0;
        for (const auto& s : scatterers) n += static_cast<int>(s.arcs.size());
        return n;
    }

    const BoundaryArc& arc(int si, int ai) const { return scatterers[si].arcs[ai]; }

    double arc_start(int si, int ai) const { return arc_offsets[si][ai]; }
    double arc_end(int si, int ai) const {
        return arc_offsets[si][ai] + scatterers[si].arcs[ai].length();
    }
    double scatterer_start(int si) const { return arc_offsets[si].front(); }
    double scatterer_length(int si) const {
        double L = 0.0;
        for (const auto& a : scatterers[si].arcs) L += a.length();
        return L;
    }

    // Maps a global arclength coordinate to (scatterer, arc, local param).
    // A coordinate at a junction belongs to the arc whose interval starts
    // there; smooth single-arc scatterers wrap cyclically.
    void locate(double r, int& si, int& ai, double& t) const {
        if (r < 0.0 || r > total_length) {
            // allow cyclic wrap only inside a smooth scatterer via locate_wrapped
            throw OutOfRange("arclength coordinate outside boundary range");
        }
        for (si = 0; si < static_cast<int>(scatterers.size()); ++si) {
            double s0 = scatterer_start(si);
            double s1 = s0 + scatterer_length(si);
            if (r < s0 || r > s1) continue;
            const auto& arcs = scatterers[si].arcs;
            for (ai = 0; ai < static_cast<int>(arcs.size()); ++ai) {
                double a = arc_offsets[si][ai];
                double b = a + arcs[ai].length();
                bool last = (ai + 1 == static_cast<int>(arcs.size()));
                if (r >= a && (r < b || (last && r <= b + 1e-12))) {
                    t = arcs[ai].param_at_arclength(r - a);
                    return;
                }
            }
        }
        throw OutOfRange("arclength coordinate not matched to an arc");
    }

    // wraps r into the owning smooth scatterer's range; used for cylinder
    // coordinates on full circles
    double wrap_r(double r, int si) const {
        double s0 = scatterer_start(si);
        double L = scatterer_length(si);
        double u = std::fmod(r - s0, L);
        if (u < 0) u += L;
        return s0 + u;
    }

    BoundaryPoint boundary_point(double r) const {
        int si, ai;
        double t;
        locate(r, si, ai, t);
        return boundary_point_local(si, ai, t);
    }

    BoundaryPoint boundary_point_local(int si, int ai, double t) const {
        const BoundaryArc& a = scatterers[si].arcs[ai];
        BoundaryPoint bp;
        bp.pos = a.position(t);
        bp.tangent = a.tangent_unit(t);
        bp.normal = rot90(bp.tangent);
        bp.curvature = a.curvature(t);
        bp.scatterer = si;
        bp.arc = ai;
        bp.t = t;
        return bp;
    }

    double r_of(int si, int ai, double t) const {
        return arc_offsets[si][ai] + scatterers[si].arcs[ai].arclength_at(t);
    }

    // r-distance along one scatterer's boundary, cyclic for smooth scatterers
    double r_distance(double r1, double r2, int si) const {
        double d = std::abs(r1 - r2);
        if (scatterers[si].arcs.size() == 1 && scatterers[si].arcs[0].is_full_circle()) {
            double L = scatterer_length(si);
            d = std::min(d, L - d);
        }
        return d;
    }

    double area() const {
        double a = 1.0;
        for (const auto& s : scatterers) a -= s.area;
        return a;
    }

    // mean free flight of the billiard map: pi * |D| / |boundary|
    double mean_free_path() const { return M_PI * area() / total_length; }

    // point strictly inside some scatterer (checked against translates)?
    bool inside_scatterer(const Vec2& q) const {
        for (size_t si = 0; si < scatterers.size(); ++si) {
            const auto& s = scatterers[si];
            for (int mx = -1; mx <= 1; ++mx)
                for (int my = -1; my <= 1; ++my) {
                    Vec2 p = q - Vec2(mx, my);
                    if (dist(p, s.hull_center) > s.hull_radius + 1e-12) continue;
                    if (point_in_polygon(p, s.polyline)) return true;
                }
        }
        return false;
    }

    bool in_domain(const Vec2& q) const { return !inside_scatterer(wrap01(q)); }

    static bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& poly) {
        bool in = false;
        size_t n = poly.size();
        for (size_t i = 0, j = n - 1; i < n; j = i++) {
            const Vec2& a = poly[i];
            const Vec2& b = poly[j];
            if ((a.y > p.y) != (b.y > p.y)) {
                double xint = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if (p.x < xint) in = !in;
            }
        }
        return in;
    }

    nlohmann::json emit_config() const;
};

namespace detail {

inline double corner_angle(const Vec2& ray_a, const Vec2& ray_b, const Vec2& into_table) {
    double a0 = std::atan2(ray_a.y, ray_a.x);
    double a1 = std::atan2(ray_b.y, ray_b.x);
    double sweep = a1 - a0;
    while (sweep < 0) sweep += 2.0 * M_PI;
    while (sweep >= 2.0 * M_PI) sweep -= 2.0 * M_PI;
    double aw = std::atan2(into_table.y, into_table.x) - a0;
    while (aw < 0) aw += 2.0 * M_PI;
    while (aw >= 2.0 * M_PI) aw -= 2.0 * M_PI;
    // the table-side wedge is the one containing the inward bisector
    return (aw <= sweep) ? sweep : 2.0 * M_PI - sweep;
}

inline double segment_point_dist(const Vec2& a, const Vec2& b, const Vec2& p) {
    Vec2 ab = b - a;
    double t = dot(p - a, ab) / std::max(ab.norm2(), 1e-300);
    t = std::min(std::max(t, 0.0), 1.0);
    return dist(a + ab * t, p);
}

// distance between segments; zero when they intersect
inline double segment_segment_dist(const Vec2& a0, const Vec2& a1, const Vec2& b0,
                                   const Vec2& b1) {
    double d1 = cross(a1 - a0, b0 - a0), d2 = cross(a1 - a0, b1 - a0);
    double d3 = cross(b1 - b0, a0 - b0), d4 = cross(b1 - b0, a1 - b0);
    if (((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0))) return 0.0;
    return std::min(std::min(segment_point_dist(a0, a1, b0), segment_point_dist(a0, a1, b1)),
                    std::min(segment_point_dist(b0, b1, a0), segment_point_dist(b0, b1, a1)));
}

inline double polyline_min_dist(const std::vector<Vec2>& pa, const std::vector<Vec2>& pb,
                                const Vec2& shift) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i + 1 < pa.size(); ++i)
        for (size_t j = 0; j + 1 < pb.size(); ++j) {
            Vec2 b0 = pb[j] + shift, b1 = pb[j + 1] + shift;
            best = std::min(best, segment_segment_dist(pa[i], pa[i + 1], b0, b1));
            if (best == 0.0) return 0.0;
        }
    return best;
}

}  // namespace detail

inline BoundaryArc parse_arc(const nlohmann::json& j) {
    BoundaryArc a;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "circle") {
        a.kind = ArcKind::Circle;
        a.center = {j.at("center").at(0).get<double>(), j.at("center").at(1).get<double>()};
        a.radius = j.at("radius").get<double>();
        a.theta0 = j.at("theta0").get<double>();
        a.theta1 = j.at("theta1").get<double>();
        if (a.radius <= 0.0) throw ConfigError("circle arc radius must be positive");
        if (a.theta1 >= a.theta0)
            throw ConfigError("circle arc must be clockwise: theta1 < theta0");
    } else if (kind == "cubic") {
        a.kind = ArcKind::Cubic;
        for (int k = 0; k < 4; ++k) {
            a.cx[k] = j.at("cx").at(k).get<double>();
            a.cy[k] = j.at("cy").at(k).get<double>();
        }
    } else {
        throw ConfigError("unknown arc kind: " + kind);
    }
    if (j.contains("bumps")) {
        for (const auto& bj : j.at("bumps")) {
            BumpTerm b;
            b.center = bj.at("center").get<double>();
            b.half_width = bj.at("half_width").get<double>();
            b.height = bj.at("height").get<double>();
            b.dir = {bj.at("dir").at(0).get<double>(), bj.at("dir").at(1).get<double>()};
            a.bumps.push_back(b);
        }
    }
    a.init_cache();
    return a;
}

inline nlohmann::json emit_arc(const BoundaryArc& a) {
    nlohmann::json j;
    if (a.kind == ArcKind::Circle) {
        j["kind"] = "circle";
        j["center"] = {a.center.x, a.center.y};
        j["radius"] = a.radius;
        j["theta0"] = a.theta0;
        j["theta1"] = a.theta1;
    } else {
        j["kind"] = "cubic";
        j["cx"] = a.cx;
        j["cy"] = a.cy;
    }
    if (!a.bumps.empty()) {
        nlohmann::json bs = nlohmann::json::array();
        for (const auto& b : a.bumps)
            bs.push_back({{"center", b.center},
                          {"half_width", b.half_width},
                          {"height", b.height},
                          {"dir", {b.dir.x, b.dir.y}}});
        j["bumps"] = bs;
    }
    return j;
}

inline nlohmann::json BilliardTable::emit_config() const {
    nlohmann::json j;
    j["scatterers"] = nlohmann::json::array();
    for (const auto& s : scatterers) {
        nlohmann::json js;
        js["arcs"] = nlohmann::json::array();
        for (const auto& a : s.arcs) js["arcs"].push_back(emit_arc(a));
        j["scatterers"].push_back(js);
    }
    return j;
}

inline BilliardTable build_table(const nlohmann::json& cfg,
                                 const AdmissibilityConfig& adm = {}) {
    BilliardTable tb;
    if (!cfg.contains("scatterers") || cfg.at("scatterers").empty())
        throw ConfigError("table config needs at least one scatterer");

    for (const auto& sj : cfg.at("scatterers")) {
        Scatterer s;
        for (const auto& aj : sj.at("arcs")) s.arcs.push_back(parse_arc(aj));
        tb.scatterers.push_back(std::move(s));
    }

    double kmax = 0.0, kmin = std::numeric_limits<double>::infinity();
    for (auto& s : tb.scatterers) {
        // chain closure
        size_t J = s.arcs.size();
        for (size_t j = 0; j < J; ++j) {
            Vec2 e = s.arcs[j].position(1.0);
            Vec2 b = s.arcs[(j + 1) % J].position(0.0);
            if (dist(e, b) > adm.corner_match_tol)
                throw OpenBoundaryChain("consecutive arcs do not share endpoints");
        }

        // curvature: grid scan with a first-order interval margin
        for (auto& a : s.arcs) {
            int n = adm.curvature_grid;
            double prev = a.curvature(0.0);
            double max_slope = 0.0, min_k = prev;
            for (int i = 1; i <= n; ++i) {
                double k = a.curvature(static_cast<double>(i) / n);
                max_slope = std::max(max_slope, std::abs(k - prev) * n);
                min_k = std::min(min_k, k);
                kmax = std::max(kmax, k);
                prev = k;
            }
            kmin = std::min(kmin, min_k);
            if (min_k <= 0.0 || min_k <= 0.5 * max_slope / n)
                throw NonConvexArc("arc curvature is not positive everywhere");
        }

        // corners
        bool smooth_seam = (J == 1 && s.arcs[0].is_full_circle());
        if (!smooth_seam) {
            for (size_t j = 0; j < J; ++j) {
                const BoundaryArc& prev_arc = s.arcs[j];
                const BoundaryArc& next_arc = s.arcs[(j + 1) % J];
                Corner c;
                c.pos = next_arc.position(0.0);
                c.ray_prev = -prev_arc.tangent_unit(1.0);
                c.ray_next = next_arc.tangent_unit(0.0);
                Vec2 into = prev_arc.normal_unit(1.0) + next_arc.normal_unit(0.0);
                if (into.norm() < 1e-12) into = prev_arc.normal_unit(1.0);
                c.gamma = detail::corner_angle(c.ray_prev, c.ray_next, normalized(into));
                c.scatterer = static_cast<int>(&s - tb.scatterers.data());
                c.arc_next = static_cast<int>((j + 1) % J);
                if (c.gamma < adm.cusp_tol || c.gamma > 2.0 * M_PI - adm.cusp_tol)
                    throw CuspDetected("corner angle vanishes (cusp)");
                if (std::abs(c.gamma - M_PI) < adm.cusp_tol) {
                    // flat junction: second or third derivatives must differ
                    Jet3Vec2 je = prev_arc.jets(1.0);
                    Jet3Vec2 jb = next_arc.jets(0.0);
                    double d2 = std::hypot(je.x.d2 - jb.x.d2, je.y.d2 - jb.y.d2);
                    double d3 = std::hypot(je.x.d3 - jb.x.d3, je.y.d3 - jb.y.d3);
                    if (d2 < adm.flat_corner_deriv_tol && d3 < adm.flat_corner_deriv_tol)
                        throw DegenerateCorner("flat junction with matching jets is a regular point");
                }
                s.corners.push_back(c);
            }
        }

        // dense polyline, bounding circle, area
        int per = adm.polyline_per_arc;
        for (size_t j = 0; j < J; ++j) {
            for (int i = 0; i < per; ++i) {
                double t = static_cast<double>(i) / per;
                s.polyline.push_back(s.arcs[j].position(t));
                s.polyline_t.push_back(static_cast<double>(j) + t);
            }
        }
        s.polyline.push_back(s.arcs[0].position(0.0));
        s.polyline_t.push_back(0.0);

        Vec2 lo = s.polyline[0], hi = s.polyline[0];
        for (const auto& p : s.polyline) {
            lo.x = std::min(lo.x, p.x);
            lo.y = std::min(lo.y, p.y);
            hi.x = std::max(hi.x, p.x);
            hi.y = std::max(hi.y, p.y);
        }
        s.hull_center = (lo + hi) * 0.5;
        s.hull_radius = 0.0;
        for (const auto& p : s.polyline)
            s.hull_radius = std::max(s.hull_radius, dist(p, s.hull_center));

        for (int dx = -2; dx <= 2; ++dx)
            for (int dy = -2; dy <= 2; ++dy) {
                Vec2 c = s.hull_center + Vec2(dx, dy);
                double gx = std::max({0.0 - c.x, 0.0, c.x - 1.0});
                double gy = std::max({0.0 - c.y, 0.0, c.y - 1.0});
                if (std::hypot(gx, gy) <= s.hull_radius + 1e-9)
                    s.ray_offsets.emplace_back(dx, dy);
            }

        double area2 = 0.0;  // shoelace; clockwise traversal gives negative
        for (size_t i = 0; i + 1 < s.polyline.size(); ++i)
            area2 += cross(s.polyline[i], s.polyline[i + 1]);
        s.area = std::abs(area2) * 0.5;

        // simplicity: non-adjacent arcs of one scatterer keep positive distance
        for (size_t ja = 0; ja + 1 < J; ++ja)
            for (size_t jb = ja + 1; jb < J; ++jb) {
                if (jb == ja + 1 || (ja == 0 && jb == J - 1)) continue;
                std::vector<Vec2> pa(s.polyline.begin() + ja * per,
                                     s.polyline.begin() + (ja + 1) * per + 1);
                std::vector<Vec2> pb(s.polyline.begin() + jb * per,
                                     s.polyline.begin() + (jb + 1) * per + 1);
                if (detail::polyline_min_dist(pa, pb, {0, 0}) < adm.disjoint_tol)
                    throw NonConvexArc("scatterer boundary self-intersects");
            }
    }
    tb.kappa_max = kmax;
    tb.kappa_min = kmin;

    for (const auto& s : tb.scatterers)
        for (const auto& c : s.corners)
            tb.alpha0 = std::min(tb.alpha0, std::min(c.gamma, 2.0 * M_PI - c.gamma));

    // disjointness across scatterers and lattice translates
    tb.min_gap = std::numeric_limits<double>::infinity();
    size_t d = tb.scatterers.size();
    for (size_t i = 0; i < d; ++i)
        for (size_t j = i; j < d; ++j)
            for (int mx = -1; mx <= 1; ++mx)
                for (int my = -1; my <= 1; ++my) {
                    if (i == j && mx == 0 && my == 0) continue;
                    if (i == j && (mx < 0 || (mx == 0 && my < 0))) continue;  // symmetric pairs
                    const auto& A = tb.scatterers[i];
                    const auto& B = tb.scatterers[j];
                    Vec2 shift(mx, my);
                    double hull_gap = dist(A.hull_center, B.hull_center + shift) -
                                      A.hull_radius - B.hull_radius;
                    if (hull_gap > 0.05) {
                        tb.min_gap = std::min(tb.min_gap, hull_gap);
                        continue;
                    }
                    double g = detail::polyline_min_dist(A.polyline, B.polyline, shift);
                    tb.min_gap = std::min(tb.min_gap, g);
                    if (g < adm.disjoint_tol)
                        throw OverlappingScatterers("scatterers touch or overlap on the torus");
                }

    // global arclength offsets
    double off = 0.0;
    for (auto& s : tb.scatterers) {
        std::vector<double> starts;
        for (auto& a : s.arcs) {
            starts.push_back(off);
            off += a.length();
        }
        tb.arc_offsets.push_back(std::move(starts));
    }
    tb.total_length = off;
    return tb;
}

// Upper bound for the C3 distance between two tables with identical
// combinatorial data; +infinity otherwise. Derivatives of order k are
// measured against a parameter rescaled by 2*pi, which reproduces the
// closed-form value |r1 - r2| for concentric full circles.
inline double table_distance(const BilliardTable& t1, const BilliardTable& t2,
                             int grid = 2048) {
    if (t1.scatterers.size() != t2.scatterers.size())
        return std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < t1.scatterers.size(); ++i)
        if (t1.scatterers[i].arcs.size() != t2.scatterers[i].arcs.size())
            return std::numeric_limits<double>::infinity();

    double d = 0.0;
    const double s1 = 1.0 / (2.0 * M_PI);
    const double s2 = s1 * s1, s3 = s2 * s1;
    for (size_t i = 0; i < t1.scatterers.size(); ++i)
        for (size_t j = 0; j < t1.scatterers[i].arcs.size(); ++j) {
            const BoundaryArc& a = t1.scatterers[i].arcs[j];
            const BoundaryArc& b = t2.scatterers[i].arcs[j];
            std::vector<double> ts;
            ts.reserve(grid + 16);
            for (int k = 0; k <= grid; ++k) ts.push_back(static_cast<double>(k) / grid);
            for (const auto* arc : {&a, &b})
                for (const auto& bm : arc->bumps)
                    for (int k = -8; k <= 8; ++k) {
                        double t = bm.center + bm.half_width * k / 16.0;
                        if (t > 0.0 && t < 1.0) ts.push_back(t);
                    }
            for (double t : ts) {
                Jet3Vec2 ja = a.jets(t), jb = b.jets(t);
                d = std::max(d, std::hypot(ja.x.f - jb.x.f, ja.y.f - jb.y.f));
                d = std::max(d, s1 * std::hypot(ja.x.d1 - jb.x.d1, ja.y.d1 - jb.y.d1));
                d = std::max(d, s2 * std::hypot(ja.x.d2 - jb.x.d2, ja.y.d2 - jb.y.d2));
                d = std::max(d, s3 * std::hypot(ja.x.d3 - jb.x.d3, ja.y.d3 - jb.y.d3));
            }
        }
    return d;
}

}  // namespace billiard
