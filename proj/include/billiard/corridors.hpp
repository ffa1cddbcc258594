#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "billiard/bump.hpp"
#include "billiard/errors.hpp"
#include "billiard/table.hpp"
#include "billiard/vec.hpp"

namespace billiard {

struct CorridorBoundaryPoint {
    double r = 0.0;
    double phi = 0.0;
    bool corner = false;
    int side = 0;  // 0: right of v_H (smaller perpendicular coordinate), 1: left
    int scatterer = 0;
    int arc = 0;
    Vec2 pos;
};

struct Corridor {
    int P = 1, Q = 0;        // coprime direction (P, Q), P > 0 or (P, Q) = (0, 1)
    double width = 0.0;      // 0 for incipient
    double offset = 0.0;     // perpendicular coordinate of the right edge, mod 1/sqrt(P^2+Q^2)
    bool incipient = false;
    int type = 0;            // 1, 2, 3; 0 for incipient
    std::vector<CorridorBoundaryPoint> boundary_points;
    // number of distinct boundary configuration points per side; A1 needs 1
    int side_multiplicity[2] = {1, 1};

    Vec2 direction() const {
        double len = std::hypot(static_cast<double>(P), static_cast<double>(Q));
        return {P / len, Q / len};
    }
    double period() const { return 1.0 / std::hypot(static_cast<double>(P), static_cast<double>(Q)); }
};

struct CorridorReport {
    std::vector<Corridor> corridors;
    bool a1_ok = true;
    bool a2_ok = true;
    bool incipient_present = false;
    std::string table_type;  // A | B | C | D1 | D2
    std::vector<std::string> violations;

    bool pass() const { return a1_ok && a2_ok && !incipient_present; }
    nlohmann::json to_json() const;
};

struct CorridorOptions {
    double zero_width_tol = 1e-9;   // incipient vs. absent
    double a2_angle_tol = 1e-8;     // rad, v_H vs. one-sided tangent
    double match_tol = 1e-9;        // projection values considered equal
};

// all coprime directions with max(|P|, |Q|) <= ceil(3 kappa_max), one
// representative per direction in [0, pi)
inline std::vector<std::pair<int, int>> candidate_directions(const BilliardTable& tb) {
    int bound = static_cast<int>(std::ceil(3.0 * tb.kappa_max));
    std::vector<std::pair<int, int>> dirs;
    for (int P = 0; P <= bound; ++P)
        for (int Q = -bound; Q <= bound; ++Q) {
            if (P == 0 && Q != 1) continue;
            if (P > 0 && std::gcd(P, std::abs(Q)) != 1) continue;
            if (P == 0 && Q == 1) {
                dirs.emplace_back(0, 1);
                continue;
            }
            if (P > 0) dirs.emplace_back(P, Q);
        }
    std::sort(dirs.begin(), dirs.end(),
              [](auto& a, auto& b) { return std::pair(a.second, a.first) < std::pair(b.second, b.first); });
    return dirs;
}

namespace detail_corr {

struct SupportPoint {
    double value;
    Vec2 pos;
    int scatterer, arc;
    double t;
    bool at_corner;
};

// extreme candidates of n . f(t) over one arc, including endpoints
inline void arc_extremes(const BoundaryArc& a, int si, int ai, const Vec2& n,
                         std::vector<SupportPoint>& out) {
    auto push = [&](double t) {
        Vec2 p = a.position(t);
        out.push_back({dot(n, p), p, si, ai, t, false});
    };
    push(0.0);
    push(1.0);
    if (a.kind == ArcKind::Circle && a.bumps.empty()) {
        for (double th : {std::atan2(n.y, n.x), std::atan2(-n.y, -n.x)}) {
            double raw = std::fmod(th - a.theta0, 2.0 * M_PI);
            if (raw > 0) raw -= 2.0 * M_PI;
            double t = raw / (a.theta1 - a.theta0);
            if (t >= -1e-12 && t <= 1.0 + 1e-12) push(std::clamp(t, 0.0, 1.0));
        }
        return;
    }
    if (a.kind == ArcKind::Cubic && a.bumps.empty()) {
        // d/dt [n . f] is quadratic
        double c1 = n.x * a.cx[1] + n.y * a.cy[1];
        double c2 = 2.0 * (n.x * a.cx[2] + n.y * a.cy[2]);
        double c3 = 3.0 * (n.x * a.cx[3] + n.y * a.cy[3]);
        double disc = c2 * c2 - 4.0 * c3 * c1;
        if (std::abs(c3) < 1e-14) {
            if (std::abs(c2) > 1e-14) {
                double t = -c1 / c2;
                if (t > 0 && t < 1) push(t);
            }
        } else if (disc >= 0) {
            double sq = std::sqrt(disc);
            for (double t : {(-c2 + sq) / (2 * c3), (-c2 - sq) / (2 * c3)})
                if (t > 0 && t < 1) push(t);
        }
        return;
    }
    // bumped arc: dense scan with golden-section refinement of local extrema
    const int N = 4096;
    auto h = [&](double t) { return dot(n, a.position(t)); };
    std::vector<double> vals(N + 1);
    for (int i = 0; i <= N; ++i) vals[i] = h(static_cast<double>(i) / N);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int i = 1; i < N; ++i) {
        for (int sgn : {+1, -1}) {
            double s = sgn;
            if (s * vals[i] < s * vals[i - 1] || s * vals[i] < s * vals[i + 1]) continue;
            double lo = static_cast<double>(i - 1) / N, hi = static_cast<double>(i + 1) / N;
            double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
            double f1 = s * h(x1), f2 = s * h(x2);
            for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
                if (f1 < f2) {
                    lo = x1; x1 = x2; f1 = f2;
                    x2 = lo + gr * (hi - lo); f2 = s * h(x2);
                } else {
                    hi = x2; x2 = x1; f2 = f1;
                    x1 = hi - gr * (hi - lo); f1 = s * h(x1);
                }
            }
            push(0.5 * (lo + hi));
        }
    }
}

struct ScatProj {
    double lo = 1e300, hi = -1e300;
    std::vector<SupportPoint> lo_pts, hi_pts;
};

inline ScatProj scatterer_projection(const BilliardTable& tb, int si, const Vec2& n,
                                     double match_tol) {
    const Scatterer& s = tb.scatterers[si];
    std::vector<SupportPoint> cands;
    for (size_t ai = 0; ai < s.arcs.size(); ++ai)
        arc_extremes(s.arcs[ai], si, static_cast<int>(ai), n, cands);
    // tag corner candidates (arc endpoints at true corners)
    bool smooth = s.corners.empty();
    for (auto& c : cands) {
        bool at_end = (c.t < 1e-9 || c.t > 1.0 - 1e-9);
        c.at_corner = at_end && !smooth;
    }
    ScatProj pr;
    for (const auto& c : cands) {
        pr.lo = std::min(pr.lo, c.value);
        pr.hi = std::max(pr.hi, c.value);
    }
    auto dedup_push = [&](std::vector<SupportPoint>& v, const SupportPoint& c) {
        for (const auto& e : v) {
            Vec2 d = e.pos - c.pos;
            d.x -= std::round(d.x);
            d.y -= std::round(d.y);
            if (d.norm() < 1e-9) return;
        }
        v.push_back(c);
    };
    for (const auto& c : cands) {
        if (c.value < pr.lo + match_tol) dedup_push(pr.lo_pts, c);
        if (c.value > pr.hi - match_tol) dedup_push(pr.hi_pts, c);
    }
    return pr;
}

// phase points of one boundary configuration point
inline void emit_phase_points(const BilliardTable& tb, const SupportPoint& sp,
                              const Vec2& v_dir, int side, std::vector<CorridorBoundaryPoint>& out) {
    const Scatterer& s = tb.scatterers[sp.scatterer];
    if (!sp.at_corner) {
        double r = tb.r_of(sp.scatterer, sp.arc, sp.t);
        for (double phi : {M_PI / 2, -M_PI / 2})
            out.push_back({r, phi, false, side, sp.scatterer, sp.arc, sp.pos});
        return;
    }
    // corner: one-sided data of both adjacent arcs
    int J = static_cast<int>(s.arcs.size());
    int a_next = (sp.t < 0.5) ? sp.arc : (sp.arc + 1) % J;
    int a_prev = (a_next + J - 1) % J;
    struct Side { int arc; double tpar; double r; };
    Side sides[2] = {{a_prev, 1.0, tb.arc_end(sp.scatterer, a_prev)},
                     {a_next, 0.0, tb.arc_start(sp.scatterer, a_next)}};
    for (const auto& sd : sides) {
        Vec2 nrm = s.arcs[sd.arc].normal_unit(sd.tpar);
        for (const Vec2& w : {v_dir, -v_dir}) {
            double phi = angle_from(nrm, w);
            if (std::abs(phi) <= M_PI / 2 + 1e-12)
                out.push_back({sd.r, phi, true, side, sp.scatterer, sd.arc, sp.pos});
        }
    }
}

}  // namespace detail_corr

inline std::vector<Corridor> find_corridors(const BilliardTable& tb,
                                            const CorridorOptions& opt = {}) {
    std::vector<Corridor> out;
    for (auto [P, Q] : candidate_directions(tb)) {
        double len = std::hypot(static_cast<double>(P), static_cast<double>(Q));
        double rho = 1.0 / len;
        Vec2 v_dir(P / len, Q / len);
        Vec2 n = rot90(v_dir);  // left normal; perpendicular coordinate axis

        std::vector<detail_corr::ScatProj> projs;
        bool blocked = false;
        for (size_t si = 0; si < tb.scatterers.size(); ++si) {
            projs.push_back(detail_corr::scatterer_projection(tb, static_cast<int>(si), n,
                                                              opt.match_tol));
            if (projs.back().hi - projs.back().lo >= rho - opt.zero_width_tol) blocked = true;
        }
        if (blocked) continue;

        // intervals mod rho on a doubled circle
        struct Item {
            double lo, hi;
            int scatterer;
            double shift;  // value_mod = value + shift
        };
        std::vector<Item> items;
        for (size_t si = 0; si < projs.size(); ++si) {
            double lo = projs[si].lo;
            double shift = -std::floor(lo / rho) * rho;
            items.push_back({lo + shift, projs[si].hi + shift, static_cast<int>(si), shift});
        }
        std::sort(items.begin(), items.end(), [](auto& a, auto& b) { return a.lo < b.lo; });
        std::vector<Item> two = items;
        for (auto it : items) two.push_back({it.lo + rho, it.hi + rho, it.scatterer, it.shift + rho});
        std::sort(two.begin(), two.end(), [](auto& a, auto& b) { return a.lo < b.lo; });

        double window_start = items[0].lo;
        double window_end = window_start + rho;
        double reach = window_start;
        int reach_owner = items[0].scatterer;
        double reach_shift = items[0].shift;

        auto emit = [&](double right_edge, int right_owner, double right_shift, double left_edge,
                        int left_owner, double left_shift) {
            Corridor c;
            c.P = P;
            c.Q = Q;
            double gap = left_edge - right_edge;
            c.incipient = (gap <= opt.zero_width_tol);
            c.width = c.incipient ? 0.0 : gap;
            double off = std::fmod(right_edge, rho);
            if (off < 0) off += rho;
            c.offset = off;

            // boundary points: every scatterer attaining the edge values
            double right_val_mod = right_edge;
            double left_val_mod = left_edge;
            bool side_corner[2] = {false, false};
            int side_count[2] = {0, 0};
            for (size_t si = 0; si < projs.size(); ++si) {
                auto near_mod = [&](double val, double target) {
                    double d = std::fmod(val - target, rho);
                    if (d > rho / 2) d -= rho;
                    if (d < -rho / 2) d += rho;
                    return std::abs(d) <= opt.match_tol * 8;
                };
                if (near_mod(projs[si].hi, right_val_mod)) {
                    for (const auto& spt : projs[si].hi_pts) {
                        detail_corr::emit_phase_points(tb, spt, v_dir, 0, c.boundary_points);
                        side_corner[0] = side_corner[0] || spt.at_corner;
                        ++side_count[0];
                    }
                }
                if (near_mod(projs[si].lo, left_val_mod)) {
                    for (const auto& spt : projs[si].lo_pts) {
                        detail_corr::emit_phase_points(tb, spt, v_dir, 1, c.boundary_points);
                        side_corner[1] = side_corner[1] || spt.at_corner;
                        ++side_count[1];
                    }
                }
            }
            c.side_multiplicity[0] = side_count[0];
            c.side_multiplicity[1] = side_count[1];
            if (!c.incipient)
                c.type = 1 + (side_corner[0] ? 1 : 0) + (side_corner[1] ? 1 : 0);
            out.push_back(std::move(c));
        };

        for (const auto& it : two) {
            if (it.lo >= window_end - opt.zero_width_tol) break;
            if (it.lo > reach + opt.zero_width_tol) {
                emit(reach, reach_owner, reach_shift, it.lo, it.scatterer, it.shift);
            } else if (it.lo > reach - opt.zero_width_tol && it.hi > reach) {
                // touching projections: incipient corridor
                emit(reach, reach_owner, reach_shift, it.lo, it.scatterer, it.shift);
            }
            if (it.hi > reach) {
                reach = it.hi;
                reach_owner = it.scatterer;
                reach_shift = it.shift;
            }
            if (reach >= window_end + opt.zero_width_tol) break;
        }
    }
    std::sort(out.begin(), out.end(), [](const Corridor& a, const Corridor& b) {
        return std::tuple(a.Q, a.P, a.offset) < std::tuple(b.Q, b.P, b.offset);
    });
    return out;
}

inline CorridorReport classify_and_check(const BilliardTable& tb,
                                         const CorridorOptions& opt = {}) {
    CorridorReport rep;
    rep.corridors = find_corridors(tb, opt);
    bool corner_boundary = false;
    for (auto& c : rep.corridors) {
        char buf[160];
        if (c.incipient) {
            rep.incipient_present = true;
            snprintf(buf, sizeof buf, "incipient corridor in direction (%d,%d) at offset %.12g",
                     c.P, c.Q, c.offset);
            rep.violations.push_back(buf);
        }
        for (int side = 0; side < 2; ++side) {
            if (!c.incipient && c.side_multiplicity[side] > 1) {
                rep.a1_ok = false;
                snprintf(buf, sizeof buf,
                         "(A1) corridor (%d,%d) side %d realized by %d boundary points", c.P,
                         c.Q, side, c.side_multiplicity[side]);
                rep.violations.push_back(buf);
            }
        }
        for (const auto& bp : c.boundary_points) {
            if (!bp.corner) continue;
            corner_boundary = true;
            if (M_PI / 2 - std::abs(bp.phi) < opt.a2_angle_tol) {
                rep.a2_ok = false;
                snprintf(buf, sizeof buf,
                         "(A2) corridor (%d,%d): direction parallel to a one-sided tangent at r=%.12g",
                         c.P, c.Q, bp.r);
                rep.violations.push_back(buf);
            }
        }
    }
    bool has_corner = tb.has_corners();
    bool unbounded = !rep.corridors.empty();
    if (!has_corner)
        rep.table_type = unbounded ? "B" : "A";
    else if (!unbounded)
        rep.table_type = "C";
    else
        rep.table_type = corner_boundary ? "D2" : "D1";
    return rep;
}

inline nlohmann::json CorridorReport::to_json() const {
    nlohmann::json j;
    j["table_type"] = table_type;
    j["a1_ok"] = a1_ok;
    j["a2_ok"] = a2_ok;
    j["incipient_present"] = incipient_present;
    j["violations"] = violations;
    j["corridors"] = nlohmann::json::array();
    for (const auto& c : corridors) {
        nlohmann::json cj;
        cj["direction"] = {c.P, c.Q};
        cj["width"] = c.width;
        cj["offset"] = c.offset;
        cj["type"] = c.incipient ? nlohmann::json("incipient") : nlohmann::json(c.type);
        cj["boundary_points"] = nlohmann::json::array();
        for (const auto& bp : c.boundary_points)
            cj["boundary_points"].push_back({{"r", bp.r},
                                             {"phi", bp.phi},
                                             {"corner", bp.corner},
                                             {"side", bp.side == 0 ? "r" : "l"}});
        j["corridors"].push_back(cj);
    }
    return j;
}

// --- local enlargement (growing a scatterer near one boundary point) ---

struct EnlargementResult {
    BilliardTable table;
    double distance = 0.0;  // measured C3 distance to the input table
    double height = 0.0;    // bump displacement at the target point
};

namespace detail_corr {

inline double scaled_profile_c3_norm(double half_width) {
    const auto& norms = bump_c3_norms();
    double s = 2.0 * M_PI * half_width;
    double m = norms[0];
    m = std::max(m, norms[1] / s);
    m = std::max(m, norms[2] / (s * s));
    m = std::max(m, norms[3] / (s * s * s));
    return m;
}

}  // namespace detail_corr

// Grows the scatterer owning the boundary point at arclength coordinate r,
// inside the eps-neighborhood only. The new table is contained in the old one
// and the target point becomes interior to the enlarged scatterer.
inline EnlargementResult local_enlargement(const BilliardTable& tb, double r, double eps) {
    if (eps <= 0) throw EpsTooLarge("eps must be positive");
    int si, ai;
    double t;
    try {
        tb.locate(r, si, ai, t);
    } catch (const OutOfRange&) {
        throw NotOnBoundary("arclength coordinate outside the boundary");
    }
    const Scatterer& s = tb.scatterers[si];

    nlohmann::json cfg = tb.emit_config();

    // corner if the local parameter is at an arc end of a cornered scatterer
    bool at_corner = !s.corners.empty() && (t < 1e-9 || t > 1.0 - 1e-9);

    auto add_bump = [&](int arc, double center, double hw, double height, Vec2 dir) {
        nlohmann::json& aj = cfg["scatterers"][si]["arcs"][arc];
        if (!aj.contains("bumps")) aj["bumps"] = nlohmann::json::array();
        aj["bumps"].push_back({{"center", center},
                               {"half_width", hw},
                               {"height", height},
                               {"dir", {dir.x, dir.y}}});
    };

    double measured_height = 0.0;
    if (!at_corner) {
        const BoundaryArc& a = s.arcs[ai];
        double L = a.length();
        // support inside the eps-neighborhood and away from the arc ends
        double hw = std::min({eps / L, 1.0 / 3.0, 1.8 * t, 1.8 * (1.0 - t)});
        if (a.is_full_circle()) hw = std::min(eps / L, 1.0 / 3.0);
        if (hw < 1e-7) throw EpsTooLarge("support too small near an arc end");
        double kq = a.curvature(t);
        double height = std::min(eps, kq) / (10.0 * detail_corr::scaled_profile_c3_norm(hw));
        Vec2 u = a.normal_unit(t);
        add_bump(ai, t, hw, height, u);
        measured_height = height;
    } else {
        int J = static_cast<int>(s.arcs.size());
        int a_next = (t < 0.5) ? ai : (ai + 1) % J;
        int a_prev = (a_next + J - 1) % J;
        const BoundaryArc& ap = s.arcs[a_prev];
        const BoundaryArc& an = s.arcs[a_next];
        Vec2 u = ap.normal_unit(1.0) + an.normal_unit(0.0);
        if (u.norm() < 1e-9) u = ap.normal_unit(1.0);
        u = normalized(u);
        double hw = std::min({eps / ap.length(), eps / an.length(), 1.0 / 3.0});
        if (hw < 1e-7) throw EpsTooLarge("support too small at corner");
        double kq = std::min(ap.curvature(1.0), an.curvature(0.0));
        double height = std::min(eps, kq) / (10.0 * detail_corr::scaled_profile_c3_norm(hw));
        // peak sits a bit inside each arc so the one-sided tangents rotate;
        // both arcs displace the shared endpoint by the same amount
        double sigma = 0.35 * hw;
        add_bump(a_prev, 1.0 - sigma, hw, height, u);
        add_bump(a_next, sigma, hw, height, u);
        measured_height = height * bump_profile(sigma / hw).f;
    }

    EnlargementResult res;
    try {
        res.table = build_table(cfg);
    } catch (const Error& e) {
        throw EpsTooLarge(std::string("perturbed table not admissible: ") + e.what());
    }
    res.distance = table_distance(tb, res.table);
    res.height = measured_height;
    if (res.distance >= eps)
        throw EpsTooLarge("perturbation exceeds the requested distance");
    return res;
}

// --- genericity workflow ---

struct RepairStep {
    double r;
    double eps_used;
    double distance;
    std::string reason;
};

struct RepairResult {
    BilliardTable table;
    std::vector<RepairStep> steps;
    double cumulative_distance = 0.0;
    bool success = false;
};

// Removes incipient corridors and (A1)/(A2) violations by repeated local
// enlargements, one bad corridor at a time in canonical order.
inline RepairResult repair_table(const BilliardTable& tb, double eps,
                                 const CorridorOptions& opt = {}) {
    RepairResult res;
    res.table = tb;
    CorridorReport rep = classify_and_check(res.table, opt);
    size_t k = std::max<size_t>(rep.corridors.size(), 1);
    double eps_step = eps / (2.0 * static_cast<double>(k));
    int budget = static_cast<int>(4 * k + 8);

    while (budget-- > 0) {
        rep = classify_and_check(res.table, opt);
        if (rep.pass()) {
            res.success = true;
            return res;
        }
        // first bad corridor in canonical order
        const Corridor* bad = nullptr;
        std::string reason;
        for (const auto& c : rep.corridors) {
            if (c.incipient) {
                bad = &c;
                reason = "incipient";
                break;
            }
            if (c.side_multiplicity[0] > 1 || c.side_multiplicity[1] > 1) {
                bad = &c;
                reason = "A1";
                break;
            }
            bool a2bad = false;
            for (const auto& bp : c.boundary_points)
                if (bp.corner && M_PI / 2 - std::abs(bp.phi) < opt.a2_angle_tol) a2bad = true;
            if (a2bad) {
                bad = &c;
                reason = "A2";
                break;
            }
        }
        if (!bad) break;  // violations without a corridor owner should not happen

        double target_r = -1.0;
        if (reason == "A2") {
            for (const auto& bp : bad->boundary_points)
                if (bp.corner && M_PI / 2 - std::abs(bp.phi) < opt.a2_angle_tol) {
                    target_r = bp.r;
                    break;
                }
        } else if (reason == "A1") {
            int side = (bad->side_multiplicity[0] > 1) ? 0 : 1;
            for (const auto& bp : bad->boundary_points)
                if (bp.side == side) {
                    target_r = bp.r;
                    break;
                }
        } else {  // incipient: any tangency point on the line
            target_r = bad->boundary_points.empty() ? -1.0 : bad->boundary_points.front().r;
        }
        if (target_r < 0) break;

        EnlargementResult er = local_enlargement(res.table, target_r, eps_step);
        res.cumulative_distance += er.distance;
        res.steps.push_back({target_r, eps_step, er.distance, reason});
        res.table = std::move(er.table);
    }
    res.success = classify_and_check(res.table, opt).pass();
    return res;
}

}  // namespace billiard
