#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "billiard/errors.hpp"
#include "billiard/table.hpp"

namespace billiard {
namespace fixtures {

inline nlohmann::json circle_arc(double cx, double cy, double r, double th0, double th1) {
    return {{"kind", "circle"}, {"center", {cx, cy}}, {"radius", r},
            {"theta0", th0}, {"theta1", th1}};
}

inline nlohmann::json disk(double cx, double cy, double r) {
    // full circle, seam at the leftmost point, clockwise
    return {{"arcs", {circle_arc(cx, cy, r, M_PI, -M_PI)}}};
}

// Reuleaux triangle of width w with a vertex at (tx, ty); point_up selects the
// vertex direction. Concave corners (seen from the table), constant width.
inline nlohmann::json reuleaux(double tx, double ty, double w, bool point_up) {
    const double s = std::sin(M_PI / 3.0);
    nlohmann::json arcs = nlohmann::json::array();
    if (point_up) {
        double v2x = tx + 0.5 * w, v3x = tx - 0.5 * w, vy = ty - s * w;
        arcs.push_back(circle_arc(v3x, vy, w, M_PI / 3.0, 0.0));            // V1 -> V2
        arcs.push_back(circle_arc(tx, ty, w, -M_PI / 3.0, -2.0 * M_PI / 3.0));  // V2 -> V3
        arcs.push_back(circle_arc(v2x, vy, w, M_PI, 2.0 * M_PI / 3.0));     // V3 -> V1
    } else {
        double v2x = tx - 0.5 * w, v3x = tx + 0.5 * w, vy = ty + s * w;
        arcs.push_back(circle_arc(v3x, vy, w, -2.0 * M_PI / 3.0, -M_PI));   // V1 -> V2
        arcs.push_back(circle_arc(tx, ty, w, 2.0 * M_PI / 3.0, M_PI / 3.0));    // V2 -> V3
        arcs.push_back(circle_arc(v2x, vy, w, 0.0, -M_PI / 3.0));           // V3 -> V1
    }
    return {{"arcs", arcs}};
}

inline nlohmann::json config(const std::string& name) {
    nlohmann::json j;
    if (name == "circle04") {
        j["scatterers"] = {disk(0.5, 0.5, 0.4)};
    } else if (name == "circle03") {
        j["scatterers"] = {disk(0.5, 0.5, 0.3)};
    } else if (name == "fig1") {
        // one horizontal corridor y in (0.45, 0.55), bounded from below by the
        // tip of an upward Reuleaux and from above by a downward one (type 3);
        // two disks block every other direction
        j["scatterers"] = {reuleaux(0.25, 0.45, 0.3, true),
                           reuleaux(0.75, 0.55, 0.3, false),
                           disk(0.5, 0.0, 0.2), disk(1.0, 0.0, 0.2)};
    } else if (name == "fig1-D1") {
        // four-arc rounded square: axis corridors are bounded by regular
        // tangency points, the concave corners sit on the diagonals where all
        // directions are blocked
        const double c = 0.28, e = 0.1;
        const double R = std::hypot(c + e, c);
        const double a = std::atan2(c, c + e);
        nlohmann::json arcs = nlohmann::json::array();
        arcs.push_back(circle_arc(0.5 - e, 0.5, R, a, -a));                  // right, NE -> SE
        arcs.push_back(circle_arc(0.5, 0.5 + e, R, -M_PI / 2 + a, -M_PI / 2 - a));  // bottom
        arcs.push_back(circle_arc(0.5 + e, 0.5, R, -M_PI + a, -M_PI - a));   // left
        arcs.push_back(circle_arc(0.5, 0.5 - e, R, M_PI / 2 + a, M_PI / 2 - a));    // top
        j["scatterers"] = {nlohmann::json{{"arcs", arcs}}};
    } else if (name == "incipient-pair") {
        // the line y = 0.5 grazes both disks without positive width
        j["scatterers"] = {disk(0.25, 0.25, 0.25), disk(0.78, 0.75, 0.25)};
    } else if (name == "degenerate_a1") {
        // horizontal corridor bounded by two tangency points at the same
        // height on each side: (A1) fails
        j["scatterers"] = {disk(0.22, 0.3, 0.2), disk(0.75, 0.3, 0.2)};
    } else if (name == "degenerate_a2") {
        // fig1 with the lower scatterer's third arc re-centered below the tip,
        // so the one-sided tangent there is parallel to the corridor: (A2) fails
        const double w = 0.3, s = std::sin(M_PI / 3.0);
        const double tx = 0.25, ty = 0.45;
        const double v3x = tx - 0.5 * w, vy = ty - s * w;
        // circle through V3 = (v3x, vy) centered straight below the tip
        const double h = ty - vy;
        const double R3 = ((tx - v3x) * (tx - v3x) + h * h) / (2.0 * h);
        const double c3y = ty - R3;
        const double th_v3 = std::atan2(vy - c3y, v3x - tx);  // in (-pi, -pi/2)
        nlohmann::json arcs = nlohmann::json::array();
        arcs.push_back(circle_arc(v3x, vy, w, M_PI / 3.0, 0.0));                // V1 -> V2
        arcs.push_back(circle_arc(tx, ty, w, -M_PI / 3.0, -2.0 * M_PI / 3.0));  // V2 -> V3
        arcs.push_back(circle_arc(tx, c3y, R3, th_v3 + 2.0 * M_PI, M_PI / 2.0));  // V3 -> V1
        j["scatterers"] = {nlohmann::json{{"arcs", arcs}},
                           reuleaux(0.75, 0.55, 0.3, false),
                           disk(0.5, 0.0, 0.2), disk(1.0, 0.0, 0.2)};
    } else if (name == "finite-horizon-3disk") {
        j["scatterers"] = {disk(0.0, 0.0, 0.4), disk(0.5, 0.5, 0.3), disk(0.5, 0.0, 0.05)};
    } else {
        throw ConfigError("unknown fixture: " + name);
    }
    return j;
}

inline const std::vector<std::string>& names() {
    static const std::vector<std::string> n = {
        "circle04", "circle03", "fig1", "fig1-D1",
        "incipient-pair", "degenerate_a1", "degenerate_a2", "finite-horizon-3disk"};
    return n;
}

inline BilliardTable table(const std::string& name) { return build_table(config(name)); }

}  // namespace fixtures
}  // namespace billiard
