#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "billiard/bump.hpp"
#include "billiard/errors.hpp"
#include "billiard/jet.hpp"
#include "billiard/vec.hpp"

namespace billiard {

enum class ArcKind { Circle, Cubic };

// Localized normal displacement along a fixed direction. Keeps the arc count
// of a scatterer unchanged under local enlargement, so perturbed tables stay
// comparable in the C3 table metric.
struct BumpTerm {
    double center = 0.5;      // parameter position of the peak
    double half_width = 0.1;  // support is (center - half_width/... ) scaled: profile((t-center)/width)
    double height = 0.0;      // displacement at the peak
    Vec2 dir;                 // unit displacement direction (points into the table)
};

// One C3 boundary piece of a scatterer, parametrized on [0,1], traversed
// clockwise with the billiard domain on the left. Circular arcs store angles
// with theta1 < theta0 (decreasing angle = clockwise).
struct BoundaryArc {
    ArcKind kind = ArcKind::Circle;

    // circle
    Vec2 center;
    double radius = 0.0;
    double theta0 = 0.0;
    double theta1 = 0.0;

    // cubic: f(t) = (sum cx[k] t^k, sum cy[k] t^k)
    std::array<double, 4> cx = {0, 0, 0, 0};
    std::array<double, 4> cy = {0, 0, 0, 0};

    std::vector<BumpTerm> bumps;

    // --- evaluation ---

    Jet3Vec2 base_jets(double t) const {
        if (kind == ArcKind::Circle) {
            Jet3 th = compose(theta0 + (theta1 - theta0) * t, theta1 - theta0, 0.0, 0.0,
                              Jet3::variable(t));
            return {center.x + radius * cos(th), center.y + radius * sin(th)};
        }
        Jet3 jt = Jet3::variable(t);
        Jet3 x = Jet3(cx[0]) + cx[1] * jt + cx[2] * (jt * jt) + cx[3] * (jt * jt * jt);
        Jet3 y = Jet3(cy[0]) + cy[1] * jt + cy[2] * (jt * jt) + cy[3] * (jt * jt * jt);
        return {x, y};
    }

    Jet3Vec2 jets(double t) const {
        Jet3Vec2 p = base_jets(t);
        for (const auto& b : bumps) {
            Jet3 s = compose((t - b.center) / b.half_width, 1.0 / b.half_width, 0.0, 0.0,
                             Jet3::variable(t));
            Jet3 prof = bump_profile(s.f);
            // chain rule for the rescaled argument
            double w = b.half_width;
            Jet3 disp(b.height * prof.f, b.height * prof.d1 / w,
                      b.height * prof.d2 / (w * w), b.height * prof.d3 / (w * w * w));
            p.x = p.x + disp * b.dir.x;
            p.y = p.y + disp * b.dir.y;
        }
        return p;
    }

    Vec2 position(double t) const {
        Jet3Vec2 j = jets(t);
        return {j.x.f, j.y.f};
    }

    Vec2 velocity(double t) const {
        Jet3Vec2 j = jets(t);
        return {j.x.d1, j.y.d1};
    }

    Vec2 tangent_unit(double t) const { return normalized(velocity(t)); }

    // inward normal (into the billiard domain)
    Vec2 normal_unit(double t) const { return rot90(tangent_unit(t)); }

    // boundary curvature, positive for dispersing scatterers under clockwise
    // orientation
    double curvature(double t) const {
        Jet3Vec2 j = jets(t);
        double speed2 = j.x.d1 * j.x.d1 + j.y.d1 * j.y.d1;
        return -(j.x.d1 * j.y.d2 - j.y.d1 * j.x.d2) / (speed2 * std::sqrt(speed2));
    }

    bool is_full_circle() const {
        return kind == ArcKind::Circle && bumps.empty() &&
               std::abs(std::abs(theta1 - theta0) - 2.0 * M_PI) < 1e-12;
    }

    // --- arclength cache ---

    void init_cache() {
        if (kind == ArcKind::Circle && bumps.empty()) {
            length_ = radius * std::abs(theta1 - theta0);
            cum_.clear();
            return;
        }
        // composite Simpson on a fine grid; arcs are short and smooth
        const int n = 2048;  // intervals
        cum_.assign(n + 1, 0.0);
        double h = 1.0 / n;
        KahanSum acc;
        double prev_speed = velocity(0.0).norm();
        for (int i = 1; i <= n; ++i) {
            double tm = (i - 0.5) * h;
            double sm = velocity(tm).norm();
            double s1 = velocity(i * h).norm();
            acc.add(h / 6.0 * (prev_speed + 4.0 * sm + s1));
            cum_[i] = acc.value();
            prev_speed = s1;
        }
        length_ = cum_[n];
    }

    double length() const {
        if (kind == ArcKind::Circle && bumps.empty())
            return radius * std::abs(theta1 - theta0);
        return length_;
    }

    double arclength_at(double t) const {
        if (kind == ArcKind::Circle && bumps.empty()) return length() * t;
        int n = static_cast<int>(cum_.size()) - 1;
        double u = t * n;
        int i = std::min(std::max(static_cast<int>(u), 0), n - 1);
        // local Simpson correction inside the cell
        double t0 = static_cast<double>(i) / n;
        double dt = t - t0;
        if (dt <= 0) return cum_[i];
        double s0 = velocity(t0).norm();
        double sm = velocity(t0 + dt * 0.5).norm();
        double s1 = velocity(t).norm();
        return cum_[i] + dt / 6.0 * (s0 + 4.0 * sm + s1);
    }

    double param_at_arclength(double s) const {
        if (kind == ArcKind::Circle && bumps.empty()) return s / length();
        int n = static_cast<int>(cum_.size()) - 1;
        if (s <= 0) return 0.0;
        if (s >= length_) return 1.0;
        int lo = 0, hi = n;
        while (hi - lo > 1) {
            int mid = (lo + hi) / 2;
            (cum_[mid] <= s ? lo : hi) = mid;
        }
        double t = (lo + (s - cum_[lo]) / (cum_[lo + 1] - cum_[lo])) / n;
        for (int it = 0; it < 8; ++it) {
            double err = arclength_at(t) - s;
            double sp = velocity(t).norm();
            t -= err / sp;
            t = std::min(std::max(t, 0.0), 1.0);
            if (std::abs(err) < 1e-14 * std::max(1.0, length_)) break;
        }
        return t;
    }

private:
    double length_ = 0.0;
    std::vector<double> cum_;
};

}  // namespace billiard
