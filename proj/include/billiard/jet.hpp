#pragma once

#include <cmath>

namespace billiard {

// Value with first three derivatives w.r.t. a scalar parameter (truncated
// Taylor arithmetic). Used for exact curvature and C3-distance evaluation of
// boundary arcs, including bump-perturbed ones.
struct Jet3 {
    double f = 0.0;   // value
    double d1 = 0.0;  // first derivative
    double d2 = 0.0;  // second derivative
    double d3 = 0.0;  // third derivative

    Jet3() = default;
    Jet3(double f_, double d1_ = 0.0, double d2_ = 0.0, double d3_ = 0.0)
        : f(f_), d1(d1_), d2(d2_), d3(d3_) {}

    static Jet3 variable(double t) { return Jet3(t, 1.0); }

    Jet3 operator+(const Jet3& o) const { return {f + o.f, d1 + o.d1, d2 + o.d2, d3 + o.d3}; }
    Jet3 operator-(const Jet3& o) const { return {f - o.f, d1 - o.d1, d2 - o.d2, d3 - o.d3}; }
    Jet3 operator-() const { return {-f, -d1, -d2, -d3}; }

    Jet3 operator*(const Jet3& o) const {
        // Leibniz up to order 3
        return {f * o.f,
                d1 * o.f + f * o.d1,
                d2 * o.f + 2.0 * d1 * o.d1 + f * o.d2,
                d3 * o.f + 3.0 * d2 * o.d1 + 3.0 * d1 * o.d2 + f * o.d3};
    }
    Jet3 operator*(double s) const { return {f * s, d1 * s, d2 * s, d3 * s}; }
    Jet3 operator+(double s) const { return {f + s, d1, d2, d3}; }
    Jet3 operator-(double s) const { return {f - s, d1, d2, d3}; }
};

inline Jet3 operator*(double s, const Jet3& j) { return j * s; }
inline Jet3 operator+(double s, const Jet3& j) { return j + s; }

// composition g(h) where g is given by value and derivatives at h.f
inline Jet3 compose(double g, double g1, double g2, double g3, const Jet3& h) {
    // Faa di Bruno up to order 3
    return {g,
            g1 * h.d1,
            g2 * h.d1 * h.d1 + g1 * h.d2,
            g3 * h.d1 * h.d1 * h.d1 + 3.0 * g2 * h.d1 * h.d2 + g1 * h.d3};
}

inline Jet3 sin(const Jet3& h) {
    double s = std::sin(h.f), c = std::cos(h.f);
    return compose(s, c, -s, -c, h);
}

inline Jet3 cos(const Jet3& h) {
    double s = std::sin(h.f), c = std::cos(h.f);
    return compose(c, -s, -c, s, h);
}

inline Jet3 exp(const Jet3& h) {
    double e = std::exp(h.f);
    return compose(e, e, e, e, h);
}

inline Jet3 sqrt(const Jet3& h) {
    double r = std::sqrt(h.f);
    return compose(r, 0.5 / r, -0.25 / (r * h.f), 0.375 / (r * h.f * h.f), h);
}

inline Jet3 inv(const Jet3& h) {
    double v = 1.0 / h.f;
    return compose(v, -v * v, 2.0 * v * v * v, -6.0 * v * v * v * v, h);
}

inline Jet3 operator/(const Jet3& a, const Jet3& b) { return a * inv(b); }

struct Jet3Vec2 {
    Jet3 x, y;

    Jet3Vec2 operator+(const Jet3Vec2& o) const { return {x + o.x, y + o.y}; }
    Jet3Vec2 operator-(const Jet3Vec2& o) const { return {x - o.x, y - o.y}; }
    Jet3Vec2 operator*(const Jet3& s) const { return {x * s, y * s}; }
};

inline Jet3 dot(const Jet3Vec2& a, const Jet3Vec2& b) { return a.x * b.x + a.y * b.y; }
inline Jet3 cross(const Jet3Vec2& a, const Jet3Vec2& b) { return a.x * b.y - a.y * b.x; }

}  // namespace billiard
