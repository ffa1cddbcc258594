#pragma once

#include <cmath>
#include <cstdint>

namespace billiard {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

    double norm2() const { return x * x + y * y; }
    double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

// counterclockwise quarter turn; for a clockwise-oriented boundary this maps
// the unit tangent to the normal pointing into the billiard domain
inline Vec2 rot90(const Vec2& v) { return {-v.y, v.x}; }

inline Vec2 normalized(const Vec2& v) {
    double n = v.norm();
    return {v.x / n, v.y / n};
}

inline double dist(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

// wrap a coordinate to [0, 1)
inline double wrap01(double t) {
    double r = t - std::floor(t);
    return (r >= 1.0) ? 0.0 : r;
}

inline Vec2 wrap01(const Vec2& v) { return {wrap01(v.x), wrap01(v.y)}; }

// signed angle of v measured clockwise from the direction n, in [-pi, pi]
inline double angle_from(const Vec2& n, const Vec2& v) {
    return std::atan2(cross(v, n), dot(v, n));
}

// Neumaier compensated accumulator; long flight-time sums drift otherwise
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double v) {
        double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

}  // namespace billiard
