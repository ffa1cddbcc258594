#pragma once

#include <algorithm>
#include <cmath>

#include "billiard/jet.hpp"

namespace billiard {

// Standard C-infinity bump: phi(s) = exp(1 - 1/(1 - 4 s^2)) on |s| < 1/2,
// zero outside. phi(0) = 1.
inline Jet3 bump_profile(double s) {
    if (std::abs(s) >= 0.5 - 1e-9) return Jet3(0.0);
    Jet3 js = Jet3::variable(s);
    Jet3 g = 1.0 + (-4.0) * (js * js);  // 1 - 4 s^2 > 0
    return exp(1.0 + (-1.0) * inv(g));
}

// sup-norms of the profile and its first three derivatives on (-1/2, 1/2)
inline const std::array<double, 4>& bump_c3_norms() {
    static const std::array<double, 4> norms = [] {
        std::array<double, 4> m = {0, 0, 0, 0};
        const int n = 20001;
        for (int i = 0; i < n; ++i) {
            double s = -0.5 + static_cast<double>(i) / (n - 1);
            Jet3 j = bump_profile(s);
            m[0] = std::max(m[0], std::abs(j.f));
            m[1] = std::max(m[1], std::abs(j.d1));
            m[2] = std::max(m[2], std::abs(j.d2));
            m[3] = std::max(m[3], std::abs(j.d3));
        }
        return m;
    }();
    return norms;
}

}  // namespace billiard
