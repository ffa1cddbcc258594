#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace billiard {

// Philox4x32-10 counter-based generator. Stateless block function keyed by
// (seed, stream); every Monte Carlo item owns a stream index, so results do
// not depend on how work is split across workers.
namespace philox {

inline void mulhilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
    uint64_t p = static_cast<uint64_t>(a) * b;
    hi = static_cast<uint32_t>(p >> 32);
    lo = static_cast<uint32_t>(p);
}

inline std::array<uint32_t, 4> block(std::array<uint32_t, 4> ctr, std::array<uint32_t, 2> key) {
    constexpr uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        uint32_t hi0, lo0, hi1, lo1;
        mulhilo(M0, ctr[0], hi0, lo0);
        mulhilo(M1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += W0;
        key[1] += W1;
    }
    return ctr;
}

}  // namespace philox

class RngStream {
public:
    RngStream(uint64_t seed, uint64_t stream) : seed_(seed), stream_(stream) {}

    uint64_t next_u64() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        std::array<uint32_t, 4> ctr = {
            static_cast<uint32_t>(counter_), static_cast<uint32_t>(counter_ >> 32),
            static_cast<uint32_t>(stream_), static_cast<uint32_t>(stream_ >> 32)};
        std::array<uint32_t, 2> key = {
            static_cast<uint32_t>(seed_), static_cast<uint32_t>(seed_ >> 32)};
        auto out = philox::block(ctr, key);
        ++counter_;
        spare_ = (static_cast<uint64_t>(out[2]) << 32) | out[3];
        have_spare_ = true;
        return (static_cast<uint64_t>(out[0]) << 32) | out[1];
    }

    // uniform on [0, 1), 53-bit resolution
    double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform on [a, b)
    double uniform(double a, double b) { return a + (b - a) * u01(); }

    int uniform_int(int n) { return static_cast<int>(next_u64() % static_cast<uint64_t>(n)); }

    double normal() {
        if (have_normal_) {
            have_normal_ = false;
            return spare_normal_;
        }
        double u1 = u01(), u2 = u01();
        while (u1 <= 0.0) u1 = u01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        spare_normal_ = r * std::sin(a);
        have_normal_ = true;
        return r * std::cos(a);
    }

private:
    uint64_t seed_;
    uint64_t stream_;
    uint64_t counter_ = 0;
    uint64_t spare_ = 0;
    bool have_spare_ = false;
    double spare_normal_ = 0.0;
    bool have_normal_ = false;
};

}  // namespace billiard
