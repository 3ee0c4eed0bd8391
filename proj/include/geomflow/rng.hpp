#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "geomflow/core.hpp"

namespace geomflow {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11 constants).
// Every draw is a pure function of (key, counter): parallel path generation
// cannot depend on scheduling, and any path can be regenerated bit-exactly.
struct Philox4x32 {
    static constexpr std::uint32_t M0 = 0xD2511F53u;
    static constexpr std::uint32_t M1 = 0xCD9E8D57u;
    static constexpr std::uint32_t W0 = 0x9E3779B9u;
    static constexpr std::uint32_t W1 = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * ctr[2];
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += W0;
            key[1] += W1;
        }
        return ctr;
    }
};

// Uniform in (0,1], 53-bit, from two 32-bit words.
inline double uniform53(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1p-53;
}

/// Brownian increment stream for one path: increments for
/// (master_seed, path_index, step, component) are a pure function of those
/// four values. Two standard normals per Philox block via Box-Muller.
class BrownianDriver {
public:
    BrownianDriver(std::uint64_t master_seed, std::uint64_t path_index, int dimension,
                   double dt, std::uint32_t stream_tag = 0)
        : key_{static_cast<std::uint32_t>(master_seed),
               static_cast<std::uint32_t>(master_seed >> 32)},
          path_lo_(static_cast<std::uint32_t>(path_index)),
          path_hi_(static_cast<std::uint32_t>(path_index >> 32) ^ (stream_tag * 0x85EBCA6Bu)),
          dim_(dimension),
          sqrt_dt_(std::sqrt(dt)) {}

    int dimension() const { return dim_; }
    double sqrt_dt() const { return sqrt_dt_; }

    /// Standard normal for (step, component), independent of call order.
    double normal(std::uint32_t step, int component) const {
        const std::uint32_t pair_block = static_cast<std::uint32_t>(component) >> 1;
        const auto words = Philox4x32::block({step, path_lo_, pair_block, path_hi_}, key_);
        const double u1 = uniform53(words[0], words[1]);
        const double u2 = uniform53(words[2], words[3]);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        return (component & 1) ? r * std::sin(a) : r * std::cos(a);
    }

    /// Brownian increment over one step of size dt: dB ~ N(0, dt I).
    void increment(std::uint32_t step, Vec& out) const {
        for (int c = 0; c < dim_; ++c) out[c] = sqrt_dt_ * normal(step, c);
    }

private:
    std::array<std::uint32_t, 2> key_;
    std::uint32_t path_lo_;
    std::uint32_t path_hi_;
    int dim_;
    double sqrt_dt_;
};

}  // namespace geomflow
