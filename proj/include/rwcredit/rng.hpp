#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "rwcredit/special_functions.hpp"

namespace rwcredit {

/// Philox 4x32-10 counter-based generator. A (seed, stream) pair addresses an
/// independent substream; draws depend only on that pair and the draw index,
/// so results are identical for any worker count or scheduling order.
class Philox4x32 {
public:
    Philox4x32(std::uint64_t seed, std::uint64_t stream) {
        key_[0] = static_cast<std::uint32_t>(seed);
        key_[1] = static_cast<std::uint32_t>(seed >> 32);
        counter_[0] = 0;
        counter_[1] = 0;
        counter_[2] = static_cast<std::uint32_t>(stream);
        counter_[3] = static_cast<std::uint32_t>(stream >> 32);
    }

    std::uint32_t next_u32() {
        if (idx_ == 4) {
            block_ = round10(counter_, key_);
            advance_counter();
            idx_ = 0;
        }
        return block_[idx_++];
    }

    std::uint64_t next_u64() {
        const std::uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

private:
    static constexpr std::uint32_t kM0 = 0xD2511F53u;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kW0 = 0x9E3779B9u;
    static constexpr std::uint32_t kW1 = 0xBB67AE85u;

    static void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo,
                          std::uint32_t& hi) {
        const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
        lo = static_cast<std::uint32_t>(p);
        hi = static_cast<std::uint32_t>(p >> 32);
    }

    static std::array<std::uint32_t, 4> round10(std::array<std::uint32_t, 4> ctr,
                                                std::array<std::uint32_t, 2> key) {
        for (int r = 0; r < 10; ++r) {
            std::uint32_t lo0, hi0, lo1, hi1;
            mul_hi_lo(kM0, ctr[0], lo0, hi0);
            mul_hi_lo(kM1, ctr[2], lo1, hi1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += kW0;
            key[1] += kW1;
        }
        return ctr;
    }

    void advance_counter() {
        if (++counter_[0] == 0) ++counter_[1];
    }

    std::array<std::uint32_t, 4> counter_;
    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> block_{};
    int idx_ = 4;
};

/// Distribution layer over one Philox substream.
class PathRng {
public:
    PathRng(std::uint64_t seed, std::uint64_t stream) : gen_(seed, stream) {}

    /// Uniform on the open interval (0,1), 52-bit granularity.
    double next_uniform() {
        return (static_cast<double>(gen_.next_u64() >> 12) + 0.5) * 0x1p-52;
    }

    double next_normal() { return inverse_normal_cdf(next_uniform()); }

    /// Gamma(shape, scale 1) via the Marsaglia-Tsang squeeze; shapes below
    /// one use the boost G(a) = G(a+1) U^{1/a}.
    double next_gamma(double shape) {
        if (!(shape > 0.0)) throw OutsideDomain("gamma shape must be positive");
        if (shape < 1.0) {
            const double u = next_uniform();
            return next_gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / (3.0 * std::sqrt(d));
        for (;;) {
            double x, v;
            do {
                x = next_normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = next_uniform();
            const double x2 = x * x;
            if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
            if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    /// Poisson(mean): product-of-uniforms inversion for small means, the
    /// transformed-rejection scheme (Hormann's PTRS) otherwise.
    std::uint64_t next_poisson(double mean) {
        if (!(mean >= 0.0)) throw OutsideDomain("poisson mean must be nonnegative");
        if (mean == 0.0) return 0;
        if (mean < 10.0) {
            const double limit = std::exp(-mean);
            std::uint64_t k = 0;
            double prod = next_uniform();
            while (prod > limit) {
                ++k;
                prod *= next_uniform();
            }
            return k;
        }
        const double b = 0.931 + 2.53 * std::sqrt(mean);
        const double a = -0.059 + 0.02483 * b;
        const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        const double v_r = 0.9277 - 3.6224 / (b - 2.0);
        const double log_mean = std::log(mean);
        for (;;) {
            const double u = next_uniform() - 0.5;
            const double v = next_uniform();
            const double us = 0.5 - std::fabs(u);
            const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
            if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(kf);
            if (kf < 0.0 || (us < 0.013 && v > us)) continue;
            if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
                kf * log_mean - mean - log_gamma(kf + 1.0))
                return static_cast<std::uint64_t>(kf);
        }
    }

private:
    Philox4x32 gen_;
};

}  // namespace rwcredit
