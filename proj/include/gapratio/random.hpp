#pragma once

// Seeded random streams. Every realization of an ensemble draws from its own
// xoshiro256** stream whose seed is derived from (base seed, realization
// index) with splitmix64, so output does not depend on how work is scheduled.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include "gapratio/error.hpp"

namespace gapratio {

inline constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Stable seed for stream `index` of base seed `seed`.
inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    std::uint64_t s = seed;
    const std::uint64_t a = splitmix64(s);
    std::uint64_t t = a ^ (index * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL);
    return splitmix64(t);
}

class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed) noexcept {
        std::uint64_t s = seed;
        for (auto& word : state_) word = splitmix64(s);
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        const result_type result = rotl(state_[1] * 5, 7) * 9;
        const result_type t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

private:
    static constexpr result_type rotl(result_type x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

    result_type state_[4];
};

/// Variate generation on top of one engine. Not thread-safe; use one per stream.
class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1].
    double uniform_open_low() noexcept { return 1.0 - uniform(); }

    std::uint64_t below(std::uint64_t n) noexcept {
        // Lemire's multiply-shift; bias is below 2^-64 * n
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(engine_()) * n) >> 64);
    }

    /// Unit-mean exponential.
    double exponential() noexcept { return -std::log(uniform_open_low()); }

    /// Standard normal, Marsaglia polar method.
    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

    /// Gamma with shape `alpha` and rate `lambda` (mean alpha / lambda).
    /// Marsaglia-Tsang squeeze/rejection for alpha > 1, plain exponential for
    /// alpha == 1, and the U^(1/alpha) boost for alpha < 1.
    double gamma(double alpha, double lambda) {
        if (!(alpha > 0.0) || !(lambda > 0.0)) throw DomainError("gamma: shape and rate must be positive");
        if (alpha == 1.0) return exponential() / lambda;
        if (alpha < 1.0) {
            const double boost = std::pow(uniform_open_low(), 1.0 / alpha);
            return gamma_marsaglia_tsang(alpha + 1.0) * boost / lambda;
        }
        return gamma_marsaglia_tsang(alpha) / lambda;
    }

    /// Chi-distributed with `df` degrees of freedom.
    double chi(double df) { return std::sqrt(2.0 * gamma(0.5 * df, 1.0)); }

    Xoshiro256& engine() noexcept { return engine_; }

private:
    double gamma_marsaglia_tsang(double alpha) {
        const double d = alpha - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform_open_low();
            const double x2 = x * x;
            if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
            if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    Xoshiro256 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace gapratio
