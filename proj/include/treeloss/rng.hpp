#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace treeloss {

namespace detail {

/// splitmix64 step: advances `state` and returns the next output word.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Stateless 64-bit avalanche mix (splitmix64 finalizer).
inline std::uint64_t mix64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace detail

/// Deterministic random stream addressed by (seed, stream id).
///
/// The pair fully determines the sequence, so replication i of a run can be
/// reproduced in isolation by rebuilding stream i; interleaving across worker
/// threads never changes what any stream produces. The core generator is
/// xoshiro256++, state-seeded through splitmix64.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id) {
        std::uint64_t key = detail::mix64(seed ^ 0x5851f42d4c957f2dULL) +
                            detail::mix64(stream_id ^ 0x14057b7ef767814fULL);
        for (auto& word : state_) word = detail::splitmix64(key);
        // xoshiro must not start from the all-zero state.
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[3] = 1;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl64(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl64(state_[3], 45);
        return result;
    }

    /// Uniform on [0, 1): 53 random bits scaled by 2^-53.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on the open interval (0, 1); never returns an exact endpoint.
    double uniform_open01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Bernoulli(p). p = 0 never fires, p = 1 always does.
    bool bernoulli(double p) { return uniform01() < p; }

    /// Standard normal via the Marsaglia polar method (second variate cached).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

    /// Gamma(shape, rate 1) via Marsaglia-Tsang squeeze. Shapes below 1 are
    /// rejected rather than silently boosted.
    double gamma(double shape) {
        if (!(shape >= 1.0))
            throw std::invalid_argument("RngStream::gamma: shape must be >= 1");
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform_open01();
            if (u < 1.0 - 0.0331 * (x * x) * (x * x)) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    /// Poisson(lambda): sequential inversion for small means, Hormann's PTRS
    /// transformed rejection otherwise.
    std::uint64_t poisson(double lambda) {
        if (!(lambda >= 0.0) || !std::isfinite(lambda))
            throw std::invalid_argument("RngStream::poisson: mean must be finite and >= 0");
        if (lambda == 0.0) return 0;
        if (lambda <= 30.0) return poisson_inversion(lambda);
        return poisson_ptrs(lambda);
    }

private:
    std::uint64_t poisson_inversion(double lambda) {
        const double u = uniform01();
        double pmf = std::exp(-lambda);
        double cdf = pmf;
        std::uint64_t k = 0;
        // The cap is unreachable in any statistical sense; it only guards
        // against the accumulated cdf saturating just below u.
        const std::uint64_t cap =
            static_cast<std::uint64_t>(lambda + 60.0 * std::sqrt(lambda) + 60.0);
        while (u >= cdf && k < cap) {
            ++k;
            pmf *= lambda / static_cast<double>(k);
            cdf += pmf;
        }
        return k;
    }

    std::uint64_t poisson_ptrs(double lambda) {
        const double b = 0.931 + 2.53 * std::sqrt(lambda);
        const double a = -0.059 + 0.02483 * b;
        const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        const double v_r = 0.9277 - 3.6224 / (b - 2.0);
        const double log_lambda = std::log(lambda);
        for (;;) {
            const double u = uniform01() - 0.5;
            const double v = uniform01();
            const double us = 0.5 - std::fabs(u);
            const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
            if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(k);
            if (k < 0.0 || (us < 0.013 && v > us)) continue;
            if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
                k * log_lambda - lambda - std::lgamma(k + 1.0))
                return static_cast<std::uint64_t>(k);
        }
    }

    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace treeloss
