#pragma once

// Counter-based random streams. Every (seed, stream_id) pair names an
// independent, reproducible sequence that can be re-derived anywhere (worker
// threads, reruns, resumed jobs) without coordination: state is two 64-bit
// words and advancing is one add + one mix.

#include <cmath>
#include <cstdint>
#include <string_view>

namespace spandrop {

namespace detail {

// SplitMix64 finalizer (Stafford mix13).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

}  // namespace detail

class RandomStream {
public:
    RandomStream(std::uint64_t state, std::uint64_t increment) noexcept
        : state_(state), increment_(increment | 1ULL) {}

    std::uint64_t next_u64() noexcept {
        state_ += increment_;
        return detail::mix64(state_);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double q) noexcept { return next_double() < q; }

    // Uniform integer in [0, bound); bound must be >= 1.
    std::uint64_t below(std::uint64_t bound) noexcept {
        std::uint64_t x, r;
        do {
            x = next_u64();
            r = x % bound;
        } while (x - r > std::uint64_t(0) - bound);
        return r;
    }

    double normal() noexcept {
        double u1 = next_double();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    // Marsaglia-Tsang for shape >= 1; shapes below 1 are boosted through
    // Gamma(shape + 1) * U^(1/shape).
    double gamma_variate(double shape) noexcept {
        if (shape < 1.0) {
            double u = next_double();
            if (u <= 0.0) u = 0x1.0p-53;
            return gamma_variate(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, t;
            do {
                x = normal();
                t = 1.0 + c * x;
            } while (t <= 0.0);
            const double v = t * t * t;
            const double u = next_double();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (u <= 0.0) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    // Beta variate in the open interval (0, 1).
    double beta_variate(double a, double b) noexcept {
        for (;;) {
            const double x = gamma_variate(a);
            const double y = gamma_variate(b);
            const double s = x + y;
            if (s <= 0.0) continue;
            const double r = x / s;
            if (r > 0.0 && r < 1.0) return r;
        }
    }

private:
    std::uint64_t state_;
    std::uint64_t increment_;
};

// Identical (seed, stream_id) pairs yield identical streams across runs,
// platforms and worker counts.
inline RandomStream derive_stream(std::uint64_t seed, std::uint64_t stream_id) noexcept {
    const std::uint64_t s = detail::mix64(seed ^ 0x5851f42d4c957f2dULL);
    const std::uint64_t state = detail::mix64(s + detail::kGolden * stream_id);
    const std::uint64_t inc = detail::mix64(s ^ detail::mix64(stream_id + 0x2545f4914f6cdd1dULL));
    return RandomStream(state, inc);
}

// FNV-1a. Used instead of std::hash so stream ids are stable across
// implementations.
inline std::uint64_t stable_hash64(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Stream id for one augmentation of one example: keyed to the example's id
// and the epoch, never to the worker that happens to process it.
inline std::uint64_t example_stream_id(std::string_view example_id, std::uint64_t epoch) noexcept {
    return detail::mix64(stable_hash64(example_id) + detail::kGolden * (epoch + 1));
}

}  // namespace spandrop
