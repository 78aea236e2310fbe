#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace softcount {

/**
 * Reproducible random stream keyed by (seed, stream id).
 *
 * Backed by a 64-bit Mersenne Twister (period 2^19937 - 1) whose state is
 * expanded from the key through std::seed_seq, so distinct stream ids give
 * unrelated state vectors. All variates are produced by code in this library
 * rather than std:: distributions, whose output is implementation defined.
 */
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id = 0) : seed_(seed), stream_(stream_id) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream_id),
                          static_cast<std::uint32_t>(stream_id >> 32), 0x5f3759dfu};
        engine_.seed(seq);
    }

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on the open interval (0, 1) with 53 random bits.
    double uniform() {
        for (;;) {
            const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
            if (u > 0.0) return u;
        }
    }

    /// Standard normal via the Marsaglia polar method (spare value discarded).
    double normal() {
        for (;;) {
            const double a = 2.0 * uniform() - 1.0;
            const double b = 2.0 * uniform() - 1.0;
            const double r = a * a + b * b;
            if (r > 0.0 && r < 1.0) return a * std::sqrt(-2.0 * std::log(r) / r);
        }
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
};

}  // namespace softcount
