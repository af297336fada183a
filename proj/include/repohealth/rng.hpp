#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "repohealth/common.hpp"

namespace repohealth {

// Deterministic random source. std::mt19937_64 has a standard-mandated
// output sequence, but the standard distributions do not, so every variate
// transform lives here. Identical seeds give identical streams on any
// conforming platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(mix64(seed)) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform on the open interval (0, 1).
    double uniform01() {
        while (true) {
            double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
            if (u > 0.0) return u;
        }
    }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // Box-Muller without the cached spare: always consumes two uniforms.
    double normal() {
        double u1 = uniform01();
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    double exponential() { return -std::log(uniform01()); }

    // Index in [0, n).
    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(uniform01() * static_cast<double>(n)) % n;
    }

    // Knuth product method; switches to a rounded normal approximation for
    // large rates where the exact method would be slow.
    std::int64_t poisson(double lambda) {
        if (lambda <= 0.0) return 0;
        if (lambda > 1e4) {
            double v = std::round(normal(lambda, std::sqrt(lambda)));
            return v < 0.0 ? 0 : static_cast<std::int64_t>(v);
        }
        const double limit = std::exp(-lambda);
        std::int64_t k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform01();
        } while (p > limit);
        return k - 1;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace repohealth
