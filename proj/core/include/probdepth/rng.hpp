#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace probdepth {

/// Seedable PRNG with a fully specified algorithm: the raw stream is
/// std::mt19937_64 (whose output sequence is fixed by the C++ standard) and
/// all derived draws use the explicit mappings below rather than the
/// implementation-defined standard distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0,1): top 53 bits of the raw draw scaled by 2^-53.
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    int uniform_int(int lo, int hi_inclusive) {
        // Modulo bias is irrelevant for the small ranges used here.
        const std::uint64_t span = static_cast<std::uint64_t>(hi_inclusive - lo) + 1;
        return lo + static_cast<int>(gen_() % span);
    }

    /// Standard normal via the Box-Muller transform (two uniforms per pair,
    /// second value cached).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace probdepth
