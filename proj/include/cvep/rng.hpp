// Deterministic random number utilities.
//
// Everything here is pinned to algorithms with a stable written
// specification so that identical seeds give identical streams on any
// platform and standard library:
//   - engine: std::mt19937_64 (algorithm fixed by the C++ standard)
//   - seeding: std::seed_seq over explicit 64-bit components
//   - gaussian: Box-Muller over 53-bit uniforms (std::normal_distribution
//     is implementation-defined and must not be used here)
//   - bounded integers: rejection sampling on raw 64-bit draws
//     (std::uniform_int_distribution is implementation-defined too)

#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace cvep {

// splitmix64 finalizer; used to derive child seeds from a parent seed
// plus a salt (trial index, letter index, ...).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Seeds from multiple components via std::seed_seq, e.g.
    // {rng_seed, trial_seed, char_position}. Components are split into
    // 32-bit halves first; seed_seq itself only retains 32 bits per entry.
    explicit Rng(std::initializer_list<std::uint64_t> components) {
        std::vector<std::uint32_t> words;
        words.reserve(2 * components.size());
        for (std::uint64_t c : components) {
            words.push_back(static_cast<std::uint32_t>(c));
            words.push_back(static_cast<std::uint32_t>(c >> 32));
        }
        std::seed_seq seq(words.begin(), words.end());
        engine_.seed(seq);
    }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1): top 53 bits of one draw.
    double next_unit() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; draws two uniforms per pair and
    // caches the sine branch.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - next_unit(); // (0, 1], keeps log finite
        double u2 = next_unit();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    // Uniform integer in [0, n); rejection sampling, no modulo bias.
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace cvep
