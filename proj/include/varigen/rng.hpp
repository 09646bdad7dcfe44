#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace varigen {

uint64_t splitmix64(uint64_t x);
uint64_t fnv1a64(std::string_view bytes);
uint64_t fnv1a64(const void* data, size_t len);

/// Deterministic random stream. All randomness in the project flows through
/// explicitly passed Rng instances; there is no global random state.
/// mt19937_64 has a standardized sequence, and the uniform/normal mappings
/// below avoid the implementation-defined std::*_distribution classes.
class Rng {
public:
    explicit Rng(uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

    uint64_t seed() const { return seed_; }

    uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi], inclusive.
    int64_t uniform_int(int64_t lo, int64_t hi);

    /// Standard normal via Box-Muller (two uniforms per draw, no cached spare).
    double normal();

    /// Child stream derived from this stream's construction seed and a role
    /// label. Derivation depends only on (seed, role), not on draw position.
    Rng derive(std::string_view role) const {
        return Rng(splitmix64(seed_ ^ fnv1a64(role)));
    }

    Rng derive(std::string_view role, uint64_t index) const {
        return Rng(splitmix64(splitmix64(seed_ ^ fnv1a64(role)) + index));
    }

private:
    uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace varigen
