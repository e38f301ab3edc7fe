#pragma once

#include <cmath>
#include <cstdint>

namespace fcc {

// SplitMix64 step (Steele, Lea and Flood's generator): the state advances by
// the golden-ratio increment and the output is a finalizer of the new state.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Counter-based stream derivation. mix64(seed, k) seeds the k-th logical
// stream (bootstrap replicate, simulation replication, ...). Streams are
// decorrelated by the SplitMix64 finalizer and independent of scheduling,
// which is what makes threaded runs byte-identical to serial ones.
inline std::uint64_t mix64(std::uint64_t seed, std::uint64_t counter) {
    std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Inverse standard normal CDF (Wichura's PPND16 rational approximations,
/// absolute error below 1e-15 on (0, 1)). Throws invalid_input_error outside
/// the open unit interval.
double inv_normal_cdf(double u);

/// Standard normal CDF via the complementary error function.
inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x * 0.7071067811865475244);
}

/// Deterministic generator: SplitMix64 stream with inverse-CDF shaping.
/// All distributional draws consume a documented number of uniforms, so a
/// stream's layout is stable across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    /// Uniform on the open interval (0, 1): 53-bit mantissa, offset half a
    /// step so 0 and 1 are unreachable.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    double normal() { return inv_normal_cdf(uniform01()); }

    /// Exponential with the given rate (mean 1/rate).
    double exponential(double rate);

    /// Gamma(shape, 1) via Marsaglia-Tsang squeeze; shape < 1 handled by the
    /// boosting identity.
    double gamma(double shape);

    double chi_square(double dof) { return 2.0 * gamma(0.5 * dof); }

    /// Unbiased integer in [0, n) by rejection.
    std::uint64_t uniform_index(std::uint64_t n);

private:
    std::uint64_t state_;
};

}  // namespace fcc
