#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace fwflow {

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for one named component (e.g. "matrix", "support") of an instance.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view component);

/// Seeded stream over std::mt19937_64. Uniform and normal draws are computed
/// from raw 64-bit outputs here rather than through <random> distributions,
/// whose algorithms are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    Rng(std::uint64_t seed, std::string_view component) : engine_(derive_seed(seed, component)) {}

    std::uint64_t next() { return engine_(); }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Standard normal (Marsaglia polar method).
    double normal();
    /// Uniform integer in [0, n), unbiased.
    std::uint64_t below(std::uint64_t n);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace fwflow
