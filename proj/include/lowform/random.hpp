#pragma once

#include <cstdint>
#include <random>

#include "lowform/matrix.hpp"

namespace lowform {

/// Seeded random source with platform-independent output.
///
/// std::mt19937_64 is fully specified by the standard, but the standard
/// distributions are not, so uniform and normal variates are derived here
/// directly from the raw 64-bit stream. Two Rng objects built from the same
/// (seed, stream) pair produce identical sequences everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform on (0, 1).
    double uniform_open();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Standard normal via Box-Muller.
    double normal();
    std::uint64_t next_u64() { return engine_(); }

    /// Uniform point in the closed unit ball of R^n: a normalized Gaussian
    /// direction scaled by U^{1/n}.
    Vector ball_point(std::size_t n);
    /// Uniform point on the unit sphere S^{n-1}.
    Vector sphere_point(std::size_t n);
    Vector normal_vector(std::size_t n);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// splitmix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace lowform
