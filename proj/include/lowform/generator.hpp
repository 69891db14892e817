#pragma once

#include <cstdint>

#include "lowform/matrix.hpp"
#include "lowform/polynomial.hpp"
#include "lowform/random.hpp"

namespace lowform {

/// A synthetic test instance h = f0(ell0ᵀx) + epsilon·g0 with its ground truth.
struct GeneratedInstance {
    Polynomial h;
    Polynomial f0;
    Matrix ell0;
    Polynomial g0;
    double epsilon = 0.0;
    std::uint64_t seed = 0;
};

/// Polynomial with N(0,1) coefficients on every monomial of total degree in [1, degree].
Polynomial random_dense_polynomial(std::size_t num_vars, int degree, Rng& rng);

/// n×m Gaussian matrix, optionally orthonormalized.
Matrix random_forms(std::size_t n, std::size_t m, Rng& rng, bool orthonormal);

/// Deterministic per seed. Requires m ≤ n. With degree 1 only one linear form
/// survives in f0, so the recoverable dimension is min(m, 1).
GeneratedInstance generate_instance(std::uint64_t seed, std::size_t n, std::size_t m, int degree, double epsilon,
                                    bool orthonormal_forms = true);

}  // namespace lowform
