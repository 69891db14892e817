#pragma once

#include <cstdint>
#include <string_view>

#include "lowform/linalg.hpp"
#include "lowform/polynomial.hpp"

namespace lowform {

enum class DetectionMethod { exact, randomized };

std::string_view to_string(DetectionMethod m);

/// Outcome of testing whether h depends on only a few linear forms.
struct DetectionReport {
    std::size_t m = 0;
    /// n×m, orthonormal columns spanning the gradient subspace.
    Matrix basis;
    /// Eigenvalues of the moment matrix (exact) or of HₖᵀHₖ at the stopping sample (randomized).
    Vector spectrum;
    DetectionMethod method = DetectionMethod::exact;
    /// Gradient samples drawn (randomized method only).
    std::size_t samples_used = 0;
    double rank_tol = kDefaultRankTol;
};

/// h(x) = f(ellᵀx).
struct SparseForm {
    Polynomial f;
    Matrix ell;
};

/// E[∇h ∇hᵀ] under the uniform distribution on the unit ball, computed exactly
/// from closed-form monomial moments.
Matrix moment_matrix(const Polynomial& h);

/// Rank and leading eigenvectors of the moment matrix. The gradient subspace is
/// the span of the eigenvectors with non-zero eigenvalues.
DetectionReport detect_exact(const Polynomial& h, double rank_tol = kDefaultRankTol);

/// Randomized rank test: draws gradients at uniform ball points until the rank
/// of the Gram matrix HₖᵀHₖ repeats between consecutive k. Throws
/// ConvergenceError("rank did not stabilize") once k reaches max_k.
DetectionReport detect_randomized(const Polynomial& h, std::uint64_t seed, double rank_tol = kDefaultRankTol,
                                  std::size_t max_k = 0);

/// f(X) = h(basis·X) for an orthonormal basis. Throws DimensionError otherwise.
SparseForm extract_sparse_form(const Polynomial& h, const Matrix& basis);

/// max |h(x) - f(ellᵀx)| / max(1, |h(x)|) over uniform ball samples.
double verify_sparse_form(const Polynomial& h, const SparseForm& sf, std::size_t num_points, std::uint64_t seed);

/// True when basisᵀbasis = I within tol.
bool has_orthonormal_columns(const Matrix& basis, double tol = 1e-8);

}  // namespace lowform
