#pragma once

#include <cstddef>

#include "lowform/matrix.hpp"

namespace lowform {

/// Default relative tolerance deciding numeric rank everywhere downstream.
inline constexpr double kDefaultRankTol = 1e-8;

/// Full spectrum of a symmetric matrix.
///
/// Eigenvalues are sorted descending; column i of `eigenvectors` pairs with
/// eigenvalue i and has its first non-negligible component positive.
struct SymEig {
    Vector eigenvalues;
    Matrix eigenvectors;
};

/// Cyclic Jacobi eigendecomposition. Throws DimensionError for non-square or
/// non-symmetric (beyond 1e-10 relative) input.
SymEig sym_eig(const Matrix& a);

/// Count of eigenvalues above rel_tol·max(λ₁, 1e-300). Expects descending input.
std::size_t numeric_rank(const Vector& eigenvalues, double rel_tol = kDefaultRankTol);

/// Symmetric PSD square root. Eigenvalues down to -1e-10·max(1,‖A‖) are
/// clamped to zero; anything more negative throws.
Matrix psd_sqrt(const Matrix& a);

/// Orthonormal basis of the column span (modified Gram-Schmidt, two passes).
/// Throws DimensionError when a column is dependent on the previous ones.
Matrix orthonormalize(const Matrix& columns, double rel_tol = 1e-10);

/// Least-squares solution of min ‖A·x − b‖ by Householder QR. A must have full column rank.
Vector least_squares(const Matrix& a, const Vector& b);

/// Lawson-Hanson non-negative least squares: min ‖A·x − b‖ subject to x ≥ 0.
Vector nnls(const Matrix& a, const Vector& b, std::size_t max_iter = 0);

/// Largest principal angle (radians) between the column spans of two matrices
/// with orthonormal columns and equal column count.
double max_principal_angle(const Matrix& q1, const Matrix& q2);

/// ‖A − Aᵀ‖ relative check used by the symmetric routines.
bool is_symmetric(const Matrix& a, double rel_tol = 1e-10);

}  // namespace lowform
