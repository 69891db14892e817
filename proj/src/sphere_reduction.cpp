#include "lowform/sphere_reduction.hpp"

#include <cmath>
#include <string>

#include "lowform/error.hpp"

namespace lowform {

namespace {

void check_point(const ReducedBallProblem& prob, const Vector& y) {
    if (y.size() != prob.L.rows())
        throw DimensionError("lift: expected a point with " + std::to_string(prob.L.rows()) + " coordinates");
    if (norm2(y) > 1.0 + 1e-10) throw DimensionError("lift: point lies outside the unit ball");
}

}  // namespace

ReducedBallProblem reduce_sphere(const SparseForm& sf) {
    const std::size_t m = sf.ell.cols();
    if (sf.f.num_vars() != m) throw DimensionError("reduce_sphere: f and ell disagree on m");
    const Matrix gram = sf.ell.transpose() * sf.ell;
    if (m > 0 && numeric_rank(sym_eig(gram).eigenvalues, 1e-12) < m)
        throw DimensionError("reduce_sphere: columns of ell are linearly dependent");
    ReducedBallProblem prob;
    prob.L = psd_sqrt(gram);
    prob.g = m == 0 ? sf.f : substitute_matrix(sf.f, prob.L);
    prob.source = sf;
    return prob;
}

Vector lift_to_ball(const ReducedBallProblem& prob, const Vector& y_star) {
    check_point(prob, y_star);
    const Matrix& ell = prob.source.ell;
    if (ell.cols() == 0) return Vector(ell.rows(), 0.0);
    // ell·L⁻¹ has orthonormal columns, so the norm carries over.
    return ell * least_squares(prob.L, y_star);
}

Vector lift_minimizer(const ReducedBallProblem& prob, const Vector& y_star) {
    Vector x = lift_to_ball(prob, y_star);
    const Matrix& ell = prob.source.ell;
    const std::size_t n = ell.rows();
    const double r = norm2(y_star);
    if (ell.cols() == n) {
        if (r < 1.0 - 1e-8) throw DimensionError("lift: m = n leaves no direction to reach the sphere");
        return scaled(1.0 / norm2(x), x);
    }
    // Kernel direction of ellᵀ: eigenvector of ell·ellᵀ for its smallest (zero) eigenvalue.
    const SymEig eig = sym_eig(ell * ell.transpose());
    const Vector w = eig.eigenvectors.column(n - 1);
    return axpy(std::sqrt(std::max(0.0, 1.0 - r * r)), w, x);
}

}  // namespace lowform
