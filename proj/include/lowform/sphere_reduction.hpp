#pragma once

#include "lowform/detection.hpp"

namespace lowform {

/// min over the sphere of h(x) = f(ellᵀx) equals min over the unit m-ball of g(y) = f(L·y).
struct ReducedBallProblem {
    Polynomial g;
    /// (ellᵀell)^{1/2}, m×m.
    Matrix L;
    SparseForm source;
};

/// Throws DimensionError when the columns of sf.ell are dependent.
ReducedBallProblem reduce_sphere(const SparseForm& sf);

/// Point on the sphere with ellᵀx = L·y, so h(x) = g(y). Requires ‖y‖ ≤ 1 + 1e-10.
/// Throws DimensionError when m = n and ‖y‖ < 1 - 1e-8 (nothing orthogonal to lift along).
Vector lift_minimizer(const ReducedBallProblem& prob, const Vector& y_star);

/// Point in the ball with ellᵀx = L·y and ‖x‖ = ‖y‖.
Vector lift_to_ball(const ReducedBallProblem& prob, const Vector& y_star);

}  // namespace lowform
