#pragma once

#include <string_view>
#include <vector>

#include "lowform/detection.hpp"
#include "lowform/solvers.hpp"

namespace lowform {

/// {x ≥ 0 : A·x = b}
struct Polytope {
    Matrix A;
    Vector b;

    std::size_t dim() const { return A.cols(); }
};

/// Valid inequality u·X ≤ lambda·b for every projected point X = ellᵀx, x ∈ Ω.
/// Holds whenever Aᵀlambda ≥ ell·u.
struct Cut {
    Vector lambda;
    Vector u;
};

struct CutSet {
    std::vector<Cut> cuts;

    /// {X : u_i·X ≤ lambda_i·b}
    Polyhedron polyhedron(const Vector& b, std::size_t m) const;
};

struct Separation {
    /// min of lambda·b − u·X* over the cone section normalized to unit ℓ1 mass.
    /// Non-negative (up to tolerance) iff X* lies in the projected set.
    double tau = 0.0;
    Cut cut;
};

/// Throws InfeasibleError when the normalized cone section is empty, meaning
/// the projection is unconstrained.
Separation separation_lp(const Polytope& poly, const Matrix& ell, const Vector& x_star);

enum class CutLoopStatus { converged, max_iter };

std::string_view to_string(CutLoopStatus s);

struct CutLoopOptions {
    SolveOptions inner;
    std::size_t max_iter = 50;
    double tol = 1e-8;
};

struct CutLoopResult {
    double rho = 0.0;
    Vector x_star;
    CutSet cuts;
    std::size_t iterations = 0;
    CutLoopStatus status = CutLoopStatus::max_iter;
    /// Optimal value of each outer problem, in order.
    std::vector<double> bounds;
    /// Separation value at each iterate, in order.
    std::vector<double> taus;
    /// A point of Ω with ellᵀx as close as possible to x_star (ℓ1).
    Vector x;
};

/// Throws InfeasibleError when Ω is empty or unbounded.
void check_polytope(const Polytope& poly);

/// min f(X) over the projection of Ω by alternating outer solves and separation.
CutLoopResult cut_loop(const SparseForm& sf, const Polytope& poly, const CutLoopOptions& opts = {});

/// Images ellᵀe_i of the simplex vertices: the rows of ell.
std::vector<Vector> simplex_projection(const Matrix& ell);

/// max of u·X over the projected box {ellᵀx : x ∈ [-1,1]^n}, i.e. ‖ell·u‖₁.
double box_support(const Matrix& ell, const Vector& u);

/// min f over the projected canonical simplex {x ≥ 0, Σx = 1}.
CutLoopResult reduce_simplex(const SparseForm& sf, const SolveOptions& opts = {});

/// min f over the projected box [-1,1]^n.
CutLoopResult reduce_box(const SparseForm& sf, const SolveOptions& opts = {});

}  // namespace lowform
