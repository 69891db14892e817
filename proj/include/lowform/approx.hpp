#pragma once

#include <cstdint>
#include <vector>

#include "lowform/linalg.hpp"
#include "lowform/polynomial.hpp"
#include "lowform/solvers.hpp"

namespace lowform {

/// Eigen-split of the gradient moment matrix into the leading m directions and the rest.
struct SpectrumSplit {
    Matrix ell;  // n×m
    Matrix s;    // n×(n−m)
    Vector lambda_head;
    Vector lambda_tail;

    double tail_sum() const;
};

/// Requires 1 ≤ m < n.
SpectrumSplit split_spectrum(const Polynomial& h, std::size_t m);

/// Smallest m with (tail sum)/(total) < threshold. 0 for a constant h.
std::size_t choose_m(const Polynomial& h, double threshold = 1e-2);

/// f̂(X, Y) in m+1 variables; the last one is Y, standing for √(1 − ‖X‖²).
struct LiftedPolynomial {
    std::size_t m = 0;
    Polynomial poly;
};

/// f̂(X, Y) = E_v[h(ell·X + Y·s·v)], v uniform on the (n−m)-ball, integrated term by term.
LiftedPolynomial conditional_expectation_exact(const Polynomial& h, const SpectrumSplit& split);

/// Symmetric (±v) rule on the unit dim-ball, exact up to total degree `degree`.
struct CubatureRule {
    std::size_t dim = 0;
    int degree = 0;
    std::vector<Vector> nodes;
    Vector weights;
};

/// Gauss-Legendre for dim 1, non-negative moment matching over random ±v
/// pairs otherwise. Throws ConvergenceError("rule construction failed") when
/// the moment residual stays above 1e-8.
CubatureRule build_cubature(std::size_t dim, int degree, std::uint64_t seed);

/// Largest moment error of the rule over monomials of degree ≤ rule.degree.
double cubature_error(const CubatureRule& rule);

/// Σ_j θ_j h(ell·X + Y·s·v_j). Throws DimensionError when the rule's degree is below deg h.
LiftedPolynomial conditional_expectation_cubature(const Polynomial& h, const SpectrumSplit& split,
                                                  const CubatureRule& rule);

struct QSolution {
    double rho = 0.0;
    double rho_plus = 0.0;
    double rho_minus = 0.0;
    /// (X, Y) attaining rho.
    Vector point;
    SolveStatus status = SolveStatus::converged;
};

/// ρ⁺ = min f̂(X,Y) on the half-sphere Y ≥ 0, ρ⁻ = min f̂(X,−Y) on Y ≤ 0, ρ = min of both.
QSolution solve_Q(const LiftedPolynomial& fhat, const SolveOptions& opts = {});

/// ĥ(x) = f̂(ellᵀx, √(1 − ‖ellᵀx‖²)). Throws DimensionError when ‖ellᵀx‖ > 1 + 1e-6.
double hhat_eval(const LiftedPolynomial& fhat, const SpectrumSplit& split, std::span<const double> x);

/// ĥ as a polynomial in x, obtained by writing Y² = 1 − ‖ellᵀx‖². Requires f̂ even in Y.
Polynomial hhat_polynomial(const LiftedPolynomial& fhat, const SpectrumSplit& split);

/// Σ |coefficient| over terms of odd / positive degree in Y.
double odd_y_mass(const LiftedPolynomial& fhat);
double y_mass(const LiftedPolynomial& fhat);

struct L2Estimate {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Monte Carlo estimate of E[(h − ĥ)²] under the uniform ball measure.
L2Estimate l2_error(const Polynomial& h, const LiftedPolynomial& fhat, const SpectrumSplit& split,
                    std::size_t num_samples, std::uint64_t seed);

}  // namespace lowform
