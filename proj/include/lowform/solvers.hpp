#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <variant>
#include <vector>

#include "lowform/matrix.hpp"
#include "lowform/polynomial.hpp"

namespace lowform {

struct SolveOptions {
    std::size_t starts = 32;
    std::size_t max_iter = 500;
    /// Stationarity tolerance: projected-gradient norm (ball, sphere) or Frank-Wolfe gap (polyhedron).
    double tol = 1e-9;
    std::uint64_t seed = 0;
    /// Keep the objective sequence of every start in SolveResult::traces.
    bool record_traces = false;
};

enum class SolveStatus { converged, max_iter, infeasible };

std::string_view to_string(SolveStatus s);

struct SolveResult {
    double value = 0.0;
    Vector point;
    SolveStatus status = SolveStatus::max_iter;
    /// Iterations spent by the winning start.
    std::size_t iterations = 0;
    std::size_t starts_used = 0;
    std::vector<std::vector<double>> traces;
};

/// Which half of the sphere the last coordinate is restricted to.
enum class HalfSphere { none, y_nonneg, y_nonpos };

/// {X : rows·X ≤ rhs}
struct Polyhedron {
    Matrix rows;
    Vector rhs;

    std::size_t dim() const { return rows.cols(); }
    double max_violation(std::span<const double> x) const;
};

/// Multi-start projected gradient on the closed unit ball.
SolveResult minimize_ball(const Polynomial& p, const SolveOptions& opts = {});

/// Multi-start Riemannian projected gradient on S^{n-1}, optionally restricted
/// to one half by the sign of the last coordinate.
SolveResult minimize_sphere(const Polynomial& p, const SolveOptions& opts = {}, HalfSphere half = HalfSphere::none);

/// Multi-start away-step Frank-Wolfe with an LP linear-minimization oracle.
/// Throws InfeasibleError for an empty or unbounded region.
SolveResult minimize_polytope(const Polynomial& p, const Polyhedron& region, const SolveOptions& opts = {});

/// Returns a minimizer of direction·X over a compact convex set. Called
/// concurrently from several starts.
using LinearMinimizer = std::function<Vector(std::span<const double> direction)>;

/// Away-step Frank-Wolfe over the compact convex set described by its linear
/// minimization oracle (polytope hull, zonotope, ...).
SolveResult minimize_with_oracle(const Polynomial& p, const LinearMinimizer& oracle, const SolveOptions& opts = {});

struct BallDomain {};
struct SphereDomain {};
using Domain = std::variant<BallDomain, SphereDomain, Polyhedron>;

struct BruteForceResult {
    double value = 0.0;
    Vector point;
};

/// Sampling oracle: at least `resolution` domain points, then a derivative-free
/// compass polish (50 step halvings) from the 10 best. Throws DimensionError
/// for more than kBruteForceMaxDim variables.
BruteForceResult brute_force_min(const Polynomial& p, const Domain& domain, std::size_t resolution,
                                 std::uint64_t seed);

inline constexpr std::size_t kBruteForceMaxDim = 6;

/// Number of worker threads: LOWFORM_THREADS if set (≥ 1), else hardware concurrency.
std::size_t worker_threads();

}  // namespace lowform
