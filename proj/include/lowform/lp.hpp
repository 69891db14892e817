#pragma once

#include <cstddef>
#include <limits>
#include <string_view>

#include "lowform/matrix.hpp"

namespace lowform {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// minimize objective·x
/// subject to  inequality_lhs·x ≤ inequality_rhs
///             equality_lhs·x   = equality_rhs
///             lower ≤ x ≤ upper
///
/// Empty bound vectors mean x ≥ 0 with no upper bound. Use ±kInf for
/// missing individual bounds.
struct LpProblem {
    Vector objective;
    Matrix inequality_lhs;
    Vector inequality_rhs;
    Matrix equality_lhs;
    Vector equality_rhs;
    Vector lower;
    Vector upper;

    explicit LpProblem(std::size_t num_vars = 0);
    std::size_t num_vars() const { return objective.size(); }

    void add_inequality(std::span<const double> row, double rhs);
    void add_equality(std::span<const double> row, double rhs);
    /// Marks every variable free (no bounds).
    void make_free();
};

enum class LpStatus { optimal, unbounded, infeasible, stalled };

std::string_view to_string(LpStatus s);

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    double value = 0.0;
    Vector x;
    std::size_t iterations = 0;
};

/// Two-phase primal simplex on a dense tableau with Bland's anti-cycling rule.
LpResult lp_solve(const LpProblem& prob, std::size_t max_iter = 20000);

/// Largest violation of any constraint or bound at x (0 when feasible).
double lp_violation(const LpProblem& prob, std::span<const double> x);

}  // namespace lowform
