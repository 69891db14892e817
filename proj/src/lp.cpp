#include "lowform/lp.hpp"

#include <algorithm>
#include <cmath>

#include "lowform/error.hpp"

namespace lowform {

LpProblem::LpProblem(std::size_t num_vars)
    : objective(num_vars, 0.0),
      inequality_lhs(0, num_vars),
      equality_lhs(0, num_vars) {}

namespace {

void append_row(Matrix& m, Vector& rhs_vec, std::span<const double> row, double rhs) {
    if (row.size() != m.cols()) throw DimensionError("LpProblem: constraint row has wrong length");
    Matrix grown(m.rows() + 1, m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) grown(i, j) = m(i, j);
    for (std::size_t j = 0; j < m.cols(); ++j) grown(m.rows(), j) = row[j];
    m = std::move(grown);
    rhs_vec.push_back(rhs);
}

}  // namespace

void LpProblem::add_inequality(std::span<const double> row, double rhs) {
    append_row(inequality_lhs, inequality_rhs, row, rhs);
}

void LpProblem::add_equality(std::span<const double> row, double rhs) {
    append_row(equality_lhs, equality_rhs, row, rhs);
}

void LpProblem::make_free() {
    lower.assign(num_vars(), -kInf);
    upper.assign(num_vars(), kInf);
}

std::string_view to_string(LpStatus s) {
    switch (s) {
        case LpStatus::optimal: return "optimal";
        case LpStatus::unbounded: return "unbounded";
        case LpStatus::infeasible: return "infeasible";
        case LpStatus::stalled: return "stalled";
    }
    return "unknown";
}

namespace {

// How an original variable maps onto non-negative standard-form columns.
struct VarMap {
    enum Kind { shifted, reflected, split } kind;
    std::size_t column;
    double offset;
};

class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), t_((rows + 1) * (cols + 1), 0.0) {}

    double& at(std::size_t i, std::size_t j) { return t_[i * (cols_ + 1) + j]; }
    double at(std::size_t i, std::size_t j) const { return t_[i * (cols_ + 1) + j]; }
    double& rhs(std::size_t i) { return at(i, cols_); }
    double& cost(std::size_t j) { return at(rows_, j); }

    void pivot(std::size_t r, std::size_t c) {
        const double p = at(r, c);
        for (std::size_t j = 0; j <= cols_; ++j) at(r, j) /= p;
        at(r, c) = 1.0;
        for (std::size_t i = 0; i <= rows_; ++i) {
            if (i == r) continue;
            const double f = at(i, c);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= cols_; ++j) at(i, j) -= f * at(r, j);
            at(i, c) = 0.0;
        }
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

private:
    std::size_t rows_, cols_;
    std::vector<double> t_;
};

enum class Outcome { optimal, unbounded, stalled };

// Minimizes the objective stored in the last tableau row. Columns with
// allowed[j] == false never enter the basis.
Outcome run_simplex(Tableau& t, std::vector<std::size_t>& basis, const std::vector<bool>& allowed,
                    std::size_t max_iter, std::size_t& iterations, double eps) {
    const std::size_t m = t.rows();
    for (;;) {
        std::size_t enter = t.cols();
        for (std::size_t j = 0; j < t.cols(); ++j)
            if (allowed[j] && t.cost(j) < -eps) {
                enter = j;  // Bland: lowest index
                break;
            }
        if (enter == t.cols()) return Outcome::optimal;
        if (iterations >= max_iter) return Outcome::stalled;

        std::size_t leave = m;
        double best_ratio = kInf;
        for (std::size_t i = 0; i < m; ++i) {
            const double a = t.at(i, enter);
            if (a <= eps) continue;
            const double ratio = t.rhs(i) / a;
            if (leave == m) {
                leave = i;
                best_ratio = ratio;
                continue;
            }
            const double slack = 1e-12 * std::max(1.0, std::abs(best_ratio));
            if (ratio < best_ratio - slack) {
                leave = i;
                best_ratio = ratio;
            } else if (ratio <= best_ratio + slack && basis[i] < basis[leave]) {
                leave = i;  // Bland tie-break: lowest basic index leaves
            }
        }
        if (leave == m) return Outcome::unbounded;
        t.pivot(leave, enter);
        basis[leave] = enter;
        ++iterations;
    }
}

}  // namespace

LpResult lp_solve(const LpProblem& prob, std::size_t max_iter) {
    const std::size_t n = prob.num_vars();
    if (prob.inequality_lhs.cols() != n || prob.equality_lhs.cols() != n)
        throw DimensionError("lp_solve: constraint matrices have wrong column count");
    if (prob.inequality_lhs.rows() != prob.inequality_rhs.size() ||
        prob.equality_lhs.rows() != prob.equality_rhs.size())
        throw DimensionError("lp_solve: rhs length mismatch");
    const Vector lower = prob.lower.empty() ? Vector(n, 0.0) : prob.lower;
    const Vector upper = prob.upper.empty() ? Vector(n, kInf) : prob.upper;
    if (lower.size() != n || upper.size() != n) throw DimensionError("lp_solve: bound vectors have wrong length");

    for (std::size_t j = 0; j < n; ++j)
        if (lower[j] > upper[j]) return LpResult{LpStatus::infeasible, 0.0, {}, 0};

    // Map original variables to y >= 0.
    std::vector<VarMap> vars(n);
    std::size_t ny = 0;
    struct BoundRow {
        std::size_t column;
        double width;
    };
    std::vector<BoundRow> bound_rows;
    for (std::size_t j = 0; j < n; ++j) {
        if (std::isfinite(lower[j])) {
            vars[j] = {VarMap::shifted, ny, lower[j]};
            if (std::isfinite(upper[j])) bound_rows.push_back({ny, upper[j] - lower[j]});
            ny += 1;
        } else if (std::isfinite(upper[j])) {
            vars[j] = {VarMap::reflected, ny, upper[j]};
            ny += 1;
        } else {
            vars[j] = {VarMap::split, ny, 0.0};
            ny += 2;
        }
    }

    // Rewrites row·x as coefficients on y plus a constant.
    auto map_row = [&](std::span<const double> row, Vector& out) {
        out.assign(ny, 0.0);
        double constant = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double a = row[j];
            if (a == 0.0) continue;
            switch (vars[j].kind) {
                case VarMap::shifted:
                    out[vars[j].column] += a;
                    constant += a * vars[j].offset;
                    break;
                case VarMap::reflected:
                    out[vars[j].column] -= a;
                    constant += a * vars[j].offset;
                    break;
                case VarMap::split:
                    out[vars[j].column] += a;
                    out[vars[j].column + 1] -= a;
                    break;
            }
        }
        return constant;
    };

    const std::size_t n_ineq = prob.inequality_lhs.rows() + bound_rows.size();
    const std::size_t n_eq = prob.equality_lhs.rows();
    const std::size_t m = n_ineq + n_eq;
    const std::size_t n_struct = ny + n_ineq;  // structural + slack columns

    std::vector<Vector> rows(m);
    Vector rhs(m);
    for (std::size_t i = 0; i < prob.inequality_lhs.rows(); ++i) {
        const double c = map_row(prob.inequality_lhs.row(i), rows[i]);
        rhs[i] = prob.inequality_rhs[i] - c;
    }
    for (std::size_t k = 0; k < bound_rows.size(); ++k) {
        const std::size_t i = prob.inequality_lhs.rows() + k;
        rows[i].assign(ny, 0.0);
        rows[i][bound_rows[k].column] = 1.0;
        rhs[i] = bound_rows[k].width;
    }
    for (std::size_t i = 0; i < n_eq; ++i) {
        const double c = map_row(prob.equality_lhs.row(i), rows[n_ineq + i]);
        rhs[n_ineq + i] = prob.equality_rhs[i] - c;
    }

    double scale = 1.0;
    for (const auto& r : rows)
        for (double v : r) scale = std::max(scale, std::abs(v));
    const double eps = 1e-11 * scale;

    // Rows needing an artificial: equalities, and inequalities with negative rhs.
    std::vector<std::size_t> artificial_of(m, SIZE_MAX);
    std::size_t n_art = 0;
    for (std::size_t i = 0; i < m; ++i)
        if (i >= n_ineq || rhs[i] < 0.0) artificial_of[i] = n_struct + n_art++;

    Tableau t(m, n_struct + n_art);
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double sign = rhs[i] < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < ny; ++j) t.at(i, j) = sign * rows[i][j];
        if (i < n_ineq) t.at(i, ny + i) = sign;
        t.rhs(i) = sign * rhs[i];
        if (artificial_of[i] != SIZE_MAX) {
            t.at(i, artificial_of[i]) = 1.0;
            basis[i] = artificial_of[i];
        } else {
            basis[i] = ny + i;
        }
    }

    LpResult result;
    std::vector<bool> allowed(t.cols(), true);

    if (n_art > 0) {
        // Phase 1: minimize the sum of artificials.
        for (std::size_t i = 0; i < m; ++i)
            if (artificial_of[i] != SIZE_MAX)
                for (std::size_t j = 0; j <= t.cols(); ++j)
                    if (j < n_struct || j == t.cols()) t.at(m, j) -= t.at(i, j);
        const Outcome p1 = run_simplex(t, basis, allowed, max_iter, result.iterations, eps);
        if (p1 == Outcome::stalled) {
            result.status = LpStatus::stalled;
            return result;
        }
        double rhs_scale = 1.0;
        for (double v : rhs) rhs_scale = std::max(rhs_scale, std::abs(v));
        if (-t.rhs(m) > 1e-9 * rhs_scale) {
            result.status = LpStatus::infeasible;
            return result;
        }
        // Drive zero-level artificials out of the basis where possible.
        for (std::size_t i = 0; i < m; ++i) {
            if (basis[i] < n_struct) continue;
            for (std::size_t j = 0; j < n_struct; ++j)
                if (std::abs(t.at(i, j)) > 1e-9) {
                    t.pivot(i, j);
                    basis[i] = j;
                    break;
                }
        }
        for (std::size_t j = n_struct; j < t.cols(); ++j) allowed[j] = false;
    }

    // Phase 2 objective.
    for (std::size_t j = 0; j <= t.cols(); ++j) t.cost(j) = 0.0;
    Vector cy(ny, 0.0);
    map_row(prob.objective, cy);  // the constant shift does not affect the argmin
    for (std::size_t j = 0; j < ny; ++j) t.cost(j) = cy[j];
    for (std::size_t i = 0; i < m; ++i) {
        const double cb = basis[i] < ny ? cy[basis[i]] : 0.0;
        if (cb == 0.0) continue;
        for (std::size_t j = 0; j <= t.cols(); ++j) t.cost(j) -= cb * t.at(i, j);
    }
    const Outcome p2 = run_simplex(t, basis, allowed, max_iter, result.iterations, eps);
    if (p2 == Outcome::unbounded) {
        result.status = LpStatus::unbounded;
        return result;
    }
    if (p2 == Outcome::stalled) {
        result.status = LpStatus::stalled;
        return result;
    }

    Vector y(ny, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (basis[i] < ny) y[basis[i]] = std::max(0.0, t.rhs(i));
    result.x.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        switch (vars[j].kind) {
            case VarMap::shifted: result.x[j] = vars[j].offset + y[vars[j].column]; break;
            case VarMap::reflected: result.x[j] = vars[j].offset - y[vars[j].column]; break;
            case VarMap::split: result.x[j] = y[vars[j].column] - y[vars[j].column + 1]; break;
        }
    }
    result.value = dot(prob.objective, result.x);
    result.status = LpStatus::optimal;
    return result;
}

double lp_violation(const LpProblem& prob, std::span<const double> x) {
    double worst = 0.0;
    for (std::size_t i = 0; i < prob.inequality_lhs.rows(); ++i)
        worst = std::max(worst, dot(prob.inequality_lhs.row(i), x) - prob.inequality_rhs[i]);
    for (std::size_t i = 0; i < prob.equality_lhs.rows(); ++i)
        worst = std::max(worst, std::abs(dot(prob.equality_lhs.row(i), x) - prob.equality_rhs[i]));
    const std::size_t n = prob.num_vars();
    for (std::size_t j = 0; j < n; ++j) {
        const double lo = prob.lower.empty() ? 0.0 : prob.lower[j];
        const double hi = prob.upper.empty() ? kInf : prob.upper[j];
        worst = std::max({worst, lo - x[j], x[j] - hi});
    }
    return worst;
}

}  // namespace lowform
