#include "lowform/polytope_reduction.hpp"

#include <cmath>
#include <string>

#include "lowform/error.hpp"
#include "lowform/lp.hpp"

namespace lowform {

std::string_view to_string(CutLoopStatus s) {
    return s == CutLoopStatus::converged ? "converged" : "max_iter";
}

Polyhedron CutSet::polyhedron(const Vector& b, std::size_t m) const {
    Polyhedron region{Matrix(cuts.size(), m), Vector(cuts.size())};
    for (std::size_t i = 0; i < cuts.size(); ++i) {
        for (std::size_t j = 0; j < m; ++j) region.rows(i, j) = cuts[i].u[j];
        region.rhs[i] = dot(cuts[i].lambda, b);
    }
    return region;
}

namespace {

void check_shapes(const Polytope& poly) {
    if (poly.A.rows() != poly.b.size()) throw DimensionError("polytope: A and b disagree on the number of rows");
}

LpProblem standard_form(const Polytope& poly) {
    LpProblem lp(poly.dim());
    lp.equality_lhs = poly.A;
    lp.equality_rhs = poly.b;
    return lp;
}

// min / max of direction·x over the LP feasible set.
std::pair<double, double> range(LpProblem lp, const Vector& direction) {
    double out[2];
    for (int k = 0; k < 2; ++k) {
        lp.objective = k == 0 ? direction : scaled(-1.0, direction);
        const LpResult r = lp_solve(lp);
        if (r.status == LpStatus::infeasible) throw InfeasibleError("polytope is empty");
        if (r.status == LpStatus::unbounded) throw InfeasibleError("polytope is unbounded");
        if (r.status != LpStatus::optimal) throw ConvergenceError("polytope LP stalled");
        out[k] = k == 0 ? r.value : -r.value;
    }
    return {out[0], out[1]};
}

// Point of the LP feasible set minimizing ‖ellᵀx − X*‖₁. Base bounds carry over.
Vector recover_point(const LpProblem& base, const Matrix& ell, const Vector& x_star) {
    const std::size_t n = base.num_vars();
    const std::size_t m = ell.cols();
    LpProblem lp(n + 2 * m);
    lp.lower.assign(n + 2 * m, 0.0);
    lp.upper.assign(n + 2 * m, kInf);
    for (std::size_t j = 0; j < n; ++j) {
        if (!base.lower.empty()) lp.lower[j] = base.lower[j];
        if (!base.upper.empty()) lp.upper[j] = base.upper[j];
    }
    for (std::size_t j = 0; j < 2 * m; ++j) lp.objective[n + j] = 1.0;
    auto padded = [&](std::span<const double> row) {
        Vector r(n + 2 * m, 0.0);
        std::copy(row.begin(), row.end(), r.begin());
        return r;
    };
    for (std::size_t i = 0; i < base.inequality_lhs.rows(); ++i)
        lp.add_inequality(padded(base.inequality_lhs.row(i)), base.inequality_rhs[i]);
    for (std::size_t i = 0; i < base.equality_lhs.rows(); ++i)
        lp.add_equality(padded(base.equality_lhs.row(i)), base.equality_rhs[i]);
    for (std::size_t j = 0; j < m; ++j) {
        Vector r(n + 2 * m, 0.0);
        for (std::size_t i = 0; i < n; ++i) r[i] = ell(i, j);
        r[n + j] = -1.0;
        r[n + m + j] = 1.0;
        lp.add_equality(r, x_star[j]);
    }
    const LpResult r = lp_solve(lp);
    if (r.status != LpStatus::optimal) throw ConvergenceError("could not recover a feasible point");
    return Vector(r.x.begin(), r.x.begin() + static_cast<std::ptrdiff_t>(n));
}

void check_form(const SparseForm& sf, std::size_t n) {
    if (sf.ell.rows() != n) throw DimensionError("ell has " + std::to_string(sf.ell.rows()) + " rows, expected " +
                                                 std::to_string(n));
    if (sf.f.num_vars() != sf.ell.cols()) throw DimensionError("f and ell disagree on m");
}

}  // namespace

void check_polytope(const Polytope& poly) {
    check_shapes(poly);
    const LpProblem lp = standard_form(poly);
    for (std::size_t j = 0; j < poly.dim(); ++j) {
        Vector e(poly.dim(), 0.0);
        e[j] = 1.0;
        range(lp, e);
    }
}

Separation separation_lp(const Polytope& poly, const Matrix& ell, const Vector& x_star) {
    check_shapes(poly);
    const std::size_t s = poly.A.rows();
    const std::size_t n = poly.dim();
    const std::size_t m = ell.cols();
    if (ell.rows() != n) throw DimensionError("separation_lp: ell has the wrong number of rows");
    if (x_star.size() != m) throw DimensionError("separation_lp: X* has the wrong length");

    // Variables: lambda+, lambda-, u+, u- (all ≥ 0).
    const std::size_t nv = 2 * s + 2 * m;
    LpProblem lp(nv);
    for (std::size_t t = 0; t < s; ++t) {
        lp.objective[t] = poly.b[t];
        lp.objective[s + t] = -poly.b[t];
    }
    for (std::size_t j = 0; j < m; ++j) {
        lp.objective[2 * s + j] = -x_star[j];
        lp.objective[2 * s + m + j] = x_star[j];
    }
    // ell·u − Aᵀlambda ≤ 0, row by row.
    for (std::size_t i = 0; i < n; ++i) {
        Vector row(nv, 0.0);
        for (std::size_t t = 0; t < s; ++t) {
            row[t] = -poly.A(t, i);
            row[s + t] = poly.A(t, i);
        }
        for (std::size_t j = 0; j < m; ++j) {
            row[2 * s + j] = ell(i, j);
            row[2 * s + m + j] = -ell(i, j);
        }
        lp.add_inequality(row, 0.0);
    }
    lp.add_equality(Vector(nv, 1.0), 1.0);

    const LpResult r = lp_solve(lp);
    if (r.status == LpStatus::infeasible)
        throw InfeasibleError("separation: the cone section is empty, so the projection is unconstrained");
    if (r.status != LpStatus::optimal) throw ConvergenceError("separation LP did not finish");
    Separation out;
    out.tau = r.value;
    out.cut.lambda.resize(s);
    out.cut.u.resize(m);
    for (std::size_t t = 0; t < s; ++t) out.cut.lambda[t] = r.x[t] - r.x[s + t];
    for (std::size_t j = 0; j < m; ++j) out.cut.u[j] = r.x[2 * s + j] - r.x[2 * s + m + j];
    return out;
}

CutLoopResult cut_loop(const SparseForm& sf, const Polytope& poly, const CutLoopOptions& opts) {
    check_polytope(poly);
    check_form(sf, poly.dim());
    const std::size_t m = sf.ell.cols();
    const LpProblem base = standard_form(poly);
    CutLoopResult out;

    // Coordinate ranges of the projection bound every outer problem.
    Polyhedron box{Matrix(2 * m, m), Vector(2 * m)};
    for (std::size_t j = 0; j < m; ++j) {
        const auto [lo, hi] = range(base, sf.ell.column(j));
        box.rows(2 * j, j) = 1.0;
        box.rhs[2 * j] = hi;
        box.rows(2 * j + 1, j) = -1.0;
        box.rhs[2 * j + 1] = -lo;
    }

    if (m == 0) {
        out.rho = sf.f.evaluate(Vector{});
        out.status = CutLoopStatus::converged;
        out.x = recover_point(base, sf.ell, {});
        return out;
    }

    try {
        out.cuts.cuts.push_back(separation_lp(poly, sf.ell, Vector(m, 0.0)).cut);
    } catch (const InfeasibleError&) {
        // Nothing to start from; the box alone bounds the first outer problem.
    }

    for (std::size_t k = 0; k < opts.max_iter; ++k) {
        Polyhedron region = out.cuts.polyhedron(poly.b, m);
        Matrix rows(region.rows.rows() + box.rows.rows(), m);
        for (std::size_t i = 0; i < region.rows.rows(); ++i)
            for (std::size_t j = 0; j < m; ++j) rows(i, j) = region.rows(i, j);
        for (std::size_t i = 0; i < box.rows.rows(); ++i)
            for (std::size_t j = 0; j < m; ++j) rows(region.rows.rows() + i, j) = box.rows(i, j);
        region.rows = std::move(rows);
        region.rhs.insert(region.rhs.end(), box.rhs.begin(), box.rhs.end());

        const SolveResult inner = minimize_polytope(sf.f, region, opts.inner);
        out.bounds.push_back(inner.value);
        out.rho = inner.value;
        out.x_star = inner.point;
        out.iterations = k + 1;

        const Separation sep = separation_lp(poly, sf.ell, inner.point);
        out.taus.push_back(sep.tau);
        if (sep.tau >= -opts.tol) {
            out.status = CutLoopStatus::converged;
            break;
        }
        out.cuts.cuts.push_back(sep.cut);
    }
    out.x = recover_point(base, sf.ell, out.x_star);
    return out;
}

std::vector<Vector> simplex_projection(const Matrix& ell) {
    std::vector<Vector> points;
    for (std::size_t i = 0; i < ell.rows(); ++i) points.emplace_back(ell.row(i).begin(), ell.row(i).end());
    return points;
}

double box_support(const Matrix& ell, const Vector& u) {
    double s = 0.0;
    for (double v : ell * u) s += std::abs(v);
    return s;
}

namespace {

CutLoopResult finish_preset(const SparseForm& sf, const SolveResult& r, const LpProblem& base) {
    CutLoopResult out;
    out.rho = r.value;
    out.x_star = r.point;
    out.status = CutLoopStatus::converged;
    out.bounds.push_back(r.value);
    out.x = recover_point(base, sf.ell, r.point);
    return out;
}

}  // namespace

CutLoopResult reduce_simplex(const SparseForm& sf, const SolveOptions& opts) {
    const std::size_t n = sf.ell.rows();
    check_form(sf, n);
    if (n == 0) throw InfeasibleError("the simplex in R^0 is empty");
    const std::vector<Vector> points = simplex_projection(sf.ell);
    const SolveResult r = minimize_with_oracle(
        sf.f,
        [&points](std::span<const double> d) {
            std::size_t best = 0;
            for (std::size_t i = 1; i < points.size(); ++i)
                if (dot(d, points[i]) < dot(d, points[best])) best = i;
            return points[best];
        },
        opts);
    return finish_preset(sf, r, standard_form({Matrix(1, n, 1.0), Vector{1.0}}));
}

CutLoopResult reduce_box(const SparseForm& sf, const SolveOptions& opts) {
    const std::size_t n = sf.ell.rows();
    check_form(sf, n);
    const Matrix& ell = sf.ell;
    const SolveResult r = minimize_with_oracle(
        sf.f,
        [&ell](std::span<const double> d) {
            // The box vertex minimizing d·ellᵀx has x_i = −sign((ell·d)_i).
            const Vector c = ell * d;
            Vector x(c.size());
            for (std::size_t i = 0; i < c.size(); ++i) x[i] = c[i] > 0.0 ? -1.0 : 1.0;
            return transpose_times(ell, x);
        },
        opts);
    LpProblem box(n);
    box.lower.assign(n, -1.0);
    box.upper.assign(n, 1.0);
    return finish_preset(sf, r, box);
}

}  // namespace lowform
