#include "lowform/detection.hpp"

#include <algorithm>
#include <cmath>

#include "lowform/ball_moments.hpp"
#include "lowform/error.hpp"
#include "lowform/random.hpp"

namespace lowform {

std::string_view to_string(DetectionMethod m) { return m == DetectionMethod::exact ? "exact" : "randomized"; }

bool has_orthonormal_columns(const Matrix& basis, double tol) {
    if (basis.cols() == 0) return true;
    return max_abs(basis.transpose() * basis - Matrix::identity(basis.cols())) <= tol;
}

namespace {

// E[p·q] = Σ c_a c_b E[x^(a+b)], without materializing the product.
double expectation_of_product(const Polynomial& p, const Polynomial& q) {
    double sum = 0.0;
    Exponent e(p.num_vars());
    for (const auto& [ea, ca] : p.terms())
        for (const auto& [eb, cb] : q.terms()) {
            bool odd = false;
            for (std::size_t i = 0; i < e.size(); ++i) {
                e[i] = ea[i] + eb[i];
                odd = odd || (e[i] & 1);
            }
            if (!odd) sum += ca * cb * ball_monomial_moment(e);
        }
    return sum;
}

}  // namespace

Matrix moment_matrix(const Polynomial& h) {
    const std::size_t n = h.num_vars();
    if (n == 0) throw DimensionError("moment_matrix: polynomial has no variables");
    const auto g = gradient(h);
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = expectation_of_product(g[i], g[j]);
    return m;
}

DetectionReport detect_exact(const Polynomial& h, double rank_tol) {
    const SymEig eig = sym_eig(moment_matrix(h));
    DetectionReport r;
    r.method = DetectionMethod::exact;
    r.rank_tol = rank_tol;
    r.spectrum = eig.eigenvalues;
    r.m = numeric_rank(eig.eigenvalues, rank_tol);
    r.basis = eig.eigenvectors.column_block(0, r.m);
    if (r.m > 0) r.basis = orthonormalize(r.basis);
    return r;
}

namespace {

// Picks `count` columns by Gram-Schmidt with column pivoting (largest residual
// first) and returns their orthonormalized span.
Matrix pivoted_span(const std::vector<Vector>& columns, std::size_t count, std::size_t n) {
    std::vector<Vector> residual = columns;
    std::vector<bool> used(columns.size(), false);
    Matrix q(n, count);
    for (std::size_t k = 0; k < count; ++k) {
        std::size_t best = columns.size();
        double best_norm = -1.0;
        for (std::size_t j = 0; j < columns.size(); ++j) {
            if (used[j]) continue;
            const double r = norm2(residual[j]);
            if (r > best_norm) {
                best_norm = r;
                best = j;
            }
        }
        if (best == columns.size() || best_norm <= 0.0)
            throw DimensionError("detect_randomized: gradient samples do not span the detected rank");
        used[best] = true;
        Vector v = residual[best];
        // Re-orthogonalize once against the accepted directions.
        for (std::size_t i = 0; i < k; ++i) {
            const Vector qi = q.column(i);
            v = axpy(-dot(qi, v), qi, v);
        }
        const double r = norm2(v);
        for (double& x : v) x /= r;
        q.set_column(k, v);
        for (std::size_t j = 0; j < columns.size(); ++j)
            if (!used[j]) residual[j] = axpy(-dot(v, residual[j]), v, residual[j]);
    }
    return q;
}

std::size_t gram_rank(const std::vector<Vector>& columns, double rank_tol, Vector* spectrum) {
    const std::size_t k = columns.size();
    Matrix gram(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i; j < k; ++j) gram(i, j) = gram(j, i) = dot(columns[i], columns[j]);
    const SymEig eig = sym_eig(gram);
    if (spectrum) *spectrum = eig.eigenvalues;
    return numeric_rank(eig.eigenvalues, rank_tol);
}

}  // namespace

DetectionReport detect_randomized(const Polynomial& h, std::uint64_t seed, double rank_tol, std::size_t max_k) {
    const std::size_t n = h.num_vars();
    if (n == 0) throw DimensionError("detect_randomized: polynomial has no variables");
    if (max_k == 0) max_k = n + 2;
    if (max_k < 2) throw DimensionError("detect_randomized: max_k must be at least 2");

    const auto g = gradient(h);
    Rng rng(seed);
    std::vector<Vector> columns;
    Vector spectrum;
    std::size_t previous_rank = 0;
    for (std::size_t k = 1; k <= max_k; ++k) {
        columns.push_back(evaluate_all(g, rng.ball_point(n)));
        const std::size_t rank = gram_rank(columns, rank_tol, &spectrum);
        if (k >= 2 && rank == previous_rank) {
            columns.pop_back();  // the basis comes from the first k-1 gradients
            DetectionReport r;
            r.method = DetectionMethod::randomized;
            r.rank_tol = rank_tol;
            r.m = rank;
            r.samples_used = k;
            r.spectrum = spectrum;
            r.basis = rank == 0 ? Matrix(n, 0) : pivoted_span(columns, rank, n);
            return r;
        }
        previous_rank = rank;
    }
    throw ConvergenceError("rank did not stabilize");
}

SparseForm extract_sparse_form(const Polynomial& h, const Matrix& basis) {
    if (basis.rows() != h.num_vars()) throw DimensionError("extract_sparse_form: basis row count differs from n");
    if (!has_orthonormal_columns(basis)) throw DimensionError("extract_sparse_form: basis is not orthonormal");
    return SparseForm{substitute_matrix(h, basis), basis};
}

double verify_sparse_form(const Polynomial& h, const SparseForm& sf, std::size_t num_points, std::uint64_t seed) {
    if (sf.ell.rows() != h.num_vars() || sf.ell.cols() != sf.f.num_vars())
        throw DimensionError("verify_sparse_form: shapes of h, f and ell disagree");
    Rng rng(seed, 0x5eed);
    double worst = 0.0;
    for (std::size_t k = 0; k < num_points; ++k) {
        const Vector x = rng.ball_point(h.num_vars());
        const double hx = h.evaluate(x);
        const double fx = sf.f.evaluate(transpose_times(sf.ell, x));
        worst = std::max(worst, std::abs(hx - fx) / std::max(1.0, std::abs(hx)));
    }
    return worst;
}

}  // namespace lowform
