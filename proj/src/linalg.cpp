#include "lowform/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lowform/error.hpp"

namespace lowform {

bool is_symmetric(const Matrix& a, double rel_tol) {
    if (a.rows() != a.cols()) return false;
    const double scale = std::max(1.0, max_abs(a));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j)
            if (std::abs(a(i, j) - a(j, i)) > rel_tol * scale) return false;
    return true;
}

namespace {

void fix_sign(Matrix& v, std::size_t col) {
    double largest = 0.0;
    for (std::size_t i = 0; i < v.rows(); ++i) largest = std::max(largest, std::abs(v(i, col)));
    const double cutoff = 1e-12 * largest;
    for (std::size_t i = 0; i < v.rows(); ++i) {
        if (std::abs(v(i, col)) <= cutoff) continue;
        if (v(i, col) < 0.0)
            for (std::size_t k = 0; k < v.rows(); ++k) v(k, col) = -v(k, col);
        return;
    }
}

}  // namespace

SymEig sym_eig(const Matrix& input) {
    if (input.rows() != input.cols()) throw DimensionError("sym_eig: matrix is not square");
    if (!is_symmetric(input)) throw DimensionError("sym_eig: matrix is not symmetric");
    const std::size_t n = input.rows();

    // Work on the symmetrized copy so tiny asymmetries cannot bias the result.
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (input(i, j) + input(j, i));
    Matrix v = Matrix::identity(n);

    const double scale = frobenius_norm(a);
    for (int sweep = 0; sweep < 100 && scale > 0.0; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (std::sqrt(off) <= 1e-16 * scale) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

    SymEig out{Vector(n), Matrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.eigenvalues[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
        fix_sign(out.eigenvectors, k);
    }
    return out;
}

std::size_t numeric_rank(const Vector& eigenvalues, double rel_tol) {
    if (eigenvalues.empty()) return 0;
    const double top = *std::max_element(eigenvalues.begin(), eigenvalues.end());
    const double cutoff = rel_tol * std::max(top, 1e-300);
    return static_cast<std::size_t>(
        std::count_if(eigenvalues.begin(), eigenvalues.end(), [&](double l) { return l > cutoff; }));
}

Matrix psd_sqrt(const Matrix& a) {
    const SymEig eig = sym_eig(a);
    const std::size_t n = a.rows();
    const double floor = -1e-10 * std::max(1.0, max_abs(a));
    Matrix s(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double lambda = eig.eigenvalues[k];
        if (lambda < floor) throw DimensionError("psd_sqrt: matrix is indefinite");
        const double root = std::sqrt(std::max(lambda, 0.0));
        if (root == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                s(i, j) += root * eig.eigenvectors(i, k) * eig.eigenvectors(j, k);
    }
    // Symmetrize away rounding.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) s(i, j) = s(j, i) = 0.5 * (s(i, j) + s(j, i));
    return s;
}

Matrix orthonormalize(const Matrix& columns, double rel_tol) {
    const std::size_t n = columns.rows();
    const std::size_t k = columns.cols();
    if (k > n) throw DimensionError("orthonormalize: more columns than rows");
    Matrix q(n, k);
    for (std::size_t j = 0; j < k; ++j) {
        Vector v = columns.column(j);
        const double original = norm2(v);
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t i = 0; i < j; ++i) {
                const Vector qi = q.column(i);
                v = axpy(-dot(qi, v), qi, v);
            }
        const double r = norm2(v);
        if (original == 0.0 || r <= rel_tol * original)
            throw DimensionError("orthonormalize: columns are linearly dependent");
        for (double& x : v) x /= r;
        q.set_column(j, v);
    }
    return q;
}

Vector least_squares(const Matrix& a_in, const Vector& b_in) {
    const std::size_t m = a_in.rows();
    const std::size_t n = a_in.cols();
    if (b_in.size() != m) throw DimensionError("least_squares: rhs length mismatch");
    if (n > m) throw DimensionError("least_squares: underdetermined system");
    Matrix a = a_in;
    Vector b = b_in;
    const double scale = std::max(1e-300, max_abs(a));
    for (std::size_t j = 0; j < n; ++j) {
        double norm = 0.0;
        for (std::size_t i = j; i < m; ++i) norm += a(i, j) * a(i, j);
        norm = std::sqrt(norm);
        if (norm <= 1e-13 * scale) throw DimensionError("least_squares: rank-deficient matrix");
        const double alpha = a(j, j) > 0.0 ? -norm : norm;
        // Householder vector stored in place: v = a(j:, j) - alpha·e1.
        a(j, j) -= alpha;
        double vnorm2 = 0.0;
        for (std::size_t i = j; i < m; ++i) vnorm2 += a(i, j) * a(i, j);
        for (std::size_t col = j + 1; col < n; ++col) {
            double s = 0.0;
            for (std::size_t i = j; i < m; ++i) s += a(i, j) * a(i, col);
            s = 2.0 * s / vnorm2;
            for (std::size_t i = j; i < m; ++i) a(i, col) -= s * a(i, j);
        }
        double s = 0.0;
        for (std::size_t i = j; i < m; ++i) s += a(i, j) * b[i];
        s = 2.0 * s / vnorm2;
        for (std::size_t i = j; i < m; ++i) b[i] -= s * a(i, j);
        a(j, j) = alpha;
    }
    Vector x(n);
    for (std::size_t jj = n; jj-- > 0;) {
        double s = b[jj];
        for (std::size_t col = jj + 1; col < n; ++col) s -= a(jj, col) * x[col];
        x[jj] = s / a(jj, jj);
    }
    return x;
}

Vector nnls(const Matrix& a, const Vector& b, std::size_t max_iter) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    if (b.size() != m) throw DimensionError("nnls: rhs length mismatch");
    if (max_iter == 0) max_iter = 3 * n + 30;

    Vector x(n, 0.0);
    std::vector<bool> passive(n, false);
    const double tol = 10.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, frobenius_norm(a)) *
                       static_cast<double>(std::max(m, n));

    auto residual_gradient = [&]() {
        Vector r = b;
        for (std::size_t i = 0; i < m; ++i) r[i] -= dot(a.row(i), x);
        return transpose_times(a, r);
    };

    auto solve_passive = [&]() {
        std::vector<std::size_t> idx;
        for (std::size_t j = 0; j < n; ++j)
            if (passive[j]) idx.push_back(j);
        Matrix sub(m, idx.size());
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t k = 0; k < idx.size(); ++k) sub(i, k) = a(i, idx[k]);
        const Vector zsub = least_squares(sub, b);
        Vector z(n, 0.0);
        for (std::size_t k = 0; k < idx.size(); ++k) z[idx[k]] = zsub[k];
        return z;
    };

    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        const Vector w = residual_gradient();
        std::size_t best = n;
        double best_w = tol;
        for (std::size_t j = 0; j < n; ++j)
            if (!passive[j] && w[j] > best_w) {
                best_w = w[j];
                best = j;
            }
        if (best == n) break;
        passive[best] = true;

        for (;;) {
            Vector z;
            try {
                z = solve_passive();
            } catch (const DimensionError&) {
                // The new column is dependent on the passive set; drop it and stop.
                passive[best] = false;
                return x;
            }
            bool feasible = true;
            for (std::size_t j = 0; j < n; ++j)
                if (passive[j] && z[j] <= 0.0) feasible = false;
            if (feasible) {
                x = z;
                break;
            }
            double alpha = 1.0;
            for (std::size_t j = 0; j < n; ++j)
                if (passive[j] && z[j] <= 0.0) alpha = std::min(alpha, x[j] / (x[j] - z[j]));
            for (std::size_t j = 0; j < n; ++j) {
                if (!passive[j]) continue;
                x[j] += alpha * (z[j] - x[j]);
                if (x[j] <= tol) {
                    x[j] = 0.0;
                    passive[j] = false;
                }
            }
        }
    }
    return x;
}

double max_principal_angle(const Matrix& q1, const Matrix& q2) {
    if (q1.rows() != q2.rows() || q1.cols() != q2.cols())
        throw DimensionError("max_principal_angle: bases differ in shape");
    if (q1.cols() == 0) return 0.0;
    // sin of the largest angle is the spectral norm of (I - Q1·Q1ᵀ)·Q2.
    const Matrix residual = q2 - q1 * (q1.transpose() * q2);
    const SymEig eig = sym_eig(residual.transpose() * residual);
    const double sin_max = std::sqrt(std::max(0.0, eig.eigenvalues.front()));
    return std::asin(std::min(1.0, sin_max));
}

}  // namespace lowform
