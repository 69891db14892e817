#include "lowform/approx.hpp"

#include <cmath>
#include <string>

#include "lowform/ball_moments.hpp"
#include "lowform/detection.hpp"
#include "lowform/error.hpp"
#include "lowform/parallel.hpp"
#include "lowform/random.hpp"

namespace lowform {

double SpectrumSplit::tail_sum() const {
    double t = 0.0;
    for (double v : lambda_tail) t += std::max(v, 0.0);
    return t;
}

SpectrumSplit split_spectrum(const Polynomial& h, std::size_t m) {
    const std::size_t n = h.num_vars();
    if (m < 1 || m >= n) throw DimensionError("split_spectrum: need 1 <= m < n, got m = " + std::to_string(m));
    const SymEig eig = sym_eig(moment_matrix(h));
    SpectrumSplit split;
    split.ell = eig.eigenvectors.column_block(0, m);
    split.s = eig.eigenvectors.column_block(m, n - m);
    split.lambda_head.assign(eig.eigenvalues.begin(), eig.eigenvalues.begin() + static_cast<std::ptrdiff_t>(m));
    split.lambda_tail.assign(eig.eigenvalues.begin() + static_cast<std::ptrdiff_t>(m), eig.eigenvalues.end());
    return split;
}

std::size_t choose_m(const Polynomial& h, double threshold) {
    const Vector lambda = sym_eig(moment_matrix(h)).eigenvalues;
    double total = 0.0;
    for (double v : lambda) total += std::max(v, 0.0);
    if (total <= 0.0) return 0;
    double tail = total;
    for (std::size_t m = 0; m < lambda.size(); ++m) {
        if (tail / total < threshold) return m;
        tail -= std::max(lambda[m], 0.0);
    }
    return lambda.size();
}

LiftedPolynomial conditional_expectation_exact(const Polynomial& h, const SpectrumSplit& split) {
    const std::size_t n = h.num_vars();
    const std::size_t m = split.ell.cols();
    const std::size_t k = split.s.cols();
    if (split.ell.rows() != n || split.s.rows() != n || m + k != n)
        throw DimensionError("conditional expectation: split does not match h");
    // x = ell·X + s·w with w = Y·v; every w-monomial then averages to Y^|b|·E[v^b].
    std::vector<Polynomial> forms;
    for (std::size_t i = 0; i < n; ++i) {
        Vector row(n);
        for (std::size_t j = 0; j < m; ++j) row[j] = split.ell(i, j);
        for (std::size_t j = 0; j < k; ++j) row[m + j] = split.s(i, j);
        forms.push_back(Polynomial::linear(row));
    }
    const Polynomial composed = substitute_linear(h, forms);
    LiftedPolynomial out{m, Polynomial(m + 1)};
    for (const auto& [e, c] : composed.terms()) {
        const Exponent b(e.begin() + static_cast<std::ptrdiff_t>(m), e.end());
        const double mom = ball_monomial_moment(b);
        if (mom == 0.0) continue;
        Exponent lifted(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(m));
        lifted.push_back(total_degree(b));
        out.poly.add_term(lifted, c * mom);
    }
    return out;
}

namespace {

void for_each_monomial(std::size_t dim, int max_degree, const std::function<void(const Exponent&)>& visit) {
    Exponent cur(dim, 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int remaining) {
        if (pos == dim) {
            visit(cur);
            return;
        }
        for (int a = 0; a <= remaining; ++a) {
            cur[pos] = a;
            rec(pos + 1, remaining - a);
        }
        cur[pos] = 0;
    };
    rec(0, max_degree);
}

double monomial_at(const Exponent& e, const Vector& v) {
    double r = 1.0;
    for (std::size_t i = 0; i < e.size(); ++i) r *= std::pow(v[i], e[i]);
    return r;
}

CubatureRule gauss_legendre(int degree) {
    // k nodes integrate degree 2k−1 exactly (Golub-Welsch on the Legendre recurrence).
    const std::size_t k = static_cast<std::size_t>(degree / 2 + 1);
    Matrix jacobi(k, k);
    for (std::size_t i = 1; i < k; ++i) {
        const double j = static_cast<double>(i);
        jacobi(i, i - 1) = jacobi(i - 1, i) = j / std::sqrt(4.0 * j * j - 1.0);
    }
    const SymEig eig = sym_eig(jacobi);
    CubatureRule rule{1, degree, {}, {}};
    for (std::size_t i = 0; i < k; ++i) {
        rule.nodes.push_back({eig.eigenvalues[i]});
        const double v0 = eig.eigenvectors(0, i);
        rule.weights.push_back(v0 * v0);  // the uniform probability measure on [−1,1] has total mass 1
    }
    // Enforce exact ± symmetry of the nodes.
    for (std::size_t i = 0; i < k / 2; ++i) {
        const std::size_t j = k - 1 - i;
        const double x = 0.5 * (rule.nodes[i][0] - rule.nodes[j][0]);
        const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
        rule.nodes[i][0] = x;
        rule.nodes[j][0] = -x;
        rule.weights[i] = rule.weights[j] = w;
    }
    if (k % 2 == 1) rule.nodes[k / 2][0] = 0.0;
    return rule;
}

}  // namespace

double cubature_error(const CubatureRule& rule) {
    double worst = 0.0;
    for_each_monomial(rule.dim, rule.degree, [&](const Exponent& e) {
        double sum = 0.0;
        for (std::size_t j = 0; j < rule.nodes.size(); ++j) sum += rule.weights[j] * monomial_at(e, rule.nodes[j]);
        worst = std::max(worst, std::abs(sum - ball_monomial_moment(e)));
    });
    return worst;
}

CubatureRule build_cubature(std::size_t dim, int degree, std::uint64_t seed) {
    if (dim == 0) throw DimensionError("build_cubature: dim must be positive");
    if (degree < 0) throw DimensionError("build_cubature: degree must be non-negative");
    if (dim == 1) {
        CubatureRule rule = gauss_legendre(degree);
        if (cubature_error(rule) > 1e-8) throw ConvergenceError("rule construction failed");
        return rule;
    }
    // Odd-degree monomials vanish for any ±-paired rule, so only even degrees are matched.
    std::vector<Exponent> even;
    for_each_monomial(dim, degree, [&](const Exponent& e) {
        if (total_degree(e) % 2 == 0) even.push_back(e);
    });
    Vector target;
    for (const auto& e : even) target.push_back(ball_monomial_moment(e));

    std::size_t candidates = std::max<std::size_t>(50, 4 * even.size());
    for (int attempt = 0; attempt < 6; ++attempt, candidates *= 2) {
        Rng rng(seed, 0xc0b + static_cast<std::uint64_t>(attempt));
        std::vector<Vector> pts;
        for (std::size_t c = 0; c < candidates; ++c)
            pts.push_back(c % 4 == 3 ? rng.sphere_point(dim) : rng.ball_point(dim));
        Matrix a(even.size(), pts.size());
        for (std::size_t r = 0; r < even.size(); ++r)
            for (std::size_t c = 0; c < pts.size(); ++c) a(r, c) = monomial_at(even[r], pts[c]);
        const Vector w = nnls(a, target);
        CubatureRule rule{dim, degree, {}, {}};
        for (std::size_t c = 0; c < pts.size(); ++c) {
            if (w[c] <= 0.0) continue;
            rule.nodes.push_back(pts[c]);
            rule.weights.push_back(0.5 * w[c]);
            rule.nodes.push_back(scaled(-1.0, pts[c]));
            rule.weights.push_back(0.5 * w[c]);
        }
        if (!rule.nodes.empty() && cubature_error(rule) <= 1e-8) return rule;
    }
    throw ConvergenceError("rule construction failed");
}

LiftedPolynomial conditional_expectation_cubature(const Polynomial& h, const SpectrumSplit& split,
                                                  const CubatureRule& rule) {
    const std::size_t n = h.num_vars();
    const std::size_t m = split.ell.cols();
    const std::size_t k = split.s.cols();
    if (split.ell.rows() != n || split.s.rows() != n || m + k != n)
        throw DimensionError("conditional expectation: split does not match h");
    if (rule.dim != k) throw DimensionError("cubature rule dimension must be n - m");
    if (rule.degree < h.degree()) throw DimensionError("cubature rule degree is below the degree of h");
    LiftedPolynomial out{m, Polynomial(m + 1)};
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        const Vector sv = split.s * rule.nodes[j];
        std::vector<Polynomial> forms;
        for (std::size_t i = 0; i < n; ++i) {
            Vector row(m + 1);
            for (std::size_t c = 0; c < m; ++c) row[c] = split.ell(i, c);
            row[m] = sv[i];
            forms.push_back(Polynomial::linear(row));
        }
        Polynomial term = substitute_linear(h, forms);
        term *= rule.weights[j];
        out.poly += term;
    }
    return out;
}

QSolution solve_Q(const LiftedPolynomial& fhat, const SolveOptions& opts) {
    const std::size_t m = fhat.m;
    if (fhat.poly.num_vars() != m + 1) throw DimensionError("solve_Q: lifted polynomial must have m+1 variables");
    std::vector<Polynomial> flip;
    for (std::size_t j = 0; j < m; ++j) flip.push_back(Polynomial::variable(m + 1, j));
    flip.push_back(-1.0 * Polynomial::variable(m + 1, m));
    const Polynomial mirrored = substitute_linear(fhat.poly, flip);

    const SolveResult plus = minimize_sphere(fhat.poly, opts, HalfSphere::y_nonneg);
    const SolveResult minus = minimize_sphere(mirrored, opts, HalfSphere::y_nonpos);
    QSolution q;
    q.rho_plus = plus.value;
    q.rho_minus = minus.value;
    q.rho = std::min(plus.value, minus.value);
    if (plus.value <= minus.value) {
        q.point = plus.point;
    } else {
        q.point = minus.point;
        q.point.back() = -q.point.back();
    }
    q.status = plus.status == SolveStatus::converged && minus.status == SolveStatus::converged
                   ? SolveStatus::converged
                   : SolveStatus::max_iter;
    return q;
}

double hhat_eval(const LiftedPolynomial& fhat, const SpectrumSplit& split, std::span<const double> x) {
    if (x.size() != split.ell.rows()) throw DimensionError("hhat_eval: x has the wrong length");
    Vector X = transpose_times(split.ell, x);
    const double r2 = dot(X, X);
    if (r2 > (1.0 + 1e-6) * (1.0 + 1e-6)) throw DimensionError("hhat_eval: ellᵀx lies outside the unit ball");
    X.push_back(std::sqrt(std::max(0.0, 1.0 - r2)));
    return fhat.poly.evaluate(X);
}

Polynomial hhat_polynomial(const LiftedPolynomial& fhat, const SpectrumSplit& split) {
    const std::size_t m = fhat.m;
    const std::size_t n = split.ell.rows();
    if (odd_y_mass(fhat) > 0.0) throw DimensionError("hhat_polynomial: f̂ has odd powers of Y");
    // q(X, T) with T = Y², then X ↦ ellᵀx and T ↦ 1 − ‖ellᵀx‖².
    Polynomial q(m + 1);
    for (const auto& [e, c] : fhat.poly.terms()) {
        Exponent halved = e;
        halved.back() /= 2;
        q.add_term(halved, c);
    }
    std::vector<Polynomial> forms;
    Polynomial t = Polynomial::constant(n, 1.0);
    for (std::size_t j = 0; j < m; ++j) {
        forms.push_back(Polynomial::linear(split.ell.column(j)));
        t -= forms.back() * forms.back();
    }
    forms.push_back(t);
    return substitute_linear(q, forms);
}

double odd_y_mass(const LiftedPolynomial& fhat) {
    double mass = 0.0;
    for (const auto& [e, c] : fhat.poly.terms())
        if (e.back() % 2 == 1) mass += std::abs(c);
    return mass;
}

double y_mass(const LiftedPolynomial& fhat) {
    double mass = 0.0;
    for (const auto& [e, c] : fhat.poly.terms())
        if (e.back() > 0) mass += std::abs(c);
    return mass;
}

L2Estimate l2_error(const Polynomial& h, const LiftedPolynomial& fhat, const SpectrumSplit& split,
                    std::size_t num_samples, std::uint64_t seed) {
    if (num_samples < 2) throw DimensionError("l2_error: need at least two samples");
    constexpr std::size_t kBlocks = 64;
    const std::size_t n = h.num_vars();
    std::vector<double> sum(kBlocks, 0.0), sum_sq(kBlocks, 0.0);
    parallel_for(kBlocks, [&](std::size_t block) {
        Rng rng(seed, 0x12e + block);
        const std::size_t count = num_samples / kBlocks + (block < num_samples % kBlocks ? 1 : 0);
        for (std::size_t i = 0; i < count; ++i) {
            const Vector x = rng.ball_point(n);
            const double d = h.evaluate(x) - hhat_eval(fhat, split, x);
            sum[block] += d * d;
            sum_sq[block] += d * d * d * d;
        }
    });
    double s = 0.0, s2 = 0.0;
    for (std::size_t b = 0; b < kBlocks; ++b) {
        s += sum[b];
        s2 += sum_sq[b];
    }
    const double N = static_cast<double>(num_samples);
    const double mean = s / N;
    const double var = std::max(0.0, (s2 / N - mean * mean) * N / (N - 1.0));
    return {mean, std::sqrt(var / N)};
}

}  // namespace lowform
