#include "lowform/generator.hpp"

#include "lowform/error.hpp"
#include "lowform/linalg.hpp"

namespace lowform {

namespace {

void for_each_exponent(std::size_t n, int max_degree, Exponent& cur, std::size_t pos, int remaining,
                       const auto& visit) {
    if (pos == n) {
        visit(cur);
        return;
    }
    for (int a = 0; a <= remaining; ++a) {
        cur[pos] = a;
        for_each_exponent(n, max_degree, cur, pos + 1, remaining - a, visit);
    }
    cur[pos] = 0;
}

}  // namespace

Polynomial random_dense_polynomial(std::size_t num_vars, int degree, Rng& rng) {
    Polynomial p(num_vars);
    Exponent cur(num_vars, 0);
    for_each_exponent(num_vars, degree, cur, 0, degree, [&](const Exponent& e) {
        const double c = rng.normal();
        if (total_degree(e) > 0) p.add_term(e, c);
    });
    return p;
}

Matrix random_forms(std::size_t n, std::size_t m, Rng& rng, bool orthonormal) {
    for (;;) {
        Matrix ell(n, m);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) ell(i, j) = rng.normal();
        if (!orthonormal || m == 0) return ell;
        try {
            return orthonormalize(ell);
        } catch (const DimensionError&) {
            // Gaussian columns are dependent with probability zero; draw again.
        }
    }
}

GeneratedInstance generate_instance(std::uint64_t seed, std::size_t n, std::size_t m, int degree, double epsilon,
                                    bool orthonormal_forms) {
    if (n == 0) throw DimensionError("generate_instance: n must be positive");
    if (m > n) throw DimensionError("generate_instance: m must not exceed n");
    if (degree < 1) throw DimensionError("generate_instance: degree must be at least 1");
    Rng rng(seed, 0x6e6);
    GeneratedInstance inst;
    inst.seed = seed;
    inst.epsilon = epsilon;
    inst.f0 = random_dense_polynomial(m, degree, rng);
    inst.ell0 = random_forms(n, m, rng, orthonormal_forms);
    inst.g0 = random_dense_polynomial(n, degree, rng);
    inst.h = m == 0 ? Polynomial(n) : substitute_matrix(inst.f0, inst.ell0.transpose());
    if (epsilon != 0.0) inst.h += epsilon * inst.g0;
    return inst;
}

}  // namespace lowform
