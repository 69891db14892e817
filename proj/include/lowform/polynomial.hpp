#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "lowform/matrix.hpp"

namespace lowform {

/// Exponent vector of a monomial; its length equals the polynomial's variable count.
using Exponent = std::vector<int>;

/// Graded lexicographic order: lower total degree first, then the exponent of
/// x1 descending, then x2, and so on (so x1² < x1·x2 < x2² among quadratics).
struct GradedLex {
    bool operator()(const Exponent& a, const Exponent& b) const;
};

int total_degree(const Exponent& e);

/// Coefficients whose magnitude falls below this are removed after arithmetic.
inline constexpr double kDropTolerance = 1e-14;

/// Sparse multivariate polynomial with double coefficients.
///
/// A value type: every operation returns a new polynomial, so instances can be
/// shared freely between threads. The zero polynomial has no terms.
class Polynomial {
public:
    using TermMap = std::map<Exponent, double, GradedLex>;

    Polynomial() = default;
    explicit Polynomial(std::size_t num_vars);

    static Polynomial constant(std::size_t num_vars, double c);
    /// The coordinate function x_index.
    static Polynomial variable(std::size_t num_vars, std::size_t index);
    /// c·x^exponent
    static Polynomial monomial(Exponent exponent, double c);
    /// Σ coeffs[i]·x_i + offset
    static Polynomial linear(std::span<const double> coeffs, double offset = 0.0);

    std::size_t num_vars() const noexcept { return num_vars_; }
    const TermMap& terms() const noexcept { return terms_; }
    std::size_t size() const noexcept { return terms_.size(); }
    bool is_zero() const noexcept { return terms_.empty(); }
    /// Total degree; -1 for the zero polynomial.
    int degree() const;
    /// Largest exponent of one variable across all terms.
    int degree_in(std::size_t var) const;
    double coefficient(const Exponent& e) const;

    /// Adds c·x^e in place; drops the term if the result falls under the drop tolerance.
    void add_term(const Exponent& e, double c);

    double evaluate(std::span<const double> x) const;
    Polynomial derivative(std::size_t var) const;
    /// Largest absolute coefficient.
    double max_coefficient() const;

    Polynomial& operator+=(const Polynomial& q);
    Polynomial& operator-=(const Polynomial& q);
    Polynomial& operator*=(double c);

    friend Polynomial operator+(Polynomial p, const Polynomial& q) { return p += q; }
    friend Polynomial operator-(Polynomial p, const Polynomial& q) { return p -= q; }
    friend Polynomial operator*(Polynomial p, double c) { return p *= c; }
    friend Polynomial operator*(double c, Polynomial p) { return p *= c; }
    friend Polynomial operator-(Polynomial p) { return p *= -1.0; }
    friend Polynomial operator*(const Polynomial& p, const Polynomial& q);
    friend bool operator==(const Polynomial&, const Polynomial&) = default;

private:
    void check_same_vars(const Polynomial& q) const;

    std::size_t num_vars_ = 0;
    TermMap terms_;
};

Polynomial pow(const Polynomial& p, int k);

/// Component i is ∂p/∂x_i.
std::vector<Polynomial> gradient(const Polynomial& p);
Vector evaluate_all(const std::vector<Polynomial>& ps, std::span<const double> x);

/// Composition p(forms[0](t), …, forms[n-1](t)).
///
/// All forms must share one variable count k, which becomes the result's
/// variable count. Degree-1 forms give a linear change of variables; higher
/// degree forms are accepted as well.
Polynomial substitute_linear(const Polynomial& p, const std::vector<Polynomial>& forms);

/// The linear change of variables x = M·t, with t of length M.cols().
Polynomial substitute_matrix(const Polynomial& p, const Matrix& m);

/// Largest absolute coefficient of p - q.
double max_coefficient_gap(const Polynomial& p, const Polynomial& q);

}  // namespace lowform
