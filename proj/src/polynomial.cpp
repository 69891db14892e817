#include "lowform/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lowform/error.hpp"

namespace lowform {

bool GradedLex::operator()(const Exponent& a, const Exponent& b) const {
    const int da = total_degree(a);
    const int db = total_degree(b);
    if (da != db) return da < db;
    // Same degree: larger leading exponents first.
    return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

int total_degree(const Exponent& e) { return std::accumulate(e.begin(), e.end(), 0); }

namespace {

void prune(Polynomial::TermMap& terms) {
    std::erase_if(terms, [](const auto& kv) { return std::abs(kv.second) < kDropTolerance; });
}

}  // namespace

Polynomial::Polynomial(std::size_t num_vars) : num_vars_(num_vars) {}

Polynomial Polynomial::constant(std::size_t num_vars, double c) {
    Polynomial p(num_vars);
    p.add_term(Exponent(num_vars, 0), c);
    return p;
}

Polynomial Polynomial::variable(std::size_t num_vars, std::size_t index) {
    if (index >= num_vars) throw DimensionError("Polynomial::variable: index out of range");
    Exponent e(num_vars, 0);
    e[index] = 1;
    return monomial(std::move(e), 1.0);
}

Polynomial Polynomial::monomial(Exponent exponent, double c) {
    for (int a : exponent)
        if (a < 0) throw DimensionError("Polynomial::monomial: negative exponent");
    Polynomial p(exponent.size());
    p.add_term(exponent, c);
    return p;
}

Polynomial Polynomial::linear(std::span<const double> coeffs, double offset) {
    const std::size_t n = coeffs.size();
    Polynomial p = constant(n, offset);
    Exponent e(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        e[i] = 1;
        p.add_term(e, coeffs[i]);
        e[i] = 0;
    }
    return p;
}

int Polynomial::degree() const {
    // Graded order: the last term has the largest total degree.
    return terms_.empty() ? -1 : total_degree(terms_.rbegin()->first);
}

int Polynomial::degree_in(std::size_t var) const {
    if (var >= num_vars_) throw DimensionError("Polynomial::degree_in: variable out of range");
    int d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, e[var]);
    return d;
}

double Polynomial::coefficient(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::add_term(const Exponent& e, double c) {
    if (e.size() != num_vars_) throw DimensionError("Polynomial::add_term: exponent length mismatch");
    if (c == 0.0) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) it->second += c;
    if (std::abs(it->second) < kDropTolerance) terms_.erase(it);
}

double Polynomial::evaluate(std::span<const double> x) const {
    if (x.size() != num_vars_)
        throw DimensionError("evaluate: point has length " + std::to_string(x.size()) + ", polynomial has " +
                             std::to_string(num_vars_) + " variables");
    if (terms_.empty()) return 0.0;
    const int d = degree();
    // powers[i*(d+1)+k] = x_i^k
    std::vector<double> powers(num_vars_ * static_cast<std::size_t>(d + 1));
    for (std::size_t i = 0; i < num_vars_; ++i) {
        double* row = powers.data() + i * static_cast<std::size_t>(d + 1);
        row[0] = 1.0;
        for (int k = 1; k <= d; ++k) row[k] = row[k - 1] * x[i];
    }
    double sum = 0.0;
    for (const auto& [e, c] : terms_) {
        double t = c;
        for (std::size_t i = 0; i < num_vars_; ++i)
            if (e[i] != 0) t *= powers[i * static_cast<std::size_t>(d + 1) + static_cast<std::size_t>(e[i])];
        sum += t;
    }
    return sum;
}

Polynomial Polynomial::derivative(std::size_t var) const {
    if (var >= num_vars_) throw DimensionError("derivative: variable out of range");
    Polynomial d(num_vars_);
    for (const auto& [e, c] : terms_) {
        if (e[var] == 0) continue;
        Exponent e2 = e;
        e2[var] -= 1;
        d.add_term(e2, c * e[var]);
    }
    return d;
}

double Polynomial::max_coefficient() const {
    double m = 0.0;
    for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
    return m;
}

void Polynomial::check_same_vars(const Polynomial& q) const {
    if (q.num_vars_ != num_vars_)
        throw DimensionError("polynomial arithmetic: " + std::to_string(num_vars_) + " vs " +
                             std::to_string(q.num_vars_) + " variables");
}

Polynomial& Polynomial::operator+=(const Polynomial& q) {
    check_same_vars(q);
    for (const auto& [e, c] : q.terms_) add_term(e, c);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& q) {
    check_same_vars(q);
    for (const auto& [e, c] : q.terms_) add_term(e, -c);
    return *this;
}

Polynomial& Polynomial::operator*=(double c) {
    for (auto& [e, v] : terms_) v *= c;
    prune(terms_);
    return *this;
}

Polynomial operator*(const Polynomial& p, const Polynomial& q) {
    p.check_same_vars(q);
    Polynomial r(p.num_vars_);
    Exponent e(p.num_vars_);
    for (const auto& [ea, ca] : p.terms_)
        for (const auto& [eb, cb] : q.terms_) {
            for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
            auto [it, inserted] = r.terms_.try_emplace(e, ca * cb);
            if (!inserted) it->second += ca * cb;
        }
    prune(r.terms_);
    return r;
}

Polynomial pow(const Polynomial& p, int k) {
    if (k < 0) throw DimensionError("pow: negative exponent");
    Polynomial result = Polynomial::constant(p.num_vars(), 1.0);
    Polynomial base = p;
    while (k > 0) {
        if (k & 1) result = result * base;
        k >>= 1;
        if (k > 0) base = base * base;
    }
    return result;
}

std::vector<Polynomial> gradient(const Polynomial& p) {
    std::vector<Polynomial> g;
    g.reserve(p.num_vars());
    for (std::size_t i = 0; i < p.num_vars(); ++i) g.push_back(p.derivative(i));
    return g;
}

Vector evaluate_all(const std::vector<Polynomial>& ps, std::span<const double> x) {
    Vector v(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) v[i] = ps[i].evaluate(x);
    return v;
}

Polynomial substitute_linear(const Polynomial& p, const std::vector<Polynomial>& forms) {
    if (forms.size() != p.num_vars())
        throw DimensionError("substitute_linear: expected " + std::to_string(p.num_vars()) + " forms, got " +
                             std::to_string(forms.size()));
    if (forms.empty()) {
        // p has no variables: it is a constant, re-expressed in zero variables.
        return p;
    }
    const std::size_t k = forms.front().num_vars();
    for (const auto& f : forms)
        if (f.num_vars() != k) throw DimensionError("substitute_linear: forms disagree on variable count");

    // powers[i][a] = forms[i]^a, filled lazily up to the degree needed.
    std::vector<std::vector<Polynomial>> powers(forms.size());
    for (std::size_t i = 0; i < forms.size(); ++i) {
        powers[i].push_back(Polynomial::constant(k, 1.0));
        const int d = p.is_zero() ? 0 : p.degree_in(i);
        for (int a = 1; a <= d; ++a) powers[i].push_back(powers[i].back() * forms[i]);
    }

    Polynomial result(k);
    for (const auto& [e, c] : p.terms()) {
        Polynomial term = Polynomial::constant(k, c);
        for (std::size_t i = 0; i < forms.size(); ++i)
            if (e[i] != 0) term = term * powers[i][static_cast<std::size_t>(e[i])];
        result += term;
    }
    return result;
}

Polynomial substitute_matrix(const Polynomial& p, const Matrix& m) {
    if (m.rows() != p.num_vars()) throw DimensionError("substitute_matrix: matrix rows must equal variable count");
    std::vector<Polynomial> forms;
    forms.reserve(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) forms.push_back(Polynomial::linear(m.row(i)));
    if (forms.empty()) return Polynomial::constant(m.cols(), p.coefficient(Exponent{}));
    return substitute_linear(p, forms);
}

double max_coefficient_gap(const Polynomial& p, const Polynomial& q) { return (p - q).max_coefficient(); }

}  // namespace lowform
