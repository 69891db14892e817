#include "lowform/ball_moments.hpp"

#include "lowform/error.hpp"

namespace lowform {

double ball_monomial_moment(const Exponent& alpha) {
    const double n = static_cast<double>(alpha.size());
    double value = 1.0;
    int half_degree = 0;
    for (int a : alpha) {
        if (a < 0) throw DimensionError("ball_monomial_moment: negative exponent");
        if (a % 2 != 0) return 0.0;
        for (int k = a - 1; k > 1; k -= 2) value *= k;  // (a-1)!!
        half_degree += a / 2;
    }
    for (int k = 1; k <= half_degree; ++k) value /= n + 2.0 * k;
    return value;
}

double ball_monomial_moment(const Exponent& alpha, std::size_t n) {
    if (alpha.size() != n) throw DimensionError("ball_monomial_moment: exponent length differs from dimension");
    return ball_monomial_moment(alpha);
}

double expectation_uniform_ball(const Polynomial& p) {
    double sum = 0.0;
    for (const auto& [e, c] : p.terms()) sum += c * ball_monomial_moment(e);
    return sum;
}

}  // namespace lowform
